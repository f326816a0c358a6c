import logging

from django.conf import settings

from utils.exceptions import InfeasibleConstruction, PreconditionViolation

logger = logging.getLogger(__name__)


def feasible_floor(predicate, upper, steps=None):
    """
    Bisect (0, upper] for the infimum of the up-set where ``predicate``
    holds. ``predicate(upper)`` must be true; the returned point is the
    smallest feasible argument found.
    """
    steps = steps or settings.PM_TOPOLOGY['BISECTION_STEPS']
    lo, hi = 0.0, float(upper)
    for _ in range(steps):
        mid = (lo + hi) / 2
        if predicate(mid):
            hi = mid
        else:
            lo = mid
    return hi


def lemma1_witness(ball, y):
    """
    A scale t* in (0, t) with mu_{x-y}(t*) > 1 - alpha for a member y of
    B(x, alpha, t): the midpoint of the feasible interval found by bisection.

    Raises InfeasibleConstruction when the feasible interval collapses onto
    t, which happens when mu_{x-y} is not left-continuous at t.
    """
    if not ball.contains(y):
        raise PreconditionViolation(f"{list(y)} is not a member of {ball}.")
    offset = ball.center_vector - ball.space.vector(y)

    def feasible(s):
        return ball.space.value(offset, s) > ball.threshold

    floor = feasible_floor(feasible, ball.scale)
    resolution = settings.PM_TOPOLOGY['WITNESS_RESOLUTION']
    if ball.scale - floor <= resolution * ball.scale:
        raise InfeasibleConstruction(
            'mu_{x-y}(t*) > 1-alpha for some t* < t',
            f"feasible set collapses onto t = {ball.scale:g} for {ball}",
        )
    t_star = (floor + ball.scale) / 2
    logger.debug(f"Inner scale t* = {t_star:.6g} in {ball}")
    return t_star
