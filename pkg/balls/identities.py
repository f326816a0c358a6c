"""
Sampled checks of the ball algebra: translation, scaling, monotonicity in
scale and level, and balanced/convex balls at the origin.

Every check compares memberships as booleans on points whose membership is
decided (see ``Ball.undecided``); there is no tolerance beyond that.
"""
import logging

from spaces.checks import check_beta_homogeneous
from spaces.reports import CheckReport, Violation, flagged
from utils.exceptions import PreconditionViolation
from utils.workers import stream_rng
from .geometry import Ball
from .sampling import sample_around, sample_members

logger = logging.getLogger(__name__)


def _contains(ball, ys):
    return ball.contains_many(ys)


def _report(check, budget, points, mask, build, details=None):
    kept, violated = flagged(mask, build)
    return CheckReport(
        check=check,
        violations=tuple(kept),
        violation_count=violated,
        samples_run=len(points),
        seed=budget.rng_seed,
        details=dict(details or {}),
    )


def translate_identity(space, x, alpha, t, budget, membership=None, samples=None):
    """B(x, alpha, t) = x + B(0, alpha, t) on points sampled around x."""
    membership = membership or _contains
    ball_x = Ball(space, tuple(space.vector(x)), alpha, t)
    ball_0 = Ball.at_origin(space, alpha, t)
    rng = stream_rng(budget.rng_seed, 'translate')
    ys = sample_around(ball_x, rng, samples or budget.witness_samples, budget.epsilon)
    shifted = ys - ball_x.center_vector
    decided = ~ball_0.undecided(shifted, budget.epsilon)
    ys, shifted = ys[decided], shifted[decided]
    lhs, rhs = membership(ball_x, ys), membership(ball_0, shifted)
    return _report(
        'translate_identity', budget, ys, lhs != rhs,
        lambda i: Violation({'y': ys[i].tolist()}, float(lhs[i]), float(rhs[i])),
        {'ball': ball_x.as_dict()},
    )


def scaling_identity(space, beta, alpha, t, budget, verify_precondition=True, samples=None):
    """
    B(0, alpha, t^beta) = t B(0, alpha, 1): y belongs to the left ball iff
    y/t belongs to the unit-scale ball.
    """
    if not t > 0:
        raise PreconditionViolation(f"The scaling factor must be positive, got {t}.")
    if verify_precondition:
        homogeneity = check_beta_homogeneous(space, beta, budget)
        if not homogeneity.passed:
            logger.warning(f"Scaling identity skipped: {space.describe()} is not {beta}-homogeneous")
            return CheckReport.precondition_failed(
                'scaling_identity', f"space is not {beta:g}-homogeneous ({homogeneity.violation_count} violations)",
                budget.rng_seed,
            )
    scaled = Ball.at_origin(space, alpha, t ** beta)
    unit = Ball.at_origin(space, alpha, 1.0)
    rng = stream_rng(budget.rng_seed, 'scaling')
    ys = sample_around(scaled, rng, samples or budget.witness_samples, budget.epsilon)
    ys = ys[~unit.undecided(ys / t, budget.epsilon)]
    lhs, rhs = scaled.contains_many(ys), unit.contains_many(ys / t)
    return _report(
        'scaling_identity', budget, ys, lhs != rhs,
        lambda i: Violation({'y': ys[i].tolist(), 't': float(t)}, float(lhs[i]), float(rhs[i])),
        {'beta': float(beta), 'alpha': float(alpha)},
    )


def _subset(check, inner, outer, budget, samples, name):
    rng = stream_rng(budget.rng_seed, name)
    ys = sample_members(inner, rng, samples or budget.witness_samples, budget.epsilon)
    ys = ys[~outer.undecided(ys, budget.epsilon)]
    inside = outer.contains_many(ys)
    return _report(
        check, budget, ys, ~inside,
        lambda i: Violation({'y': ys[i].tolist()}, 0.0, 1.0),
        {'inner': inner.as_dict(), 'outer': outer.as_dict()},
    )


def monotone_in_scale(space, alpha, t1, t2, budget, samples=None):
    """B(0, alpha, t1) is inside B(0, alpha, t2) for t1 <= t2."""
    if t1 > t2:
        raise PreconditionViolation(f"Scales must be ordered, got {t1} > {t2}.")
    return _subset(
        'monotone_in_scale', Ball.at_origin(space, alpha, t1), Ball.at_origin(space, alpha, t2),
        budget, samples, 'monotone_scale',
    )


def monotone_in_level(space, alpha1, alpha2, t, budget, samples=None):
    """B(0, alpha1, t) is inside B(0, alpha2, t) for alpha1 <= alpha2."""
    if alpha1 > alpha2:
        raise PreconditionViolation(f"Levels must be ordered, got {alpha1} > {alpha2}.")
    return _subset(
        'monotone_in_level', Ball.at_origin(space, alpha1, t), Ball.at_origin(space, alpha2, t),
        budget, samples, 'monotone_level',
    )


def _homogeneous_origin_precondition(check, region, budget):
    if not region.is_centered_at_origin():
        raise PreconditionViolation(f"{check} needs a region centred at the origin.")
    if region.space.declared_beta is None:
        return CheckReport.precondition_failed(check, "space declares no homogeneity exponent", budget.rng_seed)
    return None


def is_balanced_sampled(ball, budget, samples=None):
    """lambda y stays in the ball for sampled members y and |lambda| <= 1."""
    failed = _homogeneous_origin_precondition('balanced', ball, budget)
    if failed:
        return failed
    rng = stream_rng(budget.rng_seed, 'balanced')
    ys = sample_members(ball, rng, samples or budget.witness_samples, budget.epsilon)
    lambdas = rng.uniform(-1.0, 1.0, len(ys))
    points = lambdas[:, None] * ys
    decided = ~ball.undecided(points, budget.epsilon)
    ys, lambdas, points = ys[decided], lambdas[decided], points[decided]
    inside = ball.contains_many(points)
    return _report(
        'balanced', budget, points, ~inside,
        lambda i: Violation({'y': ys[i].tolist(), 'lambda': float(lambdas[i])}, 0.0, 1.0),
        {'ball': ball.as_dict()},
    )


def is_convex_sampled(region, budget, samples=None):
    """
    lambda x + (1 - lambda) y stays in the region for sampled members x, y
    and lambda in (0, 1). The region may be a ball or a union of balls.
    """
    failed = _homogeneous_origin_precondition('convex', region, budget)
    if failed:
        return failed
    rng = stream_rng(budget.rng_seed, 'convex')
    count = samples or budget.witness_samples
    members = sample_members(region, rng, 2 * count, budget.epsilon)
    # random pairing, so members of different components of a union meet
    xs, ys = members[0::2], members[1::2]
    pairs = min(len(xs), len(ys))
    xs, ys = xs[:pairs], rng.permutation(ys[:pairs])
    lambdas = rng.uniform(0.0, 1.0, pairs)
    points = lambdas[:, None] * xs + (1 - lambdas)[:, None] * ys
    decided = ~region.undecided(points, budget.epsilon)
    xs, ys, lambdas, points = xs[decided], ys[decided], lambdas[decided], points[decided]
    inside = region.contains_many(points)
    return _report(
        'convex', budget, points, ~inside,
        lambda i: Violation({'x': xs[i].tolist(), 'y': ys[i].tolist(), 'lambda': float(lambdas[i])}, 0.0, 1.0),
        {'region': region.as_dict()},
    )
