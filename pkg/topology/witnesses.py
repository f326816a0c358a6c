"""
Executable witnesses for the neighbourhood-base, separation and continuity
statements.

Every construction chooses its free parameters deterministically (midpoints
of feasible intervals found on the grid or by bisection) and then samples
the containment or disjointness claim it makes. The sampled evidence is a
``CheckReport`` attached to the witness.
"""
import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from django.conf import settings

from balls.geometry import Ball
from balls.sampling import sample_members
from balls.witnesses import feasible_floor, lemma1_witness
from distributions.checks import check_upsilon
from spaces.budget import log_grid
from spaces.checks import check_beta_homogeneous, check_delta2
from spaces.reports import MAX_KEPT_VIOLATIONS, CheckReport, Violation, flagged
from utils.exceptions import InfeasibleConstruction, PreconditionViolation
from utils.workers import stream_rng

logger = logging.getLogger(__name__)

DELTA2_CHAIN = 'delta2'
HOMOGENEOUS_CHAIN = 'homogeneous'
EXTENSION_DECADES = 2


@lru_cache(maxsize=128)
def _delta2_holds(space, budget, c):
    return check_delta2(space, budget, c).passed


@lru_cache(maxsize=128)
def _homogeneity_holds(space, budget, beta):
    return check_beta_homogeneous(space, beta, budget).passed


def verified_delta2(space, budget, c=None):
    """The Delta_2 constant to build with, after a sampled check; raises when unverified."""
    c = space.declared_c if c is None else c
    if c is None:
        raise PreconditionViolation("The space declares no Delta_2 constant.")
    if not _delta2_holds(space, budget, float(c)):
        raise PreconditionViolation(f"Delta_2 fails for the declared constant c = {c:g}.")
    return float(c)


def verified_beta(space, budget, beta=None):
    beta = space.declared_beta if beta is None else beta
    if beta is None:
        raise PreconditionViolation("The space declares no homogeneity exponent.")
    if not _homogeneity_holds(space, budget, float(beta)):
        raise PreconditionViolation(f"The space is not {beta:g}-homogeneous.")
    return float(beta)


def _optional_beta(space, budget, beta=None):
    try:
        return verified_beta(space, budget, beta)
    except PreconditionViolation:
        return None


def containment_evidence(check, inner, outer, budget, stream, samples=None):
    """Sampled members of ``inner`` must all be members of ``outer``."""
    outers = outer if isinstance(outer, tuple) else (outer,)
    rng = stream_rng(budget.rng_seed, stream)
    ys = sample_members(inner, rng, samples or budget.witness_samples, budget.epsilon)
    decided = np.all([~ball.undecided(ys, budget.epsilon) for ball in outers], axis=0) if len(ys) else []
    ys = ys[decided] if len(ys) else ys
    inside = np.all([ball.contains_many(ys) for ball in outers], axis=0) if len(ys) else np.empty(0, dtype=bool)
    kept, violated = flagged(~inside, lambda i: Violation({'y': ys[i].tolist()}, 0.0, 1.0))
    return CheckReport(check=check, violations=tuple(kept), violation_count=violated, samples_run=len(ys),
                       seed=budget.rng_seed)


def disjointness_evidence(check, first, second, budget, stream):
    """No sampled member of either ball is a member of the other."""
    rng = stream_rng(budget.rng_seed, stream)
    count = budget.separation_samples
    kept, violated, samples = [], 0, 0
    for source, other in ((first, second), (second, first)):
        ys = sample_members(source, rng, count, budget.epsilon)
        ys = ys[~other.undecided(ys, budget.epsilon)]
        shared = other.contains_many(ys)
        found, n = flagged(shared, lambda i: Violation({'z': ys[i].tolist()}, 1.0, 0.0))
        kept.extend(found)
        violated += n
        samples += len(ys)
    return CheckReport(check=check, violations=tuple(kept[:MAX_KEPT_VIOLATIONS]), violation_count=violated,
                       samples_run=samples, seed=budget.rng_seed)


@dataclass(frozen=True)
class RefinementWitness:
    outer: Ball
    inner: Ball
    t_star: float
    alpha_star: float
    s: float
    alpha_1: float
    chain: str
    evidence: CheckReport = field(compare=False)

    def as_dict(self):
        return {
            'outer': self.outer.as_dict(),
            'inner': self.inner.as_dict(),
            't_star': self.t_star,
            'alpha_star': self.alpha_star,
            's': self.s,
            'alpha_1': self.alpha_1,
            'chain': self.chain,
        }


@dataclass(frozen=True)
class IntersectionWitness:
    ball: Ball
    refinements: tuple
    evidence: CheckReport = field(compare=False)

    def as_dict(self):
        return {'ball': self.ball.as_dict(), 'refinements': [r.as_dict() for r in self.refinements]}


@dataclass(frozen=True)
class LocalBaseWitness:
    n: int
    ball: Ball
    evidence: CheckReport = field(compare=False)

    def as_dict(self):
        return {'n': self.n, 'ball': self.ball.as_dict()}


@dataclass(frozen=True)
class SeparationWitness:
    ball_x: Ball
    ball_y: Ball
    t0: float
    alpha_1: float
    evidence: CheckReport = field(compare=False)

    def as_dict(self):
        return {'ball_x': self.ball_x.as_dict(), 'ball_y': self.ball_y.as_dict(), 't0': self.t0,
                'alpha_1': self.alpha_1}


@dataclass(frozen=True)
class ContinuityWitness:
    kind: str
    target: Ball
    b1: Ball
    b2: Ball | None = None
    r: float | None = None
    lam: float | None = None
    evidence: CheckReport = field(default=None, compare=False)

    def as_dict(self):
        data = {'kind': self.kind, 'target': self.target.as_dict(), 'b1': self.b1.as_dict()}
        if self.b2 is not None:
            data['b2'] = self.b2.as_dict()
        if self.r is not None:
            data.update(r=self.r, lambda_=self.lam)
        return data


def _levels(alpha, alpha_star):
    """1 - s and alpha_1 as midpoints: alpha_star and alpha_1 exceed 1 - s, which exceeds 1 - alpha."""
    one_minus_s = (1 - alpha + alpha_star) / 2
    return 1 - one_minus_s, (one_minus_s + 1) / 2


def refine_ball(space, outer, z, budget, c=None, beta=None):
    """
    A ball B(z, 1 - alpha_1, t') inside ``outer`` for a member z.

    The Delta_2 chain splits t = t* + (t - t*) with mu_{x-z}(t*/c) above
    1 - alpha and gives t' = (t - t*)/c; it needs mu_{x-z}(t/c) > 1 - alpha.
    Otherwise, when the space is verified beta-homogeneous, the convex split
    x - y = a (x-z)/a + b (z-y)/b with a = (t*/t_1)^(1/beta) gives
    t' = (t - t_1) b^beta for the ``lemma1_witness`` scale t* and t_1 = (t* + t)/2.
    """
    z = space.vector(z)
    if not outer.contains(z):
        raise PreconditionViolation(f"{z.tolist()} is not a member of {outer}.")
    c = verified_delta2(space, budget, c)
    offset = outer.center_vector - z
    t, alpha = outer.scale, outer.level

    if space.value(offset, t / c) > outer.threshold:
        floor = feasible_floor(lambda s: space.value(offset, s / c) > outer.threshold, t)
        t_star = (floor + t) / 2
        alpha_star = space.value(offset, t_star / c)
        inner_scale = (t - t_star) / c
        chain = DELTA2_CHAIN
    else:
        beta = _optional_beta(space, budget, beta)
        if beta is None:
            raise InfeasibleConstruction(
                'mu_{x-z}(t*/c) > 1-alpha for some t* < t',
                "z lies outside B(x, alpha, t/c) and no homogeneity exponent is verified",
            )
        t_star = lemma1_witness(outer, z)
        alpha_star = space.value(offset, t_star)
        t_1 = (t_star + t) / 2
        a = (t_star / t_1) ** (1 / beta)
        inner_scale = (t - t_1) * (1 - a) ** beta
        chain = HOMOGENEOUS_CHAIN

    s, alpha_1 = _levels(alpha, alpha_star)
    if not inner_scale > 0 or not 0 < 1 - alpha_1 < 1:
        raise InfeasibleConstruction('inner ball with positive scale', f"scale {inner_scale:g}, level {1 - alpha_1:g}")
    inner = Ball(space, tuple(z), 1 - alpha_1, inner_scale)
    evidence = containment_evidence('refine_ball', inner, outer, budget, 'refine')
    logger.info(f"Refined {outer} at {z.tolist()} to {inner} ({chain} chain)")
    return RefinementWitness(outer, inner, t_star, alpha_star, s, alpha_1, chain, evidence)


def basis_intersection(space, ball_1, ball_2, y, budget, c=None, beta=None):
    """B(y, min level, min scale) of the refinements of both balls at y."""
    refinements = (
        refine_ball(space, ball_1, y, budget, c, beta),
        refine_ball(space, ball_2, y, budget, c, beta),
    )
    ball = Ball(
        space, tuple(space.vector(y)),
        min(r.inner.level for r in refinements),
        min(r.inner.scale for r in refinements),
    )
    evidence = containment_evidence('basis_intersection', ball, (ball_1, ball_2), budget, 'intersection')
    return IntersectionWitness(ball, refinements, evidence)


def origin_base_intersection(ball_1, ball_2, budget):
    """B(0, min level, min scale) for two balls at the origin."""
    if not (ball_1.is_centered_at_origin() and ball_2.is_centered_at_origin()):
        raise PreconditionViolation("Both balls must be centred at the origin.")
    ball = Ball.at_origin(ball_1.space, min(ball_1.level, ball_2.level), min(ball_1.scale, ball_2.scale))
    evidence = containment_evidence('origin_base_intersection', ball, (ball_1, ball_2), budget, 'origin_base')
    return IntersectionWitness(ball, (), evidence)


def local_base_index(level, scale):
    """The least natural n with 1/n < min(level, scale)."""
    bound = min(level, scale)
    n = max(1, math.floor(1 / bound) + 1)
    while 1 / n >= bound:
        n += 1
    while n > 1 and 1 / (n - 1) < bound:
        n -= 1
    return n


def local_base_containment(space, x, outer, budget):
    x = space.vector(x)
    if not np.array_equal(x, outer.center_vector):
        raise PreconditionViolation(f"{outer} is not centred at {x.tolist()}.")
    n = local_base_index(outer.level, outer.scale)
    ball = Ball(space, tuple(x), 1 / n, 1 / n)
    evidence = containment_evidence('local_base', ball, outer, budget, 'local_base')
    return LocalBaseWitness(n, ball, evidence)


def _pick_scale(values, grid, mask):
    """The grid scale whose value is nearest to 1/2 among the masked ones; the smaller t on ties."""
    candidates = np.flatnonzero(mask)
    if not candidates.size:
        return None
    best = candidates[np.argmin(np.abs(values[candidates] - 0.5))]
    return float(grid[best]), float(values[best])


def _scale_search(space, offset, budget, acceptable):
    grid = budget.grid
    values = space.evaluate(offset, grid)
    picked = _pick_scale(values, grid, acceptable(values))
    if picked is None:
        lower = np.asarray(log_grid(grid[0] / 10 ** EXTENSION_DECADES, grid[0], 8 * EXTENSION_DECADES + 1))
        values = space.evaluate(offset, lower)
        picked = _pick_scale(values, lower, acceptable(values))
    return picked


def separation_witness(space, x, y, budget, c=None):
    """
    Disjoint balls B(x, 1 - alpha_1, t0/(2c)) and B(y, 1 - alpha_1, t0/(2c))
    for mu_{x-y}(t0) < alpha_1 < 1.
    """
    x, y = space.vector(x), space.vector(y)
    if np.array_equal(x, y):
        raise PreconditionViolation("Separation needs two distinct points.")
    c = verified_delta2(space, budget, c)
    picked = _scale_search(space, x - y, budget, lambda values: values < 1 - budget.epsilon)
    if picked is None:
        raise InfeasibleConstruction('mu_{x-y}(t0) < 1 for some t0', "x - y behaves like 0 on every sampled scale")
    t0, value = picked
    alpha_1 = (value + 1) / 2
    ball_x = Ball(space, tuple(x), 1 - alpha_1, t0 / (2 * c))
    ball_y = Ball(space, tuple(y), 1 - alpha_1, t0 / (2 * c))
    evidence = disjointness_evidence('separation', ball_x, ball_y, budget, 'separation')
    logger.info(f"Separated {x.tolist()} and {y.tolist()} at t0 = {t0:g}")
    return SeparationWitness(ball_x, ball_y, t0, alpha_1, evidence)


def homogeneous_separation_witness(space, x, budget, beta=None):
    """
    Disjoint balls at 0 and x with level alpha_0 and scale t0/2^(beta+1),
    for mu_x(t0) strictly inside (0, 1) and below 1 - alpha_0.
    """
    x = space.vector(x)
    if not np.any(x):
        raise PreconditionViolation("Separation from the origin needs x != 0.")
    beta = verified_beta(space, budget, beta)
    upsilon = check_upsilon(space.mu(x), budget)
    if not upsilon.passed:
        raise PreconditionViolation(f"(Upsilon) fails for mu_x: {upsilon.violation_count} violations")

    def inside(values):
        return (values > budget.epsilon) & (values < 1 - budget.epsilon)

    picked = _scale_search(space, x, budget, inside)
    if picked is None:
        raise InfeasibleConstruction('0 < mu_x(t0) < 1 for some grid t0', "no sampled scale lies in the transition")
    t0, value = picked
    alpha_0 = (1 - value) / 2
    scale = t0 / 2 ** (beta + 1)
    ball_0 = Ball.at_origin(space, alpha_0, scale)
    ball_x = Ball(space, tuple(x), alpha_0, scale)
    evidence = disjointness_evidence('homogeneous_separation', ball_0, ball_x, budget, 'homogeneous_separation')
    return SeparationWitness(ball_0, ball_x, t0, 1 - alpha_0, evidence)


def _origin_target(target):
    if not target.is_centered_at_origin():
        raise PreconditionViolation(f"{target} is not centred at the origin.")


def addition_continuity_witness(space, target, budget, beta=None):
    """B1 = B2 = B(0, alpha/2, t/2^(beta+2)) with B1 + B2 inside the target."""
    _origin_target(target)
    beta = verified_beta(space, budget, beta)
    b1 = Ball.at_origin(space, target.level / 2, target.scale / 2 ** (beta + 2))
    rng = stream_rng(budget.rng_seed, 'addition')
    xs = sample_members(b1, rng, budget.witness_samples, budget.epsilon)
    ys = sample_members(b1, rng, budget.witness_samples, budget.epsilon)
    pairs = min(len(xs), len(ys))
    sums = xs[:pairs] + ys[:pairs]
    decided = ~target.undecided(sums, budget.epsilon)
    xs, ys, sums = xs[:pairs][decided], ys[:pairs][decided], sums[decided]
    kept, violated = flagged(
        ~target.contains_many(sums),
        lambda i: Violation({'x': xs[i].tolist(), 'y': ys[i].tolist()}, 0.0, 1.0),
    )
    evidence = CheckReport(check='addition_continuity', violations=tuple(kept), violation_count=violated,
                           samples_run=len(sums), seed=budget.rng_seed)
    return ContinuityWitness('addition', target, b1, b2=b1, evidence=evidence)


def scalar_continuity_witness(space, target, lam, budget, beta=None):
    """
    B1 = B(0, alpha/2, t_1) and r with xi x in the target for |xi - lambda| < r:
    t_1 = t/(4 L^beta) with L = max(|lambda|, floor), r = (t/(2 t_1))^(1/beta).
    """
    _origin_target(target)
    beta = verified_beta(space, budget, beta)
    magnitude = max(abs(float(lam)), settings.PM_TOPOLOGY['LAMBDA_FLOOR'])
    t_1 = target.scale / (4 * magnitude ** beta)
    r = (target.scale / (2 * t_1)) ** (1 / beta)
    b1 = Ball.at_origin(space, target.level / 2, t_1)
    rng = stream_rng(budget.rng_seed, 'scalar')
    xs = sample_members(b1, rng, budget.witness_samples, budget.epsilon)
    xis = lam + r * rng.uniform(-1.0, 1.0, len(xs))
    products = xis[:, None] * xs
    decided = ~target.undecided(products, budget.epsilon)
    xs, xis, products = xs[decided], xis[decided], products[decided]
    kept, violated = flagged(
        ~target.contains_many(products),
        lambda i: Violation({'x': xs[i].tolist(), 'xi': float(xis[i])}, 0.0, 1.0),
    )
    evidence = CheckReport(check='scalar_continuity', violations=tuple(kept), violation_count=violated,
                           samples_run=len(products), seed=budget.rng_seed)
    return ContinuityWitness('scalar', target, b1, r=r, lam=float(lam), evidence=evidence)
