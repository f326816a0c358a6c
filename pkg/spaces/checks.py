"""
Sampled verification of the PM-space axioms and of the Delta_2, homogeneity
and (Upsilon) conditions.

Each check draws its samples through ``utils.workers.map_chunks`` on its own
named stream, so two checks never share random numbers and every report is a
function of the seed alone.
"""
import logging

import numpy as np

from distributions.checks import JUMP_DECAY, SUPREMUM_LIMIT
from utils.exceptions import PreconditionViolation
from utils.workers import map_chunks
from .instances import Family
from .reports import CheckReport, Violation, flagged

logger = logging.getLogger(__name__)

FUNCTION_SAMPLE_CAP = 2000
RADIAL_DECADES = (-3.0, 1.0)
DESCENT_DECADES = 300
HOMOGENEITY_DECADES = (-2.0, 2.0)
ZERO_PAIR_SHARE = 1 / 8


def default_delta2_candidates():
    return tuple(2.0 ** (k / 4) for k in range(17))


def convex_weights(rng, count):
    """a = |g|/(|g|+|g'|) for standard normal g, g'; b is 1 - a."""
    g = np.abs(rng.standard_normal((count, 2)))
    return g[:, 0] / (g[:, 0] + g[:, 1])


def homogeneity_scalars(rng, count):
    """Log-uniform magnitudes on [1e-2, 1e2] with a random sign."""
    magnitude = 10.0 ** rng.uniform(*HOMOGENEITY_DECADES, count)
    return np.where(rng.random(count) < 0.5, -magnitude, magnitude)


def _worst(gap):
    column = gap.argmax(axis=1)
    return column, gap[np.arange(gap.shape[0]), column]


def check_pm1(space, budget):
    """mu_x(0) = 0 within epsilon. The first sample of the first chunk is 0."""
    def chunk(rng, count, index):
        xs = budget.draw_vectors(rng, count, space.dim)
        if index == 0:
            xs[0] = 0.0
        values = space.evaluate(xs, 0.0)
        kept, violated = flagged(
            np.abs(values) > budget.epsilon,
            lambda i: Violation({'x': xs[i].tolist(), 't': 0.0}, float(values[i]), 0.0),
        )
        return kept, count, violated

    chunks = map_chunks(chunk, budget.rng_seed, 'pm1', budget.n_vectors)
    return CheckReport.from_chunks('pm1', budget.rng_seed, chunks)


def check_pm2(space, budget):
    """
    mu_0 is exactly 1 on the grid, and every sampled nonzero vector has some
    t > 0 with mu_x(t) < 1. Vectors are rescaled radially so that short ones
    are covered, and the search descends by decades below the grid.
    """
    grid = budget.grid
    zero = np.zeros((1, space.dim))
    zero_values = space.profile(zero, grid)[0]
    zero_kept, zero_violated = flagged(
        zero_values != 1.0,
        lambda i: Violation({'x': zero[0].tolist(), 't': float(grid[i])}, float(zero_values[i]), 1.0),
    )
    descent = grid[0] * 10.0 ** -np.arange(1, DESCENT_DECADES)

    def chunk(rng, count, index):
        xs = budget.draw_vectors(rng, count, space.dim)
        xs *= 10.0 ** rng.uniform(*RADIAL_DECADES, count)[:, None]
        saturated = np.all(space.profile(xs, grid) >= 1.0, axis=1)
        rows = np.flatnonzero(saturated)
        if rows.size:
            saturated[rows] = np.all(space.profile(xs[rows], descent) >= 1.0, axis=1)
        kept, violated = flagged(
            saturated,
            lambda i: Violation({'x': xs[i].tolist(), 'smallest_t': float(descent[-1])}, 1.0, 1.0),
        )
        return kept, count, violated

    chunks = [(zero_kept, 1, zero_violated)]
    chunks.extend(map_chunks(chunk, budget.rng_seed, 'pm2', budget.n_vectors))
    return CheckReport.from_chunks('pm2', budget.rng_seed, chunks)


def check_pm3(space, budget):
    """mu_{-x}(t) = mu_x(t) within epsilon on the grid."""
    grid = budget.grid

    def chunk(rng, count, index):
        xs = budget.draw_vectors(rng, count, space.dim)
        plus, minus = space.profile(xs, grid), space.profile(-xs, grid)
        column, gap = _worst(np.abs(plus - minus))
        kept, violated = flagged(
            gap > budget.epsilon,
            lambda i: Violation(
                {'x': xs[i].tolist(), 't': float(grid[column[i]])},
                float(minus[i, column[i]]), float(plus[i, column[i]]),
            ),
        )
        return kept, count, violated

    chunks = map_chunks(chunk, budget.rng_seed, 'pm3', budget.n_vectors)
    return CheckReport.from_chunks('pm3', budget.rng_seed, chunks)


def check_pm4(space, budget):
    """
    mu_{ax+by}(s+t) >= min(mu_x(s), mu_y(t)) - epsilon.

    s and t are drawn from {0} and the grid, and a share of the pairs use
    y = 0.
    """
    scales = budget.extended_grid

    def chunk(rng, count, index):
        xs = budget.draw_vectors(rng, count, space.dim)
        ys = budget.draw_vectors(rng, count, space.dim)
        ys[rng.random(count) < ZERO_PAIR_SHARE] = 0.0
        a = convex_weights(rng, count)
        s = scales[rng.integers(0, scales.size, count)]
        t = scales[rng.integers(0, scales.size, count)]
        zs = a[:, None] * xs + (1 - a)[:, None] * ys
        lhs = space.evaluate(zs, s + t)
        rhs = np.minimum(space.evaluate(xs, s), space.evaluate(ys, t))
        kept, violated = flagged(
            lhs < rhs - budget.epsilon,
            lambda i: Violation(
                {'x': xs[i].tolist(), 'y': ys[i].tolist(), 'a': float(a[i]), 'b': float(1 - a[i]),
                 's': float(s[i]), 't': float(t[i])},
                float(lhs[i]), float(rhs[i]),
            ),
        )
        return kept, count, violated

    chunks = map_chunks(chunk, budget.rng_seed, 'pm4', budget.n_scalar_pairs)
    return CheckReport.from_chunks('pm4', budget.rng_seed, chunks)


def check_axioms(space, budget):
    parts = (
        check_pm1(space, budget),
        check_pm2(space, budget),
        check_pm3(space, budget),
        check_pm4(space, budget),
    )
    details = {'per_axiom': {part.check: part.verdict.value for part in parts}}
    report = CheckReport.combine('axioms', parts, budget.rng_seed, details)
    logger.info(f"Axioms on {space.describe()}: {report.verdict} ({report.violation_count} violations)")
    return report


def _delta2_sweep(space, budget, candidates):
    """One report per candidate c, all computed on the same samples."""
    grid = budget.grid

    def chunk(rng, count, index):
        xs = budget.draw_vectors(rng, count, space.dim)
        lhs = space.profile(2 * xs, grid)
        results = []
        for c in candidates:
            rhs = space.profile(xs, grid / c)
            broken = lhs < rhs - budget.epsilon
            column = broken.argmax(axis=1)
            kept, violated = flagged(
                broken.any(axis=1),
                lambda i: Violation(
                    {'x': xs[i].tolist(), 't': float(grid[column[i]]), 'c': float(c)},
                    float(lhs[i, column[i]]), float(rhs[i, column[i]]),
                ),
            )
            results.append((kept, count, violated))
        return results

    chunks = map_chunks(chunk, budget.rng_seed, 'delta2', budget.n_vectors)
    return [
        CheckReport.from_chunks('delta2', budget.rng_seed, [chunk[j] for chunk in chunks], {'c': float(c)})
        for j, c in enumerate(candidates)
    ]


def check_delta2(space, budget, c=None):
    """mu_{2x}(t) >= mu_x(t/c) - epsilon for the given or the declared c."""
    c = space.declared_c if c is None else c
    if c is None:
        return CheckReport.precondition_failed('delta2', "No Delta_2 constant declared.", budget.rng_seed)
    if c <= 0:
        raise PreconditionViolation(f"A Delta_2 constant must be positive, got {c}.")
    return _delta2_sweep(space, budget, [float(c)])[0]


def find_delta2_constant(space, budget, candidates=None):
    """
    The smallest candidate c passing the sampled Delta_2 inequality, or
    None when no candidate passes.
    """
    candidates = sorted(float(c) for c in (candidates or default_delta2_candidates()))
    if not candidates or candidates[0] <= 0:
        raise PreconditionViolation("Delta_2 candidates must be a nonempty list of positive reals.")
    for c, report in zip(candidates, _delta2_sweep(space, budget, candidates)):
        if report.passed:
            logger.info(f"Delta_2 constant for {space.describe()}: {c:g}")
            return c
    logger.info(f"No Delta_2 candidate passed for {space.describe()}")
    return None


def check_beta_homogeneous(space, beta, budget):
    """|mu_{ax}(t) - mu_x(t/|a|^beta)| <= epsilon on sampled x, a and the grid."""
    if not 0 < beta <= 1:
        raise PreconditionViolation(f"The homogeneity exponent must lie in (0, 1], got {beta}.")
    grid = budget.grid

    def chunk(rng, count, index):
        xs = budget.draw_vectors(rng, count, space.dim)
        a = homogeneity_scalars(rng, count)
        lhs = space.profile(a[:, None] * xs, grid)
        rhs = space.evaluate(xs, grid[None, :] / (np.abs(a) ** beta)[:, None])
        column, gap = _worst(np.abs(lhs - rhs))
        kept, violated = flagged(
            gap > budget.epsilon,
            lambda i: Violation(
                {'x': xs[i].tolist(), 'a': float(a[i]), 't': float(grid[column[i]])},
                float(lhs[i, column[i]]), float(rhs[i, column[i]]),
            ),
        )
        return kept, count, violated

    chunks = map_chunks(chunk, budget.rng_seed, 'homogeneity', budget.n_scalar_pairs)
    return CheckReport.from_chunks('homogeneity', budget.rng_seed, chunks, {'beta': float(beta)})


def _function_samples(space, budget, name, vectors=None):
    """Sampled nonzero x and the distribution parameter of each mu_x."""
    if vectors is None:
        total = min(budget.n_vectors, FUNCTION_SAMPLE_CAP)
        batches = map_chunks(
            lambda rng, count, index: budget.draw_vectors(rng, count, space.dim),
            budget.rng_seed, name, total,
        )
        xs = np.concatenate(batches) if batches else np.empty((0, space.dim))
    else:
        xs = space.batch(vectors)
    xs = xs[np.any(xs != 0, axis=1)]
    return xs, space.parameters(xs)


def _kink_points(space, r, base):
    """
    ``base`` on every row followed by the kinks of mu_x: the step threshold
    and the origin where mu_x jumps there. Rows are sorted; an absent kink
    repeats the last base point.
    """
    modular_map = space.modular_map
    fill = base[-1]
    step = r if modular_map.family == Family.STEP_FROM else np.full_like(r, fill)
    jumps_at_origin = bool(modular_map.origin_mass) | ((modular_map.family == Family.RATIONAL_FROM) & (r == 0))
    origin = np.where(jumps_at_origin, 0.0, fill)
    points = np.concatenate([np.broadcast_to(base, (r.size, base.size)), step[:, None], origin[:, None]], axis=1)
    return np.sort(points, axis=1)


def _row_scales(r):
    return np.where(r > 0, r, 1.0)


def _clause(check, budget, xs, mask, build, samples):
    """One report over a (functions, points) mask; kept violations come from the first flagged point per row."""
    column = mask.argmax(axis=1)

    def violation(i):
        found = build(i, column[i])
        return Violation({'x': xs[i].tolist(), **found.inputs}, found.lhs, found.rhs)

    kept, _ = flagged(mask.any(axis=1), violation)
    return CheckReport(check=check, violations=tuple(kept), violation_count=int(mask.sum()), samples_run=samples,
                       seed=budget.rng_seed)


def _combine(name, budget, parts, failing, count, details=None):
    return CheckReport.combine(name, parts, budget.rng_seed, {
        'nonzero_samples': count,
        'vacuous': not count,
        'failing_functions': int(failing.sum()),
        **(details or {}),
    })


def check_upsilon_space(space, budget, vectors=None):
    """(Upsilon) on mu_x for sampled nonzero x; vacuous when no sample is nonzero."""
    xs, r = _function_samples(space, budget, 'upsilon', vectors)
    m = len(r)
    values_at = space.modular_map.values

    points = _kink_points(space, r, budget.grid)
    steps = np.asarray(sorted(budget.jump_steps, reverse=True), dtype=float)
    scales = np.where(points != 0, np.abs(points), _row_scales(r)[:, None])
    h = scales[:, :, None] * steps
    rr = r[:, None, None]
    centre = values_at(r[:, None], points)[:, :, None]
    jumps = np.maximum(np.abs(centre - values_at(rr, points[:, :, None] - h)),
                       np.abs(values_at(rr, points[:, :, None] + h) - centre))
    finest, coarsest = jumps[:, :, -1], jumps[:, :, 0]
    broken = (finest > budget.epsilon) & (finest >= JUMP_DECAY * coarsest)
    continuity = _clause('continuity', budget, xs, broken,
                         lambda i, j: Violation({'t': float(points[i, j])}, float(finest[i, j]), budget.epsilon), m)

    grid = budget.grid
    values = space.profile(xs, grid)
    inside = (values > budget.epsilon) & (values < 1 - budget.epsilon)
    pairs = inside[:, :-1] & inside[:, 1:]
    flat = pairs & ~(values[:, 1:] > values[:, :-1] + budget.epsilon_strict)
    strict = _clause('strictly_increasing', budget, xs, flat,
                     lambda i, j: Violation({'s': float(grid[j]), 't': float(grid[j + 1])},
                                            float(values[i, j + 1]), float(values[i, j])), m)

    failing = broken.any(axis=1) | flat.any(axis=1)
    report = _combine('upsilon', budget, (continuity, strict), failing, m,
                      {'strict_vacuous_functions': int((~pairs.any(axis=1)).sum())})
    if not m:
        logger.warning(f"(Upsilon) on {space.describe()} is vacuous: no nonzero samples")
    return report


def check_delta_membership_space(space, budget, vectors=None):
    """Monotonicity, range and both limits of mu_x for sampled nonzero x."""
    xs, r = _function_samples(space, budget, 'delta_membership', vectors)
    m = len(r)
    values_at = space.modular_map.values

    points = _kink_points(space, r, budget.evaluation_grid)
    values = values_at(r[:, None], points)
    drops = values[:, 1:] < values[:, :-1]
    monotone = _clause('monotone', budget, xs, drops, lambda i, j: Violation(
        {'s': float(points[i, j]), 't': float(points[i, j + 1])}, float(values[i, j]), float(values[i, j + 1])), m)
    outside = (values < 0) | (values > 1)
    in_range = _clause('range', budget, xs, outside, lambda i, j: Violation(
        {'t': float(points[i, j])}, float(values[i, j]), 0.0 if values[i, j] < 0 else 1.0), m)
    lowest = values[:, :1] > budget.epsilon
    infimum = _clause('infimum', budget, xs, lowest, lambda i, j: Violation(
        {'t': float(points[i, 0])}, float(values[i, 0]), budget.epsilon), m)

    decades = np.minimum(points[:, -1:] * 10.0 ** np.arange(DESCENT_DECADES + 1), SUPREMUM_LIMIT)
    upper = values_at(r[:, None], decades)
    short = ~np.any(upper >= 1 - budget.epsilon, axis=1)[:, None]
    supremum = _clause('supremum', budget, xs, short, lambda i, j: Violation(
        {'t': float(decades[i, -1])}, float(upper[i, -1]), 1 - budget.epsilon), m)

    failing = drops.any(axis=1) | outside.any(axis=1) | lowest[:, 0] | short[:, 0]
    return _combine('delta_membership', budget, (monotone, in_range, infimum, supremum), failing, m)


def check_left_continuity_space(space, budget, vectors=None):
    """Left continuity of sampled mu_x at their kinks and at the grid points."""
    xs, r = _function_samples(space, budget, 'left_continuity', vectors)
    values_at = space.modular_map.values
    points = _kink_points(space, r, budget.grid)
    step = min(budget.jump_steps)
    jumps = values_at(r[:, None], points) - values_at(r[:, None], points - step * points)
    broken = (points > 0) & (jumps > budget.epsilon)
    report = _clause('left_continuity', budget, xs, broken,
                     lambda i, j: Violation({'t': float(points[i, j])}, float(jumps[i, j]), budget.epsilon), len(r))
    return _combine('left_continuity', budget, (report,), broken.any(axis=1), len(r))
