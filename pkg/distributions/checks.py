"""
Sampled checks on a single distribution function.

Every check returns a ``CheckReport``; a failing property is reported, never
raised. Check points come from the budget's evaluation grid, extended with
the kinks of the function.
"""
import logging

import numpy as np

from spaces.reports import CheckReport, Violation
from utils.exceptions import PreconditionViolation

logger = logging.getLogger(__name__)

SUPREMUM_LIMIT = 1e300
# a jump that shrinks by this factor between the coarsest and finest jump step is a steep slope
JUMP_DECAY = 1e-3


def check_points(f, budget):
    return np.union1d(budget.evaluation_grid, np.asarray(f.kinks(), dtype=float))


def _monotone_part(f, points, budget):
    values = f.evaluate(points)
    drops = np.flatnonzero(values[1:] < values[:-1])
    violations = [
        Violation({'s': float(points[i]), 't': float(points[i + 1])}, float(values[i]), float(values[i + 1]))
        for i in drops
    ]
    return CheckReport.collect('monotone', budget.rng_seed, max(len(points) - 1, 0), violations)


def _range_part(f, points, budget):
    values = f.evaluate(points)
    outside = np.flatnonzero((values < 0) | (values > 1))
    violations = [Violation({'t': float(points[i])}, float(values[i]), 0.0 if values[i] < 0 else 1.0) for i in outside]
    return CheckReport.collect('range', budget.rng_seed, len(points), violations)


def _infimum_part(f, points, budget):
    lowest = float(points[0])
    value = f.evaluate(lowest)
    violations = [] if value <= budget.epsilon else [Violation({'t': lowest}, value, budget.epsilon)]
    return CheckReport.collect('infimum', budget.rng_seed, 1, violations)


def _supremum_part(f, points, budget):
    t = float(points[-1])
    value = f.evaluate(t)
    evaluated = 1
    while value < 1 - budget.epsilon and t < SUPREMUM_LIMIT:
        t = min(t * 10, SUPREMUM_LIMIT)
        value = f.evaluate(t)
        evaluated += 1
    violations = [] if value >= 1 - budget.epsilon else [Violation({'t': t}, value, 1 - budget.epsilon)]
    return CheckReport.collect('supremum', budget.rng_seed, evaluated, violations, {'reached_t': t})


def check_delta_membership(f, budget):
    """Monotonicity on adjacent check points plus the limits at both ends."""
    points = check_points(f, budget)
    parts = (
        _monotone_part(f, points, budget),
        _range_part(f, points, budget),
        _infimum_part(f, points, budget),
        _supremum_part(f, points, budget),
    )
    report = CheckReport.combine('delta_membership', parts, budget.rng_seed, {'function': f.describe()})
    logger.debug(f"Delta membership of {f.describe()}: {report.verdict}")
    return report


def left_jumps(f, t, steps):
    t = float(t)
    h = np.asarray(steps, dtype=float) * t
    return f.evaluate(t) - f.evaluate(t - h)


def check_left_continuity(f, t, budget):
    if t <= 0:
        raise PreconditionViolation(f"Left continuity is checked at t > 0, got {t}.")
    steps = sorted(budget.jump_steps, reverse=True)
    jumps = left_jumps(f, t, steps)
    violations = []
    if jumps[-1] > budget.epsilon:
        violations.append(Violation({'t': float(t), 'delta': steps[-1]}, float(jumps[-1]), budget.epsilon))
    details = {'jumps': [float(jump) for jump in jumps]}
    return CheckReport.collect('left_continuity', budget.rng_seed, len(steps), violations, details)


def discontinuities(f, points, budget):
    """
    Points where the two-sided jump under the finest jump step exceeds
    epsilon and does not decay against the coarsest step.
    """
    points = np.asarray(points, dtype=float)
    steps = np.asarray(sorted(budget.jump_steps, reverse=True), dtype=float)
    scales = np.where(points != 0, np.abs(points), f.scale())
    h = scales[:, None] * steps[None, :]
    centre = f.evaluate(points)[:, None]
    jumps = np.maximum(np.abs(centre - f.evaluate(points[:, None] - h)), np.abs(f.evaluate(points[:, None] + h) - centre))
    finest, coarsest = jumps[:, -1], jumps[:, 0]
    broken = (finest > budget.epsilon) & (finest >= JUMP_DECAY * coarsest)
    return [(float(points[i]), float(finest[i])) for i in np.flatnonzero(broken)]


def check_upsilon(f, budget):
    """
    Continuity on the check points and strict increase on grid pairs whose
    values both lie inside (0, 1). The two clauses are reported as separate
    parts; a function whose values never leave {0, 1} on the grid passes
    the strictness clause vacuously and says so in its details.
    """
    points = np.union1d(budget.grid, np.asarray(f.kinks(), dtype=float))
    gaps = discontinuities(f, points, budget)
    continuity = CheckReport.collect(
        'continuity', budget.rng_seed, len(points),
        [Violation({'t': t}, jump, budget.epsilon) for t, jump in gaps],
    )

    grid = budget.grid
    values = f.evaluate(grid)
    inside = (values > budget.epsilon) & (values < 1 - budget.epsilon)
    pairs = np.flatnonzero(inside[:-1] & inside[1:])
    flat = [i for i in pairs if not values[i + 1] > values[i] + budget.epsilon_strict]
    strict = CheckReport.collect(
        'strictly_increasing', budget.rng_seed, len(pairs),
        [Violation({'s': float(grid[i]), 't': float(grid[i + 1])}, float(values[i + 1]), float(values[i])) for i in flat],
        {'strict_vacuous': len(pairs) == 0},
    )
    details = {'function': f.describe(), 'strict_vacuous': len(pairs) == 0}
    return CheckReport.combine('upsilon', (continuity, strict), budget.rng_seed, details)
