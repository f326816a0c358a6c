"""
Finite surrogates for sequence convergence.

Indices are checked on the schedule 1, 2, 4, ... up to N_max, with N_max
itself appended. A property "eventually holds" when it holds on every
checked index from some n0 on; n0 is the first index of that suffix.
"""
import logging
from dataclasses import dataclass, field

import numpy as np
from django.conf import settings

from balls.geometry import Ball
from spaces.budget import SampleBudget
from spaces.reports import CheckReport, Violation
from utils.exceptions import PreconditionViolation

logger = logging.getLogger(__name__)

TREND_INDICES = 3


def index_schedule(n_max):
    if n_max < 1:
        raise PreconditionViolation(f"N_max must be at least 1, got {n_max}.")
    powers = [2 ** k for k in range(int(n_max).bit_length()) if 2 ** k <= n_max]
    return np.asarray(sorted(set(powers) | {int(n_max)}), dtype=float)


def eventual_index(holds, indices):
    """The first index of the longest all-true suffix, or None when the last index fails."""
    holds = np.asarray(holds, dtype=bool)
    if not holds.size or not holds[-1]:
        return None
    failing = np.flatnonzero(~holds)
    start = failing[-1] + 1 if failing.size else 0
    return int(indices[start])


@dataclass(frozen=True)
class ScaleEvidence:
    t: float
    n0: int | None
    gap: float
    # the gap still fell across the last indices
    shrinking: bool = False


@dataclass(frozen=True)
class ConvergenceVerdict:
    converges: bool
    per_t_evidence: tuple
    n_used: int

    def __bool__(self):
        return self.converges

    @property
    def out_of_resolution(self):
        """Every unresolved scale still has a shrinking gap at N_max."""
        unresolved = [e for e in self.per_t_evidence if e.n0 is None]
        return bool(unresolved) and all(e.shrinking for e in unresolved)

    def as_dict(self):
        return {
            'converges': self.converges,
            'n_used': self.n_used,
            'per_t': [{'t': e.t, 'n0': e.n0, 'gap': e.gap, 'shrinking': e.shrinking}
                      for e in self.per_t_evidence],
        }


@dataclass(frozen=True)
class TopologicalVerdict:
    converges: bool
    per_ball_evidence: tuple = field(default=())
    n_used: int = 0
    vacuous: bool = False

    def __bool__(self):
        return self.converges

    def as_dict(self):
        return {
            'converges': self.converges,
            'n_used': self.n_used,
            'vacuous': self.vacuous,
            'per_ball': [{'ball': ball.as_dict(), 'n0': n0} for ball, n0 in self.per_ball_evidence],
        }


def check_mu_convergence(space, seq, t_grid=None, epsilon=None, n_max=None):
    """mu_{x_n - x}(t) -> 1 at every grid scale, read off the index schedule."""
    config = settings.PM_TOPOLOGY
    epsilon = config['CONVERGENCE_EPSILON'] if epsilon is None else epsilon
    n_max = config['CONVERGENCE_N_MAX'] if n_max is None else n_max
    ts = np.asarray(SampleBudget.default().grid if t_grid is None else t_grid, dtype=float)
    if not ts.size or np.any(ts <= 0):
        raise PreconditionViolation("Convergence scales must be positive.")
    if seq.dim != space.dim:
        raise PreconditionViolation(f"Sequence of dimension {seq.dim} in a space of dimension {space.dim}.")
    indices = index_schedule(n_max)
    gaps = 1.0 - space.profile(seq.offsets(indices), ts)
    tail = gaps[-TREND_INDICES:]
    shrinking = (len(tail) == TREND_INDICES) & np.all(np.diff(tail, axis=0) < 0, axis=0)
    evidence = tuple(
        ScaleEvidence(float(t), eventual_index(gaps[:, j] < epsilon, indices), float(gaps[-1, j]), bool(shrinking[j]))
        for j, t in enumerate(ts)
    )
    converges = all(e.n0 is not None for e in evidence)
    logger.info(f"mu-convergence of {seq.kind} sequence: {converges}")
    return ConvergenceVerdict(converges, evidence, int(n_max))


def local_base(space, point, k_max=None):
    """B(x, 1/k, 1/k) for k = 2, ..., K; level 1 is not a ball level."""
    k_max = settings.PM_TOPOLOGY['LOCAL_BASE_K'] if k_max is None else k_max
    return [Ball(space, tuple(point), 1 / k, 1 / k) for k in range(2, int(k_max) + 1)]


def check_topological_convergence(space, seq, balls=None, n_max=None):
    """x_n eventually stays in every listed ball at the candidate limit."""
    n_max = settings.PM_TOPOLOGY['CONVERGENCE_N_MAX'] if n_max is None else n_max
    balls = local_base(space, seq.candidate_limit) if balls is None else list(balls)
    for ball in balls:
        if ball.center != seq.candidate_limit:
            raise PreconditionViolation(f"{ball} is not centred at the candidate limit.")
    if not balls:
        logger.warning("Topological convergence over an empty ball list holds vacuously")
        return TopologicalVerdict(True, (), int(n_max), vacuous=True)
    indices = index_schedule(n_max)
    terms = seq.terms(indices)
    evidence = tuple((ball, eventual_index(ball.contains_many(terms), indices)) for ball in balls)
    converges = all(n0 is not None for _, n0 in evidence)
    return TopologicalVerdict(converges, evidence, int(n_max))


def convergence_report(space, seq, budget, epsilon=None, n_max=None, balls=None):
    """
    Both criteria side by side; a disagreement between them is the violation
    this report counts. When the balls are entered but the mu-gaps are still
    shrinking at N_max, the index budget ran out first and the report is
    infeasible instead.
    """
    by_mu = check_mu_convergence(space, seq, budget.grid, epsilon, n_max)
    by_balls = check_topological_convergence(space, seq, balls, n_max)
    details = {'mu': by_mu.as_dict(), 'topological': by_balls.as_dict()}
    samples = len(by_mu.per_t_evidence) + len(by_balls.per_ball_evidence)
    if by_balls.converges and by_mu.out_of_resolution:
        reason = f"mu-gaps of {seq.kind} still shrinking at N_max = {by_mu.n_used}; raise n_max"
        logger.warning(f"Convergence criteria undecided: {reason}")
        return CheckReport(check='convergence', samples_run=samples, seed=budget.rng_seed, details=details,
                           infeasible=reason)
    violations = []
    if by_mu.converges != by_balls.converges:
        violations.append(Violation({'sequence': seq.describe()}, float(by_mu.converges), float(by_balls.converges)))
    return CheckReport.collect('convergence', budget.rng_seed, samples, violations, details)
