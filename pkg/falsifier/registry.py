"""
The predicate registry: every sampled statement about a PM-space, run
against one instance.

Each predicate maps ``(space, budget)`` to a ``CheckReport``. Hypotheses a
space need not satisfy (an undeclared Delta_2 constant or exponent, a
failing (Upsilon)) come back as infeasible, so on a valid instance the only
outcomes are pass and infeasible. Witness predicates draw their inputs from
their own seeded stream and fold the evidence of every construction into one
report.
"""
import logging
from dataclasses import dataclass, field

from balls.geometry import Ball
from balls.identities import (
    is_balanced_sampled,
    is_convex_sampled,
    monotone_in_level,
    monotone_in_scale,
    scaling_identity,
    translate_identity,
)
from balls.sampling import sample_members
from balls.witnesses import lemma1_witness
from convergence.checks import convergence_report
from convergence.sequences import SequenceKind, SequenceSpec
from spaces.checks import (
    check_beta_homogeneous,
    check_delta2,
    check_delta_membership_space,
    check_left_continuity_space,
    check_pm1,
    check_pm2,
    check_pm3,
    check_pm4,
    check_upsilon_space,
)
from spaces.reports import CheckReport, Verdict, Violation
from topology.witnesses import (
    addition_continuity_witness,
    basis_intersection,
    homogeneous_separation_witness,
    local_base_containment,
    origin_base_intersection,
    refine_ball,
    scalar_continuity_witness,
    separation_witness,
    verified_beta,
    verified_delta2,
)
from utils.exceptions import InfeasibleConstruction, PreconditionViolation
from utils.workers import stream_rng

logger = logging.getLogger(__name__)

WITNESS_INPUTS = 3
LEMMA1_PAIRS = 50
IDENTITY_SAMPLES = 100
SCALE_DECADES = (-1.0, 1.0)
LEVEL_RANGE = (0.05, 0.95)


def _inputs(name, budget):
    return stream_rng(budget.rng_seed, f'registry:{name}')


def _random_ball(space, rng, center=None):
    center = rng.standard_normal(space.dim) if center is None else center
    return Ball(space, tuple(center), rng.uniform(*LEVEL_RANGE), 10 ** rng.uniform(*SCALE_DECADES))


def _evidence(check, budget, witnesses, details=None):
    return CheckReport.combine(check, [w.evidence for w in witnesses], budget.rng_seed,
                               {'witnesses': [w.as_dict() for w in witnesses], **(details or {})})


def _declared(check, value, what, budget):
    if value is None:
        return CheckReport.precondition_failed(check, f"no {what} declared", budget.rng_seed)
    return None


def delta2(space, budget):
    return _declared('delta2', space.declared_c, 'Delta_2 constant', budget) or check_delta2(space, budget)


def homogeneity(space, budget):
    return (_declared('homogeneity', space.declared_beta, 'homogeneity exponent', budget)
            or check_beta_homogeneous(space, space.declared_beta, budget))


def upsilon(space, budget):
    report = check_upsilon_space(space, budget)
    if report.passed:
        return report
    return CheckReport.precondition_failed(
        'upsilon', f"(Upsilon) does not hold: {report.details['failing_functions']} failing functions",
        budget.rng_seed, report.details,
    )


def lemma1(space, budget):
    """
    lemma1_witness on members at the boundary scale t = r of mu_{x-y}, and
    on interior members at t = 2r.
    """
    rng = _inputs('lemma1', budget)
    violations = []
    built = 0
    for _ in range(LEMMA1_PAIRS):
        x, y = rng.standard_normal((2, space.dim))
        r = float(space.parameters(x - y)[0])
        if not r > 0:
            continue
        for t in (r, 2 * r):
            ball = Ball(space, tuple(x), rng.uniform(*LEVEL_RANGE), t)
            if not ball.contains(y):
                continue
            t_star = lemma1_witness(ball, y)
            built += 1
            value = space.value(x - y, t_star)
            if not (0 < t_star < t and value > ball.threshold):
                violations.append(Violation({'x': x.tolist(), 'y': y.tolist(), 't_star': t_star}, value,
                                            ball.threshold))
    return CheckReport.collect('lemma1', budget.rng_seed, built, violations)


def ball_identities(space, budget):
    rng = _inputs('ball_identities', budget)
    x = rng.standard_normal(space.dim)
    alpha, t = rng.uniform(*LEVEL_RANGE), 10 ** rng.uniform(*SCALE_DECADES)
    parts = [
        translate_identity(space, x, alpha, t, budget, samples=IDENTITY_SAMPLES),
        monotone_in_scale(space, alpha, t, 2 * t, budget, samples=IDENTITY_SAMPLES),
        monotone_in_level(space, alpha / 2, alpha, t, budget, samples=IDENTITY_SAMPLES),
    ]
    if space.declared_beta is not None:
        parts.append(scaling_identity(space, space.declared_beta, alpha, t, budget, samples=IDENTITY_SAMPLES))
    return CheckReport.combine('ball_identities', parts, budget.rng_seed)


def balanced(space, budget):
    rng = _inputs('balanced', budget)
    ball = Ball.at_origin(space, rng.uniform(*LEVEL_RANGE), 10 ** rng.uniform(*SCALE_DECADES))
    verified_beta(space, budget)
    return is_balanced_sampled(ball, budget)


def convex(space, budget):
    """Convexity of balls at the origin; for beta < 1 it fails on root_power in the plane."""
    beta = verified_beta(space, budget)
    if beta != 1:
        raise PreconditionViolation(f"convexity of balls needs beta = 1, the space is {beta:g}-homogeneous")
    rng = _inputs('convex', budget)
    ball = Ball.at_origin(space, rng.uniform(*LEVEL_RANGE), 10 ** rng.uniform(*SCALE_DECADES))
    return is_convex_sampled(ball, budget)


def _member_to_refine(space, budget, outer, rng):
    """A member of ``outer``; inside the Delta_2 core B(x, alpha, t/c) when no exponent is verified."""
    region = outer
    try:
        verified_beta(space, budget)
    except PreconditionViolation:
        c = verified_delta2(space, budget)
        region = Ball(space, outer.center, outer.level, outer.scale / c)
    members = sample_members(region, rng, 1, budget.epsilon)
    if not len(members):
        raise InfeasibleConstruction('a member to refine at', f"none sampled from {region}")
    return members[0]


def refine(space, budget):
    rng = _inputs('refine', budget)
    witnesses = []
    for _ in range(WITNESS_INPUTS):
        outer = _random_ball(space, rng)
        witnesses.append(refine_ball(space, outer, _member_to_refine(space, budget, outer, rng), budget))
    return _evidence('refine', budget, witnesses)


def intersections(space, budget):
    rng = _inputs('intersections', budget)
    first = _random_ball(space, rng)
    y = _member_to_refine(space, budget, first, rng)
    second = _random_ball(space, rng, center=y + first.scale * 0.1 * rng.standard_normal(space.dim))
    core = Ball(space, second.center, second.level, second.scale / verified_delta2(space, budget))
    if not core.contains(y):
        second = Ball(space, tuple(y), second.level, second.scale)
    witnesses = [
        basis_intersection(space, first, second, y, budget),
        origin_base_intersection(
            Ball.at_origin(space, first.level, first.scale), Ball.at_origin(space, second.level, second.scale),
            budget,
        ),
        local_base_containment(space, first.center, first, budget),
    ]
    return _evidence('intersections', budget, witnesses)


def separation(space, budget):
    rng = _inputs('separation', budget)
    witnesses = [separation_witness(space, *rng.standard_normal((2, space.dim)), budget)
                 for _ in range(WITNESS_INPUTS)]
    return _evidence('separation', budget, witnesses)


def homogeneous_separation(space, budget):
    rng = _inputs('homogeneous_separation', budget)
    witnesses = [homogeneous_separation_witness(space, rng.standard_normal(space.dim), budget)
                 for _ in range(WITNESS_INPUTS)]
    return _evidence('homogeneous_separation', budget, witnesses)


def continuity(space, budget):
    rng = _inputs('continuity', budget)
    witnesses = []
    for _ in range(WITNESS_INPUTS):
        target = Ball.at_origin(space, rng.uniform(*LEVEL_RANGE), 10 ** rng.uniform(*SCALE_DECADES))
        witnesses.append(addition_continuity_witness(space, target, budget))
        witnesses.append(scalar_continuity_witness(space, target, float(rng.normal(scale=2.0)), budget))
    return _evidence('continuity', budget, witnesses)


def _far_direction(space, rng):
    """A direction whose distribution parameter is at least 1, so a constant offset is visible."""
    v = rng.standard_normal(space.dim)
    for _ in range(64):
        if space.parameters(v)[0] >= 1:
            break
        v = 2 * v
    return v


def convergence(space, budget):
    rng = _inputs('convergence', budget)
    x, v = rng.standard_normal(space.dim), _far_direction(space, rng)
    sequences = [
        SequenceSpec(SequenceKind.GEOMETRIC, x, v, q=0.5),
        SequenceSpec(SequenceKind.CONSTANT_OFFSET, x, v),
        SequenceSpec(SequenceKind.ALTERNATING, x, v),
    ]
    parts = [convergence_report(space, seq, budget) for seq in sequences]
    return CheckReport.combine('convergence', parts, budget.rng_seed)


PREDICATES = {
    'pm1': check_pm1,
    'pm2': check_pm2,
    'pm3': check_pm3,
    'pm4': check_pm4,
    'delta_membership': check_delta_membership_space,
    'left_continuity': check_left_continuity_space,
    'delta2': delta2,
    'homogeneity': homogeneity,
    'upsilon': upsilon,
    'lemma1': lemma1,
    'ball_identities': ball_identities,
    'balanced': balanced,
    'convex': convex,
    'refine': refine,
    'intersections': intersections,
    'separation': separation,
    'homogeneous_separation': homogeneous_separation,
    'continuity': continuity,
    'convergence': convergence,
}


def run_predicate(name, space, budget):
    """One predicate; contract failures become infeasible and crashes become failures."""
    try:
        return PREDICATES[name](space, budget)
    except (PreconditionViolation, InfeasibleConstruction) as exc:
        logger.warning(f"{name} infeasible on {space.describe()}: {exc}")
        return CheckReport.precondition_failed(name, str(exc), budget.rng_seed)
    except Exception as exc:
        logger.exception(f"{name} crashed on {space.describe()}")
        return CheckReport(
            check=name,
            violations=(Violation({'exception': type(exc).__name__, 'message': str(exc)}, 0.0, 0.0),),
            violation_count=1,
            seed=budget.rng_seed,
            details={'error': str(exc)},
        )


@dataclass(frozen=True)
class FalsifierRun:
    seed: int
    budget: object
    instance: object
    mutation: str | None = None
    results: dict = field(default_factory=dict)

    def failures(self):
        return [name for name, report in self.results.items() if report.verdict == Verdict.FAIL]

    def summary(self):
        return {name: report.verdict.value for name, report in self.results.items()}

    def as_report(self):
        """All predicates folded into one report; details map each predicate to its verdict."""
        report = CheckReport.combine('falsify', tuple(self.results.values()), self.seed, {
            'instance': self.instance.describe(),
            'mutation': self.mutation,
            'predicates': self.summary(),
        })
        return report


def run_registry(instance, budget, predicates=None, mutation=None):
    names = list(PREDICATES) if predicates is None else list(predicates)
    unknown = sorted(set(names) - set(PREDICATES))
    if unknown:
        raise ValueError(f"Unknown predicates: {', '.join(unknown)}")
    results = {name: run_predicate(name, instance, budget) for name in names}
    run = FalsifierRun(budget.rng_seed, budget, instance, mutation or instance.label or None, results)
    logger.info(f"Registry on {instance.describe()}: failures {run.failures()}")
    return run
