"""
Dispatch of a validated run config to the library operations.

Every handler returns a list of ``(report, witness)`` pairs; the witness is
the dict of chosen parameters for witness operations and None elsewhere.
"""
import logging

import yaml
from rest_framework import serializers

from balls.geometry import Ball
from balls.identities import (
    is_balanced_sampled,
    is_convex_sampled,
    monotone_in_level,
    monotone_in_scale,
    scaling_identity,
    translate_identity,
)
from balls.witnesses import lemma1_witness
from convergence.checks import convergence_report, local_base
from distributions.checks import check_upsilon
from falsifier.registry import run_registry
from spaces.checks import (
    check_axioms,
    check_beta_homogeneous,
    check_delta2,
    check_upsilon_space,
    find_delta2_constant,
)
from spaces.modulars import check_modular
from spaces.reports import CheckReport
from spaces.serializers import build_budget
from topology.witnesses import (
    addition_continuity_witness,
    basis_intersection,
    homogeneous_separation_witness,
    refine_ball,
    scalar_continuity_witness,
    separation_witness,
)
from utils.exceptions import InfeasibleConstruction, PreconditionViolation
from .models import RunRecord
from .reports import build_record, exit_code, render_record
from .serializers import ConfigSerializer

logger = logging.getLogger(__name__)


def load_config(path):
    """A config mapping from a YAML (or JSON) file."""
    try:
        with open(path, encoding='utf-8') as handle:
            config = yaml.safe_load(handle)
    except OSError as exc:
        raise serializers.ValidationError({'config': [f"Cannot read {path}: {exc.strerror}"]})
    except yaml.YAMLError as exc:
        raise serializers.ValidationError({'config': [f"Cannot parse {path}: {exc}"]})
    if config is None:
        config = {}
    if not isinstance(config, dict):
        raise serializers.ValidationError({'config': ["The config must be a mapping."]})
    return config


def _guarded(check, budget, build):
    """Contract failures of a construction become an infeasible report."""
    try:
        return build()
    except (PreconditionViolation, InfeasibleConstruction) as exc:
        logger.warning(f"{check}: {exc}")
        return CheckReport.precondition_failed(check, str(exc), budget.rng_seed), None


def axioms(space, budget, params):
    results = [(check_axioms(space, budget), None)]
    if params['modular']:
        results.append((check_modular(space.modular_map.modular, space.dim, budget), None))
    return results


def delta2(space, budget, params):
    report = check_delta2(space, budget, params['c'])
    results = [(report, None)]
    if 'candidates' in params:
        c = find_delta2_constant(space, budget, params['candidates'])
        results.append((CheckReport(check='delta2_estimate', seed=budget.rng_seed, details={'c': c},
                                    infeasible=None if c is not None else "no candidate passed"), None))
    return results


def homogeneous(space, budget, params):
    beta = space.declared_beta if params['beta'] is None else params['beta']
    if beta is None:
        return [(CheckReport.precondition_failed('homogeneity', "no exponent given or declared", budget.rng_seed),
                 None)]
    return [(check_beta_homogeneous(space, beta, budget), None)]


def upsilon(space, budget, params):
    results = [(check_upsilon_space(space, budget), None)]
    if 'function' in params:
        results.append((check_upsilon(params['function']['function'], budget), None))
    return results


def identities(space, budget, params):
    ball = params['ball']
    alpha, t = ball.level, ball.scale
    reports = [
        translate_identity(space, ball.center, alpha, t, budget),
        monotone_in_scale(space, alpha, t, 2 * t, budget),
        monotone_in_level(space, alpha / 2, alpha, t, budget),
    ]
    if space.declared_beta is not None:
        origin = Ball.at_origin(space, alpha, t)
        reports += [
            scaling_identity(space, space.declared_beta, alpha, t, budget),
            is_balanced_sampled(origin, budget),
        ]
        if space.declared_beta == 1:
            reports.append(is_convex_sampled(origin, budget))
    results = [(report, None) for report in reports]
    if 'y' in params:
        def witness():
            t_star = lemma1_witness(ball, params['y'])
            report = CheckReport(check='lemma1', samples_run=1, seed=budget.rng_seed)
            return report, {'ball': ball.as_dict(), 'y': list(params['y']), 't_star': t_star}

        results.append(_guarded('lemma1', budget, witness))
    return results


def refine(space, budget, params):
    def witness():
        refinement = refine_ball(space, params['ball'], params['z'], budget)
        return refinement.evidence, refinement.as_dict()

    results = [_guarded('refine_ball', budget, witness)]
    if 'ball_2' in params:
        def intersection():
            found = basis_intersection(space, params['ball'], params['ball_2'], params['z'], budget)
            return found.evidence, found.as_dict()

        results.append(_guarded('basis_intersection', budget, intersection))
    return results


def separate(space, budget, params):
    def witness():
        if params['homogeneous']:
            found = homogeneous_separation_witness(space, params['x'], budget)
        else:
            found = separation_witness(space, params['x'], params['y'], budget)
        return found.evidence, found.as_dict()

    return [_guarded('separation', budget, witness)]


def continuity(space, budget, params):
    def addition():
        found = addition_continuity_witness(space, params['target'], budget)
        return found.evidence, found.as_dict()

    def scalar():
        found = scalar_continuity_witness(space, params['target'], params['lam'], budget)
        return found.evidence, found.as_dict()

    return [_guarded('addition_continuity', budget, addition), _guarded('scalar_continuity', budget, scalar)]


def convergence(space, budget, params):
    seq = params['sequence']['sequence']
    balls = None if params['k'] is None else local_base(space, seq.candidate_limit, params['k'])
    report = convergence_report(space, seq, budget, params['epsilon'], params['n_max'], balls)
    return [(report, None)]


def falsify(space, budget, params):
    run = run_registry(space, budget, params.get('predicates'), params.get('mutation'))
    return [(run.as_report(), None)]


HANDLERS = {
    'check-axioms': axioms,
    'check-delta2': delta2,
    'check-homogeneous': homogeneous,
    'check-upsilon': upsilon,
    'ball-identities': identities,
    'witness-refine': refine,
    'witness-separate': separate,
    'witness-continuity': continuity,
    'check-convergence': convergence,
    'falsify': falsify,
}


def validate_config(config):
    """Raises ``serializers.ValidationError`` for anything the config schema rejects."""
    serializer = ConfigSerializer(data=config)
    serializer.is_valid(raise_exception=True)
    return serializer.validated_data


def execute(config):
    """The report records of a validated config, in emission order."""
    budget = build_budget(config.get('budget', {}), config.get('seed'))
    operation = config['operation']
    logger.info(f"{operation} on {config['space'].describe()} with seed {budget.rng_seed}")
    results = HANDLERS[operation](config['space'], budget, config['params'])
    return [build_record(operation, report, budget, witness) for report, witness in results]


def run(config, stream, record=False):
    """
    Validate ``config``, run it, write the records to the binary ``stream``
    and return the exit code. Config errors propagate as ValidationError.
    """
    validated = validate_config(config)
    records = execute(validated)
    code = exit_code(records)
    for item in records:
        stream.write(render_record(item))
    if record:
        RunRecord.objects.bulk_create([
            RunRecord(operation=item['operation'], seed=item['seed'], verdict=item['verdict'], exit_code=code,
                      payload=item)
            for item in records
        ])
    return code
