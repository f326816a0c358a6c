import io
import json
import os
import tempfile

import yaml
from django.core.management import CommandError, call_command
from django.test import SimpleTestCase, TestCase, tag
from jsonschema import ValidationError as SchemaError
from rest_framework import serializers

from runs.models import RunRecord
from runs.reports import (
    EXIT_CONFIG_ERROR,
    EXIT_INFEASIBLE,
    EXIT_OK,
    EXIT_VIOLATIONS,
    exit_code,
    parse_report,
    render_report,
    sanitize,
)
from runs.runner import execute, load_config, run, validate_config
from spaces.reports import Verdict

GRID = [0.25, 4.0, 5]


def instance(family='rational_from', kind='p_power', exponent=1.0, dim=1, declare=True, weights=()):
    return {
        'family': family,
        'modular': {'kind': kind, 'exponent': exponent, 'weights': list(weights)},
        'dim': dim,
        'declare_true_constants': declare,
    }


def config(operation, params=None, **overrides):
    values = {
        'operation': operation,
        'instance': instance(),
        'budget': {'n_vectors': 300, 'n_scalar_pairs': 300, 't_grid': GRID},
        'seed': 7,
        'params': params or {},
    }
    values.update(overrides)
    return values


def run_bytes(values):
    stream = io.BytesIO()
    code = run(values, stream)
    return code, stream.getvalue()


class ConfigTests(SimpleTestCase):
    def test_unknown_field_is_rejected(self):
        with self.assertRaises(serializers.ValidationError):
            validate_config(config('check-axioms', colour='blue'))

    def test_unknown_param_is_rejected(self):
        with self.assertRaises(serializers.ValidationError):
            validate_config(config('check-upsilon', {'c': 2}))

    def test_negative_dimension_is_rejected(self):
        values = config('check-axioms')
        values['instance']['dim'] = -1
        with self.assertRaises(serializers.ValidationError) as caught:
            validate_config(values)
        self.assertIn('instance', caught.exception.detail)

    def test_missing_instance(self):
        values = config('check-axioms')
        del values['instance']
        with self.assertRaises(serializers.ValidationError):
            validate_config(values)

    def test_falsify_can_generate_its_instance(self):
        validated = validate_config({
            'operation': 'falsify',
            'params': {'generate': {'seed': 3, 'family': 'step_from'}, 'mutation': 'break_pm3'},
        })
        self.assertEqual(validated['space'].label, 'break_pm3')

    def test_ball_is_built_on_the_instance(self):
        validated = validate_config(config('witness-refine', {'ball': {'level': 0.5, 'scale': 1.0}, 'z': [0.2]}))
        ball = validated['params']['ball']
        self.assertEqual(ball.center, (0.0,))
        self.assertIs(ball.space, validated['space'])

    def test_ball_level_is_validated(self):
        with self.assertRaises(serializers.ValidationError):
            validate_config(config('witness-refine', {'ball': {'level': 1.5, 'scale': 1.0}, 'z': [0.2]}))

    def test_separation_of_two_points_needs_y(self):
        with self.assertRaises(serializers.ValidationError):
            validate_config(config('witness-separate', {'x': [0.0]}))

    def test_vectors_must_match_the_dimension(self):
        plane = instance(dim=2)
        cases = [
            ('witness-separate', {'x': [0.0, 0.0, 0.0], 'y': [1.0, 1.0]}, 'x'),
            ('witness-refine', {'ball': {'level': 0.5, 'scale': 1.0}, 'z': [0.2]}, 'z'),
            ('ball-identities', {'ball': {'level': 0.5, 'scale': 1.0}, 'y': [0.1]}, 'y'),
            ('check-convergence', {'sequence': {'kind': 'harmonic', 'x': [0.0], 'v': [1.0]}}, 'sequence'),
        ]
        for operation, params, field in cases:
            with self.assertRaises(serializers.ValidationError, msg=operation) as caught:
                validate_config(config(operation, params, instance=plane))
            self.assertIn(field, caught.exception.detail['params'])

    def test_ball_center_must_match_the_dimension(self):
        with self.assertRaises(serializers.ValidationError):
            validate_config(config('witness-continuity', {'target': {'center': [0.0], 'level': 0.5, 'scale': 1.0}},
                                   instance=instance(dim=2)))

    def test_yaml_config(self):
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, 'run.yaml')
            with open(path, 'w', encoding='utf-8') as handle:
                yaml.safe_dump(config('check-axioms'), handle)
            self.assertEqual(load_config(path)['instance']['dim'], 1)

    def test_unreadable_config(self):
        with self.assertRaises(serializers.ValidationError):
            load_config('/nonexistent/run.yaml')

    def test_config_must_be_a_mapping(self):
        with tempfile.NamedTemporaryFile('w', suffix='.yaml', delete=False) as handle:
            handle.write('- 1\n- 2\n')
        try:
            with self.assertRaises(serializers.ValidationError):
                load_config(handle.name)
        finally:
            os.unlink(handle.name)


class ReportTests(SimpleTestCase):
    def test_exit_code_precedence(self):
        passed, failed, infeasible = ({'verdict': verdict} for verdict in ('pass', 'fail', 'infeasible'))
        self.assertEqual(exit_code([passed]), EXIT_OK)
        self.assertEqual(exit_code([passed, infeasible]), EXIT_INFEASIBLE)
        self.assertEqual(exit_code([infeasible, failed, passed]), EXIT_VIOLATIONS)
        self.assertEqual(exit_code([]), EXIT_OK)

    def test_sanitize(self):
        self.assertEqual(
            sanitize({'a': (1.0, float('inf')), 'b': float('-inf'), 'c': float('nan')}),
            {'a': [1.0, 'inf'], 'b': '-inf', 'c': 'nan'},
        )

    def test_records_validate(self):
        code, content = run_bytes(config('check-axioms'))
        self.assertEqual(code, EXIT_OK)
        records = parse_report(content)
        self.assertEqual(len(records), 1)
        self.assertEqual(records[0]['check'], 'axioms')
        self.assertEqual(records[0]['seed'], 7)
        self.assertEqual([part['check'] for part in records[0]['parts']], ['pm1', 'pm2', 'pm3', 'pm4'])

    def test_round_trip_is_byte_identical(self):
        _, content = run_bytes(config('witness-separate', {'x': [0.0], 'y': [1.0]}))
        self.assertEqual(render_report(parse_report(content)), content)

    def test_invalid_record_is_rejected(self):
        with self.assertRaises(SchemaError):
            parse_report(json.dumps({'check': 'axioms'}) + '\n')

    def test_reproducible(self):
        values = config('falsify', {'mutation': 'break_pm3', 'predicates': ['pm3', 'separation']})
        self.assertEqual(run_bytes(values), run_bytes(values))

    def test_seed_changes_the_samples(self):
        values = config('check-axioms')
        first = parse_report(run_bytes(values)[1])[0]
        second = parse_report(run_bytes(values | {'seed': 8})[1])[0]
        self.assertEqual(first['verdict'], second['verdict'])
        self.assertNotEqual(first['seed'], second['seed'])


class OperationTests(SimpleTestCase):
    def records(self, operation, params=None, **overrides):
        return execute(validate_config(config(operation, params, **overrides)))

    def test_axioms_fail_on_a_mutated_instance(self):
        code, content = run_bytes(config('falsify', {'mutation': 'break_pm3', 'predicates': ['pm3']}))
        self.assertEqual(code, EXIT_VIOLATIONS)
        record = parse_report(content)[0]
        self.assertEqual(record['details']['mutation'], 'break_pm3')
        self.assertEqual(record['details']['predicates'], {'pm3': 'fail'})
        self.assertGreater(len(record['parts'][0]['violations']), 0)

    def test_delta2_with_candidates(self):
        records = self.records('check-delta2', {'c': 2.0, 'candidates': [1.0, 2.0, 4.0]},
                               instance=instance(exponent=2.0))
        self.assertEqual([r['check'] for r in records], ['delta2', 'delta2_estimate'])
        self.assertEqual(records[0]['verdict'], Verdict.FAIL)
        self.assertEqual(records[1]['details'], {'c': 4.0})

    def test_homogeneity_without_exponent_is_infeasible(self):
        records = self.records('check-homogeneous', instance=instance(declare=False))
        self.assertEqual(records[0]['verdict'], Verdict.INFEASIBLE)
        self.assertEqual(exit_code(records), EXIT_INFEASIBLE)

    def test_homogeneity(self):
        records = self.records('check-homogeneous', instance=instance(exponent=0.5, kind='root_power'))
        self.assertEqual(records[0]['verdict'], Verdict.PASS)

    def test_upsilon_on_the_step_family(self):
        records = self.records('check-upsilon', instance=instance(family='step_from', kind='weighted_abs', weights=[1.0]))
        self.assertEqual(records[0]['check'], 'upsilon')

    def test_upsilon_of_a_single_function(self):
        records = self.records('check-upsilon', {'function': {'kind': 'step', 'parameter': 1.0}})
        self.assertEqual([r['check'] for r in records], ['upsilon', 'upsilon'])
        self.assertEqual(records[0]['verdict'], Verdict.PASS)
        self.assertEqual(records[1]['verdict'], Verdict.FAIL)

    def test_function_params_are_validated(self):
        with self.assertRaises(serializers.ValidationError) as caught:
            validate_config(config('check-upsilon', {'function': {'kind': 'piecewise_linear'}}))
        self.assertIn('params', caught.exception.detail)

    def test_axioms_with_the_modular(self):
        records = self.records('check-axioms', {'modular': True}, instance=instance(kind='root_power', exponent=0.5))
        self.assertEqual([r['check'] for r in records], ['axioms', 'modular'])
        self.assertTrue(all(r['verdict'] == Verdict.PASS for r in records))
        self.assertEqual(records[1]['details']['modular'], 'root_power(0.5)')

    def test_ball_identities(self):
        records = self.records('ball-identities', {'ball': {'center': [1.0], 'level': 0.5, 'scale': 1.0},
                                                   'y': [1.5]})
        checks = [r['check'] for r in records]
        self.assertEqual(checks[-1], 'lemma1')
        self.assertIn('convex', checks)
        self.assertTrue(all(r['verdict'] == Verdict.PASS for r in records))
        self.assertAlmostEqual(records[-1]['witness']['t_star'], 0.75, places=9)

    def test_refine_witness(self):
        records = self.records('witness-refine', {'ball': {'level': 0.5, 'scale': 1.0}, 'z': [0.2],
                                                  'ball_2': {'center': [0.4], 'level': 0.5, 'scale': 1.0}})
        refine, intersection = records
        self.assertEqual(refine['witness']['chain'], 'delta2')
        self.assertAlmostEqual(refine['witness']['t_star'], 0.7, places=9)
        self.assertEqual(refine['verdict'], Verdict.PASS)
        self.assertEqual(len(intersection['witness']['refinements']), 2)

    def test_refine_outside_the_ball_is_infeasible(self):
        records = self.records('witness-refine', {'ball': {'level': 0.5, 'scale': 1.0}, 'z': [1.0]})
        self.assertEqual(records[0]['verdict'], Verdict.INFEASIBLE)
        self.assertIsNone(records[0]['witness'])

    def test_separation_witness(self):
        record = self.records('witness-separate', {'x': [0.0], 'y': [1.0]})[0]
        self.assertEqual(record['verdict'], Verdict.PASS)
        self.assertEqual(set(record['witness']), {'ball_x', 'ball_y', 't0', 'alpha_1'})

    def test_equal_points_cannot_be_separated(self):
        record = self.records('witness-separate', {'x': [1.0], 'y': [1.0]})[0]
        self.assertEqual(record['verdict'], Verdict.INFEASIBLE)

    def test_continuity_witnesses(self):
        records = self.records('witness-continuity', {'target': {'level': 0.5, 'scale': 1.0}, 'lam': 2.0})
        self.assertEqual([r['witness']['kind'] for r in records], ['addition', 'scalar'])
        self.assertTrue(all(r['verdict'] == Verdict.PASS for r in records))

    def test_convergence(self):
        record = self.records('check-convergence', {
            'sequence': {'kind': 'geometric', 'x': [0.0], 'v': [1.0], 'q': 0.5},
            'n_max': 4096,
            'k': 4,
        })[0]
        self.assertEqual(record['verdict'], Verdict.PASS)

    def test_harmonic_sequence_at_default_settings(self):
        values = config('check-convergence', {'sequence': {'kind': 'harmonic', 'x': [0.0], 'v': [1.0]}})
        del values['budget']
        code, content = run_bytes(values)
        record = parse_report(content)[0]
        self.assertEqual(code, EXIT_INFEASIBLE)
        self.assertEqual(record['verdict'], Verdict.INFEASIBLE)
        self.assertEqual(record['violation_count'], 0)

    def test_falsify_valid_instance(self):
        record = self.records('falsify', {'predicates': ['pm1', 'pm2', 'refine']})[0]
        self.assertEqual(record['verdict'], Verdict.PASS)
        self.assertIsNone(record['details']['mutation'])


class RecordTests(TestCase):
    def test_records_are_stored_on_request(self):
        stream = io.BytesIO()
        code = run(config('witness-continuity', {'target': {'level': 0.5, 'scale': 1.0}}), stream, record=True)
        self.assertEqual(RunRecord.objects.count(), 2)
        stored = {item.payload['check']: item for item in RunRecord.objects.all()}
        self.assertEqual(set(stored), {'addition_continuity', 'scalar_continuity'})
        addition = stored['addition_continuity']
        self.assertEqual((addition.operation, addition.seed, addition.exit_code), ('witness-continuity', 7, code))

    def test_nothing_is_stored_by_default(self):
        run_bytes(config('check-axioms'))
        self.assertFalse(RunRecord.objects.exists())


class CommandTests(TestCase):
    def setUp(self):
        self.directory = tempfile.TemporaryDirectory()
        self.addCleanup(self.directory.cleanup)

    def write_config(self, values):
        path = os.path.join(self.directory.name, 'run.yaml')
        with open(path, 'w', encoding='utf-8') as handle:
            yaml.safe_dump(values, handle)
        return path

    def call(self, *args):
        out = io.StringIO()
        call_command('pmtopology', *args, stdout=out, stderr=io.StringIO())
        return out.getvalue()

    def test_valid_instance_exits_cleanly(self):
        path = self.write_config(config('check-axioms'))
        records = parse_report(self.call('check-axioms', '--config', path))
        self.assertEqual(records[0]['verdict'], Verdict.PASS)

    def test_flags_override_the_config(self):
        path = self.write_config(config('check-axioms'))
        output = self.call('check-axioms', '--config', path, '--seed', '11', '--samples', '200',
                           '--t-grid', '0.5,2,3', '--epsilon', '1e-8')
        budget = parse_report(output)[0]['budget']
        self.assertEqual(budget, {'n_vectors': 200, 'n_scalar_pairs': 200, 't_grid': [0.5, 2.0, 3],
                                  'epsilon': 1e-8, 'seed': 11})

    def test_violations_exit_with_one(self):
        path = self.write_config(config('falsify', {'mutation': 'break_pm3', 'predicates': ['pm3']}))
        with self.assertRaises(CommandError) as caught:
            self.call('falsify', '--config', path)
        self.assertEqual(caught.exception.returncode, EXIT_VIOLATIONS)

    def test_infeasible_exits_with_two(self):
        values = config('check-homogeneous')
        values['instance'] = instance(declare=False)
        path = self.write_config(values)
        with self.assertRaises(CommandError) as caught:
            self.call('check-homogeneous', '--config', path)
        self.assertEqual(caught.exception.returncode, EXIT_INFEASIBLE)

    def test_invalid_config_exits_with_three(self):
        values = config('check-axioms')
        values['instance']['dim'] = -1
        path = self.write_config(values)
        with self.assertRaises(CommandError) as caught:
            self.call('check-axioms', '--config', path)
        self.assertEqual(caught.exception.returncode, EXIT_CONFIG_ERROR)

    def test_operation_must_match_the_config(self):
        path = self.write_config(config('check-axioms'))
        with self.assertRaises(CommandError) as caught:
            self.call('check-upsilon', '--config', path)
        self.assertEqual(caught.exception.returncode, EXIT_CONFIG_ERROR)

    def test_wrong_dimension_exits_with_three(self):
        path = self.write_config(config('witness-separate', {'x': [0.0, 0.0, 0.0], 'y': [1.0, 1.0]},
                                        instance=instance(dim=2)))
        with self.assertRaises(CommandError) as caught:
            self.call('witness-separate', '--config', path)
        self.assertEqual(caught.exception.returncode, EXIT_CONFIG_ERROR)

    def test_malformed_flags_exit_with_three(self):
        path = self.write_config(config('check-axioms'))
        for flags in (['--t-grid', '1,2'], ['--t-grid', 'a,b,c'], ['--seed', 'abc'], ['--samples', '0'],
                      ['--epsilon', '-1']):
            with self.assertRaises(CommandError, msg=flags) as caught:
                self.call('check-axioms', '--config', path, *flags)
            self.assertEqual(caught.exception.returncode, EXIT_CONFIG_ERROR, flags)

    def test_unknown_operation_exits_with_three(self):
        with self.assertRaises(CommandError) as caught:
            self.call('check-everything')
        self.assertEqual(caught.exception.returncode, EXIT_CONFIG_ERROR)

    def test_out_file(self):
        path = self.write_config(config('check-upsilon'))
        out = os.path.join(self.directory.name, 'report.ndjson')
        self.assertEqual(self.call('check-upsilon', '--config', path, '--out', out), '')
        with open(out, 'rb') as handle:
            records = parse_report(handle.read())
        self.assertEqual(records[0]['check'], 'upsilon')

    def test_record_flag(self):
        path = self.write_config(config('check-axioms'))
        self.call('check-axioms', '--config', path, '--record')
        self.assertEqual(RunRecord.objects.get().verdict, Verdict.PASS)

    @tag('acceptance')
    def test_default_budget_report_is_reproducible(self):
        values = config('check-axioms')
        del values['budget']
        path = self.write_config(values)
        self.assertEqual(self.call('check-axioms', '--config', path), self.call('check-axioms', '--config', path))
