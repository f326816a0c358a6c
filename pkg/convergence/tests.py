import numpy as np
from django.test import SimpleTestCase, tag

from balls.geometry import Ball
from convergence.checks import (
    check_mu_convergence,
    check_topological_convergence,
    convergence_report,
    eventual_index,
    local_base,
    index_schedule,
)
from convergence.sequences import SequenceKind, SequenceSpec
from spaces.budget import SampleBudget
from spaces.instances import Family, PMSpace
from spaces.modulars import ClassicalModular
from spaces.reports import Verdict
from utils.exceptions import DimensionMismatch, PreconditionViolation

# small scales need N_max well beyond 1e6 for the harmonic gap t/(t + 1/n) to close below 1e-6
N_MAX = 10 ** 12


def line(family=Family.RATIONAL_FROM, modular=None, dim=1):
    return PMSpace.reference(family, modular or ClassicalModular.p_power(1), dim)


def sequence(kind, dim=1, v=1.0, q=None):
    return SequenceSpec(kind, (0.5,) * dim, (v,) * dim, q=q)


class SequenceSpecTests(SimpleTestCase):
    def test_terms(self):
        ns = np.array([1, 2, 4])
        np.testing.assert_allclose(sequence(SequenceKind.HARMONIC).terms(ns)[:, 0], [1.5, 1.0, 0.75])
        np.testing.assert_allclose(sequence(SequenceKind.ALTERNATING).terms(ns)[:, 0], [-0.5, 1.5, 1.5])
        np.testing.assert_allclose(sequence(SequenceKind.GEOMETRIC, q=0.5).terms(ns)[:, 0], [1.0, 0.75, 0.5625])
        np.testing.assert_allclose(sequence(SequenceKind.CONSTANT_OFFSET).terms(ns)[:, 0], [1.5, 1.5, 1.5])

    def test_candidate_limit_defaults_to_x(self):
        self.assertEqual(sequence(SequenceKind.HARMONIC, dim=2).candidate_limit, (0.5, 0.5))

    def test_invalid(self):
        with self.assertRaises(DimensionMismatch):
            SequenceSpec(SequenceKind.HARMONIC, (0.0,), (1.0, 1.0))
        with self.assertRaises(ValueError):
            SequenceSpec(SequenceKind.GEOMETRIC, (0.0,), (1.0,), q=1.0)


class IndexScheduleTests(SimpleTestCase):
    def test_schedule(self):
        self.assertEqual(index_schedule(10).tolist(), [1, 2, 4, 8, 10])
        self.assertEqual(index_schedule(1).tolist(), [1])
        with self.assertRaises(PreconditionViolation):
            index_schedule(0)

    def test_eventual_index(self):
        indices = index_schedule(16)
        self.assertEqual(eventual_index([False, True, False, True, True], indices), 8)
        self.assertEqual(eventual_index([True] * 5, indices), 1)
        self.assertIsNone(eventual_index([True, True, True, True, False], indices))


class MuConvergenceTests(SimpleTestCase):
    def test_harmonic_converges(self):
        verdict = check_mu_convergence(line(), sequence(SequenceKind.HARMONIC), n_max=N_MAX)
        self.assertTrue(verdict.converges)
        self.assertTrue(all(e.gap < 1e-6 for e in verdict.per_t_evidence))

    def test_harmonic_needs_large_n_at_small_scales(self):
        verdict = check_mu_convergence(line(), sequence(SequenceKind.HARMONIC), t_grid=[1e-3], n_max=10 ** 6)
        self.assertFalse(verdict.converges)
        self.assertTrue(check_mu_convergence(line(), sequence(SequenceKind.HARMONIC), t_grid=[10.0]).converges)

    def test_constant_offset_does_not_converge(self):
        verdict = check_mu_convergence(line(), sequence(SequenceKind.CONSTANT_OFFSET), n_max=N_MAX)
        self.assertFalse(verdict)
        self.assertTrue(all(e.n0 is None for e in verdict.per_t_evidence))

    def test_constant_sequence_at_the_limit(self):
        verdict = check_mu_convergence(line(), sequence(SequenceKind.CONSTANT_OFFSET, v=0.0))
        self.assertTrue(verdict.converges)
        self.assertTrue(all(e.n0 == 1 for e in verdict.per_t_evidence))

    def test_gap_is_non_increasing(self):
        indices = index_schedule(N_MAX)
        ts = SampleBudget.default().grid
        for seq in (sequence(SequenceKind.HARMONIC, dim=2), sequence(SequenceKind.GEOMETRIC, dim=2, q=0.7)):
            gaps = 1 - line(dim=2).profile(seq.offsets(indices), ts)
            self.assertTrue(np.all(np.diff(gaps, axis=0) <= 1e-15))

    def test_bad_scales(self):
        with self.assertRaises(PreconditionViolation):
            check_mu_convergence(line(), sequence(SequenceKind.HARMONIC), t_grid=[0.0, 1.0])


class TopologicalConvergenceTests(SimpleTestCase):
    def test_harmonic_enters_the_local_base(self):
        verdict = check_topological_convergence(line(), sequence(SequenceKind.HARMONIC), n_max=10 ** 5)
        self.assertTrue(verdict)
        self.assertEqual(len(verdict.per_ball_evidence), 9)

    def test_alternating_stays_away(self):
        self.assertFalse(check_topological_convergence(line(), sequence(SequenceKind.ALTERNATING)))

    def test_empty_ball_list_is_vacuous(self):
        verdict = check_topological_convergence(line(), sequence(SequenceKind.ALTERNATING), balls=[])
        self.assertTrue(verdict.converges)
        self.assertTrue(verdict.vacuous)

    def test_balls_must_sit_at_the_limit(self):
        with self.assertRaises(PreconditionViolation):
            check_topological_convergence(
                line(), sequence(SequenceKind.HARMONIC), balls=[Ball.at_origin(line(), 0.5, 1.0)],
            )

    def test_local_base_levels(self):
        balls = local_base(line(), (0.0,), 4)
        self.assertEqual([b.level for b in balls], [1 / 2, 1 / 3, 1 / 4])

    def test_report_agrees(self):
        budget = SampleBudget.default()
        report = convergence_report(line(), sequence(SequenceKind.HARMONIC), budget, n_max=N_MAX)
        self.assertTrue(report.passed)
        self.assertTrue(report.details['mu']['converges'])

    def test_short_index_budget_is_not_a_counterexample(self):
        report = convergence_report(line(), sequence(SequenceKind.HARMONIC), SampleBudget.default())
        self.assertEqual(report.verdict, Verdict.INFEASIBLE)
        self.assertEqual(report.violation_count, 0)
        self.assertIn('n_max', report.infeasible)
        self.assertTrue(report.details['topological']['converges'])
        unresolved = [e for e in report.details['mu']['per_t'] if e['n0'] is None]
        self.assertTrue(unresolved)
        self.assertTrue(all(e['shrinking'] for e in unresolved))

    def test_flat_gap_still_disagrees(self):
        verdict = check_mu_convergence(line(), sequence(SequenceKind.ALTERNATING), n_max=10 ** 6)
        self.assertFalse(verdict.out_of_resolution)
        self.assertFalse(any(e.shrinking for e in verdict.per_t_evidence))

    def test_default_report_on_a_divergent_sequence(self):
        report = convergence_report(line(), sequence(SequenceKind.CONSTANT_OFFSET), SampleBudget.default())
        self.assertEqual(report.verdict, Verdict.PASS)
        self.assertFalse(report.details['mu']['converges'])

    @tag('acceptance')
    def test_criteria_agree(self):
        budget = SampleBudget.default()
        expected = {
            SequenceKind.HARMONIC: True,
            SequenceKind.GEOMETRIC: True,
            SequenceKind.CONSTANT_OFFSET: False,
            SequenceKind.ALTERNATING: False,
        }
        for family in Family.values:
            for modular in (ClassicalModular.p_power(1), ClassicalModular.p_power(2)):
                for dim in (1, 2):
                    space = line(family, modular, dim)
                    for kind, converges in expected.items():
                        seq = sequence(kind, dim=dim, q=0.5 if kind == SequenceKind.GEOMETRIC else None)
                        report = convergence_report(space, seq, budget, n_max=N_MAX)
                        self.assertTrue(report.passed, (family, modular, dim, kind))
                        self.assertEqual(report.details['mu']['converges'], converges, (family, kind))
