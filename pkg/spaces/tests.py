import numpy as np
from django.test import SimpleTestCase, tag
from hypothesis import given, settings
from hypothesis import strategies as st

from distributions.checks import check_delta_membership, check_left_continuity, check_upsilon
from distributions.functions import Kind
from spaces.budget import SampleBudget, log_grid
from spaces.checks import (
    check_axioms,
    check_beta_homogeneous,
    check_delta2,
    check_delta_membership_space,
    check_left_continuity_space,
    check_upsilon_space,
    default_delta2_candidates,
    find_delta2_constant,
)
from spaces.instances import Family, ModularMap, PMSpace
from spaces.modulars import ClassicalModular, check_modular
from spaces.reports import CheckReport, Verdict, Violation
from spaces.serializers import BudgetSerializer, CheckReportSerializer, InstanceSerializer
from utils.exceptions import DimensionMismatch, PreconditionViolation


def rational_space(modular, dim=1):
    return PMSpace.reference(Family.RATIONAL_FROM, modular, dim)


def step_space(modular, dim=1):
    return PMSpace.reference(Family.STEP_FROM, modular, dim)


def small_budget(**overrides):
    values = {'n_vectors': 1000, 'n_scalar_pairs': 1000}
    values.update(overrides)
    return SampleBudget.default(**values)


def brute_force_pm4(space, seed, pairs=300):
    """Plain loop over the PM4 inequality, independent of the vectorized checker."""
    rng = np.random.default_rng(seed)
    grid = [0.0] + list(SampleBudget.default().t_grid[::8])
    failures = 0
    for _ in range(pairs):
        x = rng.standard_normal(space.dim)
        y = rng.standard_normal(space.dim)
        a = rng.random()
        for s in grid:
            for t in grid:
                lhs = space.mu(a * x + (1 - a) * y)(s + t)
                rhs = min(space.mu(x)(s), space.mu(y)(t))
                if lhs < rhs - 1e-9:
                    failures += 1
    return failures


class ModularTests(SimpleTestCase):
    def test_values(self):
        self.assertEqual(ClassicalModular.p_power(2).value([1.0, -2.0]), 5.0)
        self.assertEqual(ClassicalModular.weighted_abs([2.0, 1.0]).value([1.0, -2.0]), 4.0)
        self.assertEqual(ClassicalModular.root_power(0.5).value([4.0]), 2.0)

    def test_constants(self):
        self.assertEqual(ClassicalModular.p_power(2).delta2_constant(), 4.0)
        self.assertIsNone(ClassicalModular.p_power(2).homogeneity_exponent())
        self.assertEqual(ClassicalModular.root_power(0.5).homogeneity_exponent(), 0.5)

    def test_invalid_parameters(self):
        with self.assertRaises(ValueError):
            ClassicalModular.p_power(0.5)
        with self.assertRaises(ValueError):
            ClassicalModular.weighted_abs([1.0, 0.0])

    def test_weight_count_must_match(self):
        with self.assertRaises(DimensionMismatch):
            ClassicalModular.weighted_abs([1.0, 2.0]).value([1.0, 2.0, 3.0])

    def test_sampled_modular_axioms(self):
        budget = small_budget()
        for modular in (ClassicalModular.p_power(1), ClassicalModular.p_power(2), ClassicalModular.root_power(0.5)):
            self.assertTrue(check_modular(modular, 3, budget).passed, modular)


class MuTests(SimpleTestCase):
    def test_rational_example(self):
        mu = rational_space(ClassicalModular.p_power(1)).mu([1.0])
        self.assertEqual(mu.kind, Kind.RATIONAL)
        self.assertEqual(mu(1.0), 0.5)

    def test_zero_vector_is_one_on_positive_t(self):
        for space in (rational_space(ClassicalModular.p_power(2), 3), step_space(ClassicalModular.p_power(1), 3)):
            mu = space.mu([0.0, 0.0, 0.0])
            self.assertTrue(np.all(mu.evaluate(np.array([1e-9, 1.0, 1e9])) == 1.0))

    def test_step_example(self):
        self.assertEqual(step_space(ClassicalModular.p_power(1)).mu([2.0])(3.0), 1.0)

    def test_dimension_mismatch(self):
        with self.assertRaises(DimensionMismatch):
            rational_space(ClassicalModular.p_power(1), 2).mu([1.0])

    def test_batch_agrees_with_single_vectors(self):
        space = rational_space(ClassicalModular.p_power(2), 2)
        xs = np.array([[1.0, 0.0], [0.5, -0.5], [0.0, 0.0]])
        values = space.evaluate(xs, 2.0)
        for x, value in zip(xs, values):
            self.assertEqual(space.mu(x)(2.0), value)

    @given(st.floats(min_value=1e-3, max_value=1e2), st.floats(min_value=1e-3, max_value=1e3),
           st.floats(min_value=0.01, max_value=0.99))
    @settings(deadline=None)
    def test_membership_closed_forms(self, rho, t, alpha):
        rational = rational_space(ClassicalModular.p_power(1)).mu([rho])(t)
        step = step_space(ClassicalModular.p_power(1)).mu([rho])(t)
        radius = t * alpha / (1 - alpha)
        if abs(rho - radius) > 1e-9 * max(1.0, radius):
            self.assertEqual(rational > 1 - alpha, rho < radius)
        if abs(rho - t) > 1e-12 * t:
            self.assertEqual(step > 1 - alpha, t > rho)


class AxiomTests(SimpleTestCase):
    def test_reference_families_pass(self):
        budget = small_budget()
        for space in (
            rational_space(ClassicalModular.p_power(2), 2),
            rational_space(ClassicalModular.root_power(0.5), 3),
            step_space(ClassicalModular.weighted_abs([1.0])),
        ):
            report = check_axioms(space, budget)
            self.assertTrue(report.passed, report.violations[:3])
            self.assertEqual(set(report.details['per_axiom']), {'pm1', 'pm2', 'pm3', 'pm4'})

    def test_brute_force_agrees_with_the_checker(self):
        space = rational_space(ClassicalModular.p_power(2), 2)
        self.assertEqual(brute_force_pm4(space, seed=7), 0)
        self.assertTrue(check_axioms(space, small_budget()).part('pm4').passed)

    def test_asymmetric_map_fails_pm3_only(self):
        modular_map = ModularMap(Family.RATIONAL_FROM, ClassicalModular.p_power(1), negative_stretch=2.0)
        space = PMSpace(dim=1, modular_map=modular_map)
        self.assertEqual(space.mu([-1.0])(1.0), 1 / 3)
        report = check_axioms(space, small_budget())
        self.assertEqual(report.details['per_axiom'], {'pm1': 'pass', 'pm2': 'pass', 'pm3': 'fail', 'pm4': 'pass'})

    def test_reports_are_reproducible(self):
        space = PMSpace(dim=2, modular_map=ModularMap(Family.RATIONAL_FROM, ClassicalModular.p_power(1), reciprocal=True))
        first = check_axioms(space, small_budget(rng_seed=3))
        second = check_axioms(space, small_budget(rng_seed=3))
        self.assertEqual(first, second)
        self.assertFalse(first.part('pm4').passed)

    @tag('acceptance')
    def test_axiom_suite_at_full_budget(self):
        budget = SampleBudget.default()
        for dim in (1, 2, 4):
            for space in (
                rational_space(ClassicalModular.p_power(1), dim),
                rational_space(ClassicalModular.p_power(2), dim),
                step_space(ClassicalModular.weighted_abs([1.0]), dim),
            ):
                self.assertTrue(check_axioms(space, budget).passed, space.describe())


class Delta2Tests(SimpleTestCase):
    def setUp(self):
        self.budget = small_budget()

    def test_rational_p1(self):
        space = rational_space(ClassicalModular.p_power(1))
        self.assertEqual(find_delta2_constant(space, self.budget, [1, 1.5, 2, 4]), 2)

    def test_step_p1(self):
        space = step_space(ClassicalModular.p_power(1))
        self.assertEqual(find_delta2_constant(space, self.budget, [1, 2, 4]), 2)

    def test_rational_p2(self):
        space = rational_space(ClassicalModular.p_power(2), 2)
        self.assertEqual(find_delta2_constant(space, self.budget, [2, 4, 8]), 4)

    def test_default_candidates(self):
        self.assertEqual(default_delta2_candidates()[0], 1.0)
        self.assertEqual(default_delta2_candidates()[-1], 16.0)
        space = rational_space(ClassicalModular.p_power(2), 2)
        self.assertEqual(find_delta2_constant(space, SampleBudget.default()), 4.0)

    def test_larger_candidates_also_pass(self):
        space = rational_space(ClassicalModular.p_power(1), 2)
        for c in (2.0, 2.5, 8.0):
            self.assertTrue(check_delta2(space, self.budget, c).passed)

    def test_declared_constant_is_used(self):
        space = rational_space(ClassicalModular.p_power(1))
        self.assertTrue(check_delta2(space, self.budget).passed)
        undeclared = PMSpace.reference(Family.RATIONAL_FROM, ClassicalModular.p_power(1), 1, declare=False)
        self.assertEqual(check_delta2(undeclared, self.budget).verdict, Verdict.INFEASIBLE)

    def test_candidates_must_be_positive(self):
        with self.assertRaises(PreconditionViolation):
            find_delta2_constant(rational_space(ClassicalModular.p_power(1)), self.budget, [-1, 2])


class HomogeneityTests(SimpleTestCase):
    def setUp(self):
        self.budget = small_budget()

    def test_weighted_abs_is_one_homogeneous(self):
        space = rational_space(ClassicalModular.weighted_abs([1.0]))
        self.assertTrue(check_beta_homogeneous(space, 1.0, self.budget).passed)

    def test_p2_is_not(self):
        space = rational_space(ClassicalModular.p_power(2))
        report = check_beta_homogeneous(space, 1.0, self.budget)
        self.assertFalse(report.passed)
        self.assertGreater(report.violation_count, 0)

    def test_root_power_exponent(self):
        space = rational_space(ClassicalModular.root_power(0.5), 2)
        self.assertTrue(check_beta_homogeneous(space, 0.5, self.budget).passed)
        self.assertFalse(check_beta_homogeneous(space, 1.0, self.budget).passed)

    def test_exponent_outside_range(self):
        with self.assertRaises(PreconditionViolation):
            check_beta_homogeneous(rational_space(ClassicalModular.p_power(1)), 1.5, self.budget)

    @tag('acceptance')
    def test_full_budget(self):
        budget = SampleBudget.default()
        self.assertTrue(check_beta_homogeneous(rational_space(ClassicalModular.weighted_abs([1.0]), 2), 1.0, budget).passed)
        self.assertFalse(check_beta_homogeneous(rational_space(ClassicalModular.p_power(2), 2), 1.0, budget).passed)


class UpsilonSpaceTests(SimpleTestCase):
    def setUp(self):
        self.budget = small_budget(n_vectors=200)

    def test_rational_passes(self):
        report = check_upsilon_space(rational_space(ClassicalModular.p_power(1)), self.budget)
        self.assertTrue(report.passed)
        self.assertEqual(report.details['nonzero_samples'], 200)

    def test_step_fails(self):
        self.assertFalse(check_upsilon_space(step_space(ClassicalModular.p_power(1)), self.budget).passed)

    def test_zero_samples_are_vacuous(self):
        report = check_upsilon_space(rational_space(ClassicalModular.p_power(1), 2), self.budget, vectors=np.zeros((5, 2)))
        self.assertTrue(report.passed)
        self.assertTrue(report.details['vacuous'])



class FunctionChecksAgreeTests(SimpleTestCase):
    """The batched space-level checks flag exactly the functions the single-function checks flag."""

    def setUp(self):
        self.budget = small_budget()
        self.vectors = np.random.default_rng(4).standard_normal((60, 2))
        self.maps = [
            ModularMap(Family.RATIONAL_FROM, ClassicalModular.p_power(1)),
            ModularMap(Family.STEP_FROM, ClassicalModular.p_power(2)),
            ModularMap(Family.STEP_FROM, ClassicalModular.p_power(1), closed_step=True),
            ModularMap(Family.RATIONAL_FROM, ClassicalModular.p_power(1), origin_mass=0.1),
            ModularMap(Family.RATIONAL_FROM, ClassicalModular.p_power(2), collapse_below=0.25),
        ]

    def failing(self, space, check):
        return sum(not check(space.mu(x), self.budget).passed for x in self.vectors)

    def test_upsilon(self):
        for modular_map in self.maps:
            space = PMSpace(dim=2, modular_map=modular_map)
            report = check_upsilon_space(space, self.budget, vectors=self.vectors)
            self.assertEqual(report.details['failing_functions'], self.failing(space, check_upsilon), modular_map)

    def test_delta_membership(self):
        for modular_map in self.maps:
            space = PMSpace(dim=2, modular_map=modular_map)
            report = check_delta_membership_space(space, self.budget, vectors=self.vectors)
            self.assertEqual(report.details['failing_functions'], self.failing(space, check_delta_membership),
                             modular_map)
            self.assertTrue(report.passed)

    def test_left_continuity_at_the_threshold(self):
        for modular_map in self.maps:
            space = PMSpace(dim=2, modular_map=modular_map)
            report = check_left_continuity_space(space, self.budget, vectors=self.vectors)
            expected = sum(
                not check_left_continuity(space.mu(x), space.parameters(x), self.budget).passed
                for x in self.vectors
            ) if modular_map.family == Family.STEP_FROM else 0
            self.assertEqual(report.details['failing_functions'], expected, modular_map)

    def test_violations_carry_the_vector(self):
        space = PMSpace(dim=2, modular_map=self.maps[2])
        report = check_left_continuity_space(space, self.budget, vectors=self.vectors)
        violation = report.parts[0].violations[0]
        self.assertEqual(violation.inputs['x'], self.vectors[0].tolist())
        self.assertEqual(violation.inputs['t'], float(space.parameters(self.vectors[0])))


class BudgetTests(SimpleTestCase):
    def test_default_grid(self):
        budget = SampleBudget.default()
        self.assertEqual(len(budget.t_grid), 64)
        self.assertAlmostEqual(budget.t_grid[0], 1e-3)
        self.assertAlmostEqual(budget.t_grid[-1], 1e3)
        self.assertEqual(list(budget.evaluation_grid[:3]), [-1.0, -1e-3, 0.0])

    def test_invalid_budgets(self):
        with self.assertRaises(ValueError):
            SampleBudget.default(n_vectors=0)
        with self.assertRaises(ValueError):
            SampleBudget.default(t_grid=(2.0, 1.0))
        with self.assertRaises(ValueError):
            log_grid(0, 1, 3)


class ReportTests(SimpleTestCase):
    def test_verdicts(self):
        self.assertEqual(CheckReport('x').verdict, Verdict.PASS)
        self.assertEqual(CheckReport.collect('x', 0, 3, [Violation({}, 0.0, 1.0)]).verdict, Verdict.FAIL)
        self.assertEqual(CheckReport.precondition_failed('x', 'no').verdict, Verdict.INFEASIBLE)

    def test_combined_failure_outranks_infeasible(self):
        parts = [
            CheckReport.precondition_failed('a', 'no'),
            CheckReport.collect('b', 0, 1, [Violation({}, 0.0, 1.0)]),
        ]
        self.assertEqual(CheckReport.combine('ab', parts).verdict, Verdict.FAIL)

    def test_only_the_first_violations_are_kept(self):
        report = CheckReport.collect('x', 0, 100, [Violation({'i': i}, 0.0, 1.0) for i in range(50)])
        self.assertEqual(report.violation_count, 50)
        self.assertEqual(len(report.violations), 20)
        self.assertEqual(report.violations[0].inputs, {'i': 0})

    def test_serialized_report(self):
        data = CheckReportSerializer(CheckReport.collect('x', 0, 1, [Violation({'t': 1.0}, 0.0, 1.0)])).data
        self.assertEqual(data['verdict'], 'fail')
        self.assertEqual(data['violations'][0]['inputs'], {'t': 1.0})


class InstanceSerializerTests(SimpleTestCase):
    def test_valid_instance(self):
        serializer = InstanceSerializer(data={
            'family': 'rational_from',
            'modular': {'kind': 'p_power', 'exponent': 2},
            'dim': 2,
            'declare_true_constants': True,
        })
        self.assertTrue(serializer.is_valid(), serializer.errors)
        space = serializer.validated_data['space']
        self.assertEqual(space.declared_c, 4.0)
        self.assertIsNone(space.declared_beta)

    def test_negative_dim_is_rejected(self):
        serializer = InstanceSerializer(data={'family': 'step_from', 'modular': {'kind': 'p_power'}, 'dim': -1})
        self.assertFalse(serializer.is_valid())
        self.assertIn('dim', serializer.errors)

    def test_nested_unknown_field_is_rejected(self):
        serializer = InstanceSerializer(data={
            'family': 'step_from', 'modular': {'kind': 'p_power', 'power': 2}, 'dim': 1,
        })
        self.assertFalse(serializer.is_valid())
        self.assertIn('modular', serializer.errors)

    def test_budget_grid_is_expanded(self):
        serializer = BudgetSerializer(data={'t_grid': [0.1, 10, 3]})
        self.assertTrue(serializer.is_valid(), serializer.errors)
        self.assertEqual(len(serializer.validated_data['t_grid']), 3)
