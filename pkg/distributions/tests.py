import numpy as np
from django.test import SimpleTestCase
from hypothesis import given, settings
from hypothesis import strategies as st

from distributions.checks import check_delta_membership, check_left_continuity, check_upsilon
from distributions.functions import DistributionFunction, Kind, pointwise_min
from distributions.serializers import DistributionFunctionSerializer
from spaces.budget import SampleBudget
from utils.exceptions import PreconditionViolation

reals = st.floats(min_value=-1e3, max_value=1e3, allow_nan=False)
parameters = st.floats(min_value=0, max_value=1e3, allow_nan=False)


class EvaluateTests(SimpleTestCase):
    def test_rational_value(self):
        self.assertEqual(DistributionFunction.rational(1).evaluate(1), 0.5)

    def test_step_is_strict_at_threshold(self):
        self.assertEqual(DistributionFunction.step(2)(2), 0.0)
        self.assertEqual(DistributionFunction.step(2)(2.5), 1.0)

    def test_zero_on_negative_arguments(self):
        for f in (DistributionFunction.rational(1), DistributionFunction.step(0), DistributionFunction.rational(0)):
            self.assertEqual(f(-1.0), 0.0)
            self.assertEqual(f(0.0), 0.0)

    def test_rational_zero_is_one_on_positive_t(self):
        self.assertEqual(DistributionFunction.rational(0)(1e-300), 1.0)

    def test_piecewise_linear_interpolates(self):
        f = DistributionFunction.piecewise_linear([(1, 0.2), (3, 0.6)])
        self.assertEqual(f(0.5), 0.0)
        self.assertAlmostEqual(f(2), 0.4)
        self.assertEqual(f(10), 0.6)

    def test_array_evaluation(self):
        values = DistributionFunction.rational(1).evaluate(np.array([-1.0, 1.0, 3.0]))
        np.testing.assert_allclose(values, [0.0, 0.5, 0.75])

    def test_closed_step_includes_threshold(self):
        self.assertEqual(DistributionFunction.step(2, inclusive=True)(2), 1.0)

    def test_origin_mass_lifts_non_negative_arguments(self):
        f = DistributionFunction.rational(1, origin_mass=0.1)
        self.assertEqual(f(0), 0.1)
        self.assertEqual(f(-1), 0.0)
        self.assertEqual(f(1), 0.5)

    def test_invalid_breakpoints_are_rejected(self):
        with self.assertRaises(ValueError):
            DistributionFunction.piecewise_linear([(1, 0.2), (1, 0.6)])
        with self.assertRaises(ValueError):
            DistributionFunction.piecewise_linear([(1, 1.5)])
        with self.assertRaises(ValueError):
            DistributionFunction.rational(-1)

    @given(parameters, reals, reals)
    @settings(deadline=None)
    def test_rational_and_step_are_non_decreasing(self, r, s, t):
        s, t = min(s, t), max(s, t)
        self.assertLessEqual(DistributionFunction.step(r)(s), DistributionFunction.step(r)(t))
        # one rounding step of slack for the quotient
        self.assertLessEqual(DistributionFunction.rational(r)(s), DistributionFunction.rational(r)(t) + 1e-15)

    @given(st.floats(min_value=1e-6, max_value=1e3), st.floats(min_value=-1e6, max_value=1e6))
    @settings(deadline=None)
    def test_rational_stays_below_one(self, r, t):
        self.assertLess(DistributionFunction.rational(r)(t), 1.0)


class PointwiseMinTests(SimpleTestCase):
    def test_rational_pair(self):
        self.assertEqual(pointwise_min(DistributionFunction.rational(1), DistributionFunction.rational(3), 1), 0.25)

    def test_step_pair(self):
        self.assertEqual(pointwise_min(DistributionFunction.step(1), DistributionFunction.step(2), 1.5), 0.0)

    @given(parameters, parameters, reals)
    @settings(deadline=None)
    def test_commutative_and_idempotent(self, r, q, t):
        f, g = DistributionFunction.rational(r), DistributionFunction.step(q)
        self.assertEqual(pointwise_min(f, g, t), pointwise_min(g, f, t))
        self.assertEqual(pointwise_min(f, f, t), f(t))


class DeltaMembershipTests(SimpleTestCase):
    def setUp(self):
        self.budget = SampleBudget.default()

    def test_rational_is_member(self):
        self.assertTrue(check_delta_membership(DistributionFunction.rational(2), self.budget).passed)

    def test_heaviside_at_zero_is_member(self):
        self.assertTrue(check_delta_membership(DistributionFunction.step(0), self.budget).passed)

    def test_decreasing_piecewise_fails_monotonicity(self):
        report = check_delta_membership(DistributionFunction.piecewise_linear([(0, 0.5), (1, 0.2)]), self.budget)
        self.assertFalse(report.passed)
        self.assertFalse(report.part('monotone').passed)

    def test_supremum_search_climbs_past_the_grid(self):
        report = check_delta_membership(DistributionFunction.rational(1e6), self.budget)
        self.assertTrue(report.part('supremum').passed)
        self.assertGreater(report.part('supremum').details['reached_t'], self.budget.t_grid[-1])

    def test_capped_piecewise_fails_supremum(self):
        report = check_delta_membership(DistributionFunction.piecewise_linear([(0, 0.0), (1, 0.7)]), self.budget)
        self.assertFalse(report.part('supremum').passed)
        self.assertTrue(report.part('monotone').passed)


class LeftContinuityTests(SimpleTestCase):
    def setUp(self):
        self.budget = SampleBudget.default()

    def test_rational_is_left_continuous(self):
        self.assertTrue(check_left_continuity(DistributionFunction.rational(1), 1.0, self.budget).passed)

    def test_open_step_is_left_continuous_at_threshold(self):
        self.assertTrue(check_left_continuity(DistributionFunction.step(1), 1.0, self.budget).passed)

    def test_closed_step_is_not(self):
        self.assertFalse(check_left_continuity(DistributionFunction.step(1, inclusive=True), 1.0, self.budget).passed)

    def test_jump_between_close_breakpoints(self):
        delta = min(self.budget.jump_steps)
        t = 1.0 + delta
        f = DistributionFunction.piecewise_linear([(0, 0.0), (1, 0.0), (t, 1.0), (2, 1.0)])
        self.assertFalse(check_left_continuity(f, t, self.budget).passed)

    def test_non_positive_t_is_rejected(self):
        with self.assertRaises(PreconditionViolation):
            check_left_continuity(DistributionFunction.rational(1), 0.0, self.budget)


class UpsilonTests(SimpleTestCase):
    def setUp(self):
        self.budget = SampleBudget.default()

    def test_rational_passes(self):
        report = check_upsilon(DistributionFunction.rational(1), self.budget)
        self.assertTrue(report.passed)
        self.assertFalse(report.details['strict_vacuous'])

    def test_step_fails_continuity_and_strictness_is_vacuous(self):
        report = check_upsilon(DistributionFunction.step(1), self.budget)
        self.assertFalse(report.passed)
        self.assertFalse(report.part('continuity').passed)
        self.assertTrue(report.part('strictly_increasing').passed)
        self.assertTrue(report.details['strict_vacuous'])

    def test_flat_interior_segment_fails(self):
        f = DistributionFunction.piecewise_linear([(0, 0.0), (1, 0.5), (10, 0.5), (20, 1.0)])
        report = check_upsilon(f, self.budget)
        self.assertTrue(report.part('continuity').passed)
        self.assertFalse(report.part('strictly_increasing').passed)


class DistributionSerializerTests(SimpleTestCase):
    def test_tagged_record(self):
        serializer = DistributionFunctionSerializer(data={'kind': 'piecewise_linear', 'breakpoints': [[0, 0], [1, 1]]})
        self.assertTrue(serializer.is_valid(), serializer.errors)
        f = serializer.save()
        self.assertEqual(f.kind, Kind.PIECEWISE_LINEAR)
        self.assertEqual(f.breakpoints, ((0.0, 0.0), (1.0, 1.0)))

    def test_representation_keeps_parameters(self):
        data = DistributionFunctionSerializer(DistributionFunction.rational(0.1)).data
        self.assertEqual(data['kind'], 'rational')
        self.assertEqual(data['parameter'], 0.1)

    def test_unknown_field_is_rejected(self):
        serializer = DistributionFunctionSerializer(data={'kind': 'step', 'parameter': 1, 'slope': 2})
        self.assertFalse(serializer.is_valid())
        self.assertIn('slope', serializer.errors)

    def test_unsorted_breakpoints_are_rejected(self):
        serializer = DistributionFunctionSerializer(data={'kind': 'piecewise_linear', 'breakpoints': [[1, 0], [0, 1]]})
        self.assertFalse(serializer.is_valid())
