import numpy as np
from django.test import SimpleTestCase, tag
from hypothesis import given, settings
from hypothesis import strategies as st

from balls.geometry import Ball, BallUnion
from balls.identities import (
    is_balanced_sampled,
    is_convex_sampled,
    monotone_in_level,
    monotone_in_scale,
    scaling_identity,
    translate_identity,
)
from balls.sampling import sample_members
from balls.serializers import BallSerializer
from balls.witnesses import lemma1_witness
from spaces.budget import SampleBudget
from spaces.instances import Family, ModularMap, PMSpace
from spaces.modulars import ClassicalModular
from spaces.reports import Verdict
from utils.exceptions import InfeasibleConstruction, PreconditionViolation


def line(family=Family.RATIONAL_FROM, modular=None):
    return PMSpace.reference(family, modular or ClassicalModular.p_power(1), 1)


def oracle_radius(alpha, t):
    """Rational family with rho = |x|: the ball is the interval of this radius."""
    return t * alpha / (1 - alpha)


class MembershipTests(SimpleTestCase):
    def setUp(self):
        self.ball = Ball.at_origin(line(), 0.5, 1.0)

    def test_examples(self):
        self.assertTrue(self.ball.contains([0.9]))
        self.assertFalse(self.ball.contains([1.1]))

    def test_center_is_member(self):
        for family in Family.values:
            ball = Ball(line(family), (3.0,), 0.01, 1e-3)
            self.assertTrue(ball.contains([3.0]))

    def test_invalid_parameters(self):
        with self.assertRaises(ValueError):
            Ball.at_origin(line(), 1.0, 1.0)
        with self.assertRaises(ValueError):
            Ball.at_origin(line(), 0.5, 0.0)

    @given(st.floats(-5, 5), st.floats(-5, 5), st.floats(0.05, 0.95), st.floats(0.01, 10))
    @settings(deadline=None)
    def test_agrees_with_closed_form(self, x, y, alpha, t):
        radius = oracle_radius(alpha, t)
        ball = Ball(line(), (x,), alpha, t)
        if not ball.undecided(np.array([[y]]), 1e-9)[0]:
            self.assertEqual(ball.contains([y]), abs(x - y) < radius)
        step_ball = Ball(line(Family.STEP_FROM), (x,), alpha, t)
        if not step_ball.undecided(np.array([[y]]), 1e-9)[0]:
            self.assertEqual(step_ball.contains([y]), abs(x - y) < t)

    def test_sampled_members_are_members(self):
        rng = np.random.default_rng(0)
        members = sample_members(self.ball, rng, 100, 1e-9)
        self.assertEqual(len(members), 100)
        self.assertTrue(np.all(np.abs(members) < 1.0))

    def test_serializer(self):
        serializer = BallSerializer(data={'level': 0.5, 'scale': 2}, context={'space': line()})
        self.assertTrue(serializer.is_valid(), serializer.errors)
        ball = serializer.save()
        self.assertEqual(ball.center, (0.0,))
        self.assertFalse(BallSerializer(data={'level': 1.5, 'scale': 2}).is_valid())


class ScaleWitnessTests(SimpleTestCase):
    def test_rational_example(self):
        ball = Ball.at_origin(line(), 0.6, 1.0)
        t_star = lemma1_witness(ball, [1.0])
        self.assertAlmostEqual(t_star, 5 / 6, places=9)
        self.assertGreater(line().value([1.0], t_star), 0.4)

    def test_center_gives_half_scale(self):
        ball = Ball(line(), (2.0,), 0.3, 4.0)
        self.assertAlmostEqual(lemma1_witness(ball, [2.0]), 2.0, places=9)

    def test_step_threshold(self):
        ball = Ball.at_origin(line(Family.STEP_FROM), 0.5, 1.0)
        t_star = lemma1_witness(ball, [0.9])
        self.assertAlmostEqual(t_star, 0.95, places=9)
        self.assertTrue(0.9 < t_star < 1.0)

    def test_non_member_is_rejected(self):
        with self.assertRaises(PreconditionViolation):
            lemma1_witness(Ball.at_origin(line(), 0.5, 1.0), [1.5])

    def test_closed_step_boundary_is_infeasible(self):
        modular_map = ModularMap(Family.STEP_FROM, ClassicalModular.p_power(1), closed_step=True)
        space = PMSpace(dim=1, modular_map=modular_map)
        ball = Ball.at_origin(space, 0.5, 0.75)
        self.assertTrue(ball.contains([0.75]))
        with self.assertRaises(InfeasibleConstruction):
            lemma1_witness(ball, [0.75])

    @given(st.floats(-3, 3), st.floats(0.05, 0.95), st.floats(0.01, 10))
    @settings(deadline=None)
    def test_witness_lies_inside_the_scale(self, y, alpha, t):
        ball = Ball.at_origin(line(), alpha, t)
        if ball.contains([y]):
            t_star = lemma1_witness(ball, [y])
            self.assertTrue(0 < t_star < t)
            self.assertGreater(line().value([y], t_star), 1 - alpha)


class IdentityTests(SimpleTestCase):
    def setUp(self):
        self.budget = SampleBudget.default(n_vectors=500, n_scalar_pairs=500)
        self.space = PMSpace.reference(Family.RATIONAL_FROM, ClassicalModular.weighted_abs([1.0]), 2)

    def test_translation(self):
        self.assertTrue(translate_identity(self.space, [1.0, -2.0], 0.5, 1.0, self.budget).passed)
        self.assertTrue(translate_identity(self.space, [0.0, 0.0], 0.5, 1.0, self.budget).passed)

    def test_translation_with_broken_membership(self):
        def plus_membership(ball, ys):
            return ball.space.evaluate(ball.center_vector + ys, ball.scale) > ball.threshold

        report = translate_identity(self.space, [1.0, -2.0], 0.5, 1.0, self.budget, membership=plus_membership)
        self.assertFalse(report.passed)

    def test_scaling(self):
        self.assertTrue(scaling_identity(self.space, 1.0, 0.5, 2.0, self.budget).passed)
        self.assertTrue(scaling_identity(self.space, 1.0, 0.5, 1.0, self.budget).passed)

    def test_scaling_with_wrong_exponent(self):
        space = line(modular=ClassicalModular.p_power(2))
        report = scaling_identity(space, 1.0, 0.5, 2.0, self.budget, verify_precondition=False)
        self.assertEqual(report.verdict, Verdict.FAIL)
        self.assertEqual(scaling_identity(space, 1.0, 0.5, 2.0, self.budget).verdict, Verdict.INFEASIBLE)

    def test_monotone_in_scale(self):
        self.assertTrue(monotone_in_scale(self.space, 0.5, 1.0, 2.0, self.budget).passed)
        self.assertTrue(monotone_in_scale(self.space, 0.5, 1.0, 1.0, self.budget).passed)
        with self.assertRaises(PreconditionViolation):
            monotone_in_scale(self.space, 0.5, 2.0, 1.0, self.budget)

    def test_monotone_in_level(self):
        self.assertTrue(monotone_in_level(self.space, 0.2, 0.7, 1.0, self.budget).passed)
        self.assertTrue(monotone_in_level(self.space, 0.4, 0.4, 1.0, self.budget).passed)
        with self.assertRaises(PreconditionViolation):
            monotone_in_level(self.space, 0.7, 0.2, 1.0, self.budget)

    def test_balanced_and_convex(self):
        ball = Ball.at_origin(self.space, 0.5, 1.0)
        self.assertTrue(is_balanced_sampled(ball, self.budget).passed)
        self.assertTrue(is_convex_sampled(ball, self.budget).passed)

    def test_balanced_needs_origin(self):
        with self.assertRaises(PreconditionViolation):
            is_balanced_sampled(Ball(self.space, (1.0, 0.0), 0.5, 1.0), self.budget)

    def test_union_of_disjoint_balls_is_not_convex(self):
        union = BallUnion((Ball.at_origin(self.space, 0.5, 1.0), Ball(self.space, (10.0, 0.0), 0.5, 1.0)))
        self.assertFalse(is_convex_sampled(union, self.budget).passed)

    def test_root_power_balls_are_not_convex_in_the_plane(self):
        space = PMSpace.reference(Family.RATIONAL_FROM, ClassicalModular.root_power(0.5), 2)
        ball = Ball.at_origin(space, 0.5, 1.0)
        self.assertTrue(is_balanced_sampled(ball, self.budget).passed)
        self.assertFalse(is_convex_sampled(ball, self.budget).passed)

    @tag('acceptance')
    def test_identities_over_random_parameters(self):
        rng = np.random.default_rng(2024)
        space = line(modular=ClassicalModular.weighted_abs([1.0]))
        for seed in range(100):
            budget = self.budget.replace(rng_seed=seed)
            x = rng.normal(size=1)
            alpha = rng.uniform(0.05, 0.95)
            t = 10 ** rng.uniform(-2, 2)
            reports = [
                translate_identity(space, x, alpha, t, budget, samples=10),
                scaling_identity(space, 1.0, alpha, t, budget, verify_precondition=False, samples=10),
                monotone_in_scale(space, alpha, t, 2 * t, budget, samples=10),
                monotone_in_level(space, alpha / 2, alpha, t, budget, samples=10),
            ]
            for report in reports:
                self.assertTrue(report.passed, (report.check, report.violations))
