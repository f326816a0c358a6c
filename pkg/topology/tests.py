import numpy as np
from django.test import SimpleTestCase, tag
from hypothesis import given
from hypothesis import strategies as st

from balls.geometry import Ball
from spaces.budget import SampleBudget
from spaces.instances import Family, PMSpace
from spaces.modulars import ClassicalModular
from topology.witnesses import (
    DELTA2_CHAIN,
    HOMOGENEOUS_CHAIN,
    addition_continuity_witness,
    basis_intersection,
    homogeneous_separation_witness,
    local_base_containment,
    local_base_index,
    origin_base_intersection,
    refine_ball,
    scalar_continuity_witness,
    separation_witness,
)
from utils.exceptions import InfeasibleConstruction, PreconditionViolation

GRID = (0.25, 0.5, 1.0, 2.0, 4.0)


def budget(**overrides):
    values = {'n_vectors': 1000, 'n_scalar_pairs': 1000, 't_grid': GRID, 'separation_samples': 300}
    values.update(overrides)
    return SampleBudget.default(**values)


def line(modular=None, family=Family.RATIONAL_FROM, declare=True):
    return PMSpace.reference(family, modular or ClassicalModular.p_power(1), 1, declare=declare)


class RefineBallTests(SimpleTestCase):
    def setUp(self):
        self.budget = budget()
        self.space = line()
        self.outer = Ball.at_origin(self.space, 0.5, 1.0)

    def test_boundary_of_the_core_uses_homogeneity(self):
        witness = refine_ball(self.space, self.outer, [0.5], self.budget)
        self.assertEqual(witness.chain, HOMOGENEOUS_CHAIN)
        self.assertAlmostEqual(witness.t_star, 0.75, places=9)
        self.assertAlmostEqual(witness.inner.scale, 0.125 / 7, places=9)
        self.assertTrue(witness.evidence.passed)
        self.assertGreater(witness.evidence.samples_run, 0)

    def test_core_member_uses_delta2(self):
        witness = refine_ball(self.space, self.outer, [0.2], self.budget)
        self.assertEqual(witness.chain, DELTA2_CHAIN)
        self.assertAlmostEqual(witness.t_star, 0.7, places=9)
        self.assertAlmostEqual(witness.inner.scale, 0.15, places=9)
        self.assertGreater(witness.alpha_star, 1 - witness.s)
        self.assertGreater(witness.alpha_1, 1 - witness.s)
        self.assertGreater(1 - witness.s, 1 - self.outer.level)
        self.assertTrue(witness.evidence.passed)

    def test_inner_ball_is_centred_at_z(self):
        witness = refine_ball(self.space, self.outer, [-0.4], self.budget)
        self.assertEqual(witness.inner.center, (-0.4,))
        self.assertTrue(witness.inner.contains([-0.4]))

    def test_non_member_is_rejected(self):
        with self.assertRaises(PreconditionViolation):
            refine_ball(self.space, self.outer, [1.0], self.budget)

    def test_undeclared_constant_is_rejected(self):
        space = line(declare=False)
        with self.assertRaises(PreconditionViolation):
            refine_ball(space, Ball.at_origin(space, 0.5, 1.0), [0.2], self.budget)

    def test_wrong_declared_constant_is_rejected(self):
        space = PMSpace(dim=1, modular_map=line(ClassicalModular.p_power(2)).modular_map, declared_c=2.0)
        with self.assertRaises(PreconditionViolation):
            refine_ball(space, Ball.at_origin(space, 0.5, 1.0), [0.2], self.budget)

    def test_outside_the_core_without_homogeneity(self):
        space = line(ClassicalModular.p_power(2))
        outer = Ball.at_origin(space, 0.5, 1.0)
        self.assertEqual(refine_ball(space, outer, [0.3], self.budget).chain, DELTA2_CHAIN)
        with self.assertRaises(InfeasibleConstruction):
            refine_ball(space, outer, [0.8], self.budget)

    def test_step_family(self):
        space = line(family=Family.STEP_FROM)
        outer = Ball.at_origin(space, 0.5, 1.0)
        witness = refine_ball(space, outer, [0.9], self.budget)
        self.assertEqual(witness.chain, HOMOGENEOUS_CHAIN)
        self.assertTrue(witness.evidence.passed)

    @tag('acceptance')
    def test_random_members(self):
        rng = np.random.default_rng(7)
        for modular in (ClassicalModular.p_power(1), ClassicalModular.weighted_abs([0.5, 2.0])):
            space = PMSpace.reference(Family.RATIONAL_FROM, modular, 2)
            for _ in range(50):
                outer = Ball(space, tuple(rng.normal(size=2)), rng.uniform(0.05, 0.95), 10 ** rng.uniform(-1, 1))
                z = outer.center_vector + rng.uniform(-1, 1, 2) * outer.scale / 4
                if not outer.contains(z):
                    continue
                witness = refine_ball(space, outer, z, self.budget)
                self.assertTrue(witness.evidence.passed, witness.as_dict())


class IntersectionTests(SimpleTestCase):
    def setUp(self):
        self.budget = budget()
        self.space = line()

    def test_basis_intersection(self):
        first = Ball.at_origin(self.space, 0.5, 1.0)
        second = Ball(self.space, (1.0,), 0.5, 1.0)
        witness = basis_intersection(self.space, first, second, [0.5], self.budget)
        self.assertEqual(witness.ball.center, (0.5,))
        self.assertEqual(len(witness.refinements), 2)
        self.assertEqual(witness.ball.level, min(r.inner.level for r in witness.refinements))
        self.assertTrue(witness.evidence.passed)

    def test_basis_intersection_needs_a_common_member(self):
        first = Ball.at_origin(self.space, 0.5, 1.0)
        second = Ball(self.space, (5.0,), 0.5, 1.0)
        with self.assertRaises(PreconditionViolation):
            basis_intersection(self.space, first, second, [0.5], self.budget)

    def test_origin_base_intersection(self):
        witness = origin_base_intersection(
            Ball.at_origin(self.space, 0.3, 1.0), Ball.at_origin(self.space, 0.6, 0.5), self.budget,
        )
        self.assertEqual((witness.ball.level, witness.ball.scale), (0.3, 0.5))
        self.assertTrue(witness.evidence.passed)

    def test_origin_base_needs_origin_balls(self):
        with self.assertRaises(PreconditionViolation):
            origin_base_intersection(
                Ball.at_origin(self.space, 0.3, 1.0), Ball(self.space, (1.0,), 0.6, 0.5), self.budget,
            )


class LocalBaseTests(SimpleTestCase):
    def test_examples(self):
        self.assertEqual(local_base_index(0.5, 1.0), 3)
        self.assertEqual(local_base_index(0.9, 2.0), 2)

    @given(st.floats(1e-4, 0.999), st.floats(1e-4, 1e3))
    def test_index_is_least(self, level, scale):
        n = local_base_index(level, scale)
        self.assertLess(1 / n, min(level, scale))
        if n > 1:
            self.assertGreaterEqual(1 / (n - 1), min(level, scale))

    def test_containment(self):
        space = PMSpace.reference(Family.RATIONAL_FROM, ClassicalModular.p_power(2), 2)
        outer = Ball(space, (1.0, -1.0), 0.5, 1.0)
        witness = local_base_containment(space, [1.0, -1.0], outer, budget())
        self.assertEqual(witness.n, 3)
        self.assertEqual(witness.ball.level, 1 / 3)
        self.assertTrue(witness.evidence.passed)

    def test_ball_must_be_centred_at_x(self):
        space = line()
        with self.assertRaises(PreconditionViolation):
            local_base_containment(space, [1.0], Ball.at_origin(space, 0.5, 1.0), budget())


class SeparationTests(SimpleTestCase):
    def setUp(self):
        self.budget = budget()
        self.space = line()

    def test_example(self):
        witness = separation_witness(self.space, [0.0], [1.0], self.budget)
        self.assertEqual(witness.t0, 1.0)
        self.assertAlmostEqual(witness.ball_x.level, 0.25)
        self.assertAlmostEqual(witness.ball_x.scale, 0.25)
        self.assertTrue(witness.evidence.passed)

    def test_close_points(self):
        witness = separation_witness(self.space, [0.0], [1e-3], self.budget)
        self.assertTrue(witness.evidence.passed)
        self.assertFalse(witness.ball_x.contains([1e-3]))

    def test_equal_points_are_rejected(self):
        with self.assertRaises(PreconditionViolation):
            separation_witness(self.space, [1.0], [1.0], self.budget)

    def test_step_family(self):
        space = line(ClassicalModular.p_power(2), family=Family.STEP_FROM)
        witness = separation_witness(space, [0.0], [0.7], self.budget)
        self.assertTrue(witness.evidence.passed)

    def test_homogeneous_example(self):
        witness = homogeneous_separation_witness(self.space, [1.0], self.budget)
        self.assertAlmostEqual(witness.ball_x.level, 0.25)
        self.assertAlmostEqual(witness.ball_x.scale, 0.25)
        self.assertTrue(witness.ball_x.is_centered_at_origin())
        self.assertEqual(witness.ball_y.center, (1.0,))
        self.assertTrue(witness.evidence.passed)

    def test_homogeneous_step_family_fails_upsilon(self):
        space = line(family=Family.STEP_FROM)
        with self.assertRaises(PreconditionViolation):
            homogeneous_separation_witness(space, [1.0], self.budget)

    def test_homogeneous_origin_is_rejected(self):
        with self.assertRaises(PreconditionViolation):
            homogeneous_separation_witness(self.space, [0.0], self.budget)

    def test_homogeneous_needs_an_exponent(self):
        with self.assertRaises(PreconditionViolation):
            homogeneous_separation_witness(line(ClassicalModular.p_power(2)), [1.0], self.budget)


class ContinuityTests(SimpleTestCase):
    def setUp(self):
        self.budget = budget()
        self.space = line()
        self.target = Ball.at_origin(self.space, 0.5, 1.0)

    def test_addition_example(self):
        witness = addition_continuity_witness(self.space, self.target, self.budget)
        self.assertEqual((witness.b1.level, witness.b1.scale), (0.25, 0.125))
        self.assertEqual(witness.b1, witness.b2)
        self.assertTrue(witness.evidence.passed)

    def test_scalar_example(self):
        witness = scalar_continuity_witness(self.space, self.target, 2.0, self.budget)
        self.assertAlmostEqual(witness.b1.scale, 0.125)
        self.assertAlmostEqual(witness.r, 4.0)
        self.assertTrue(witness.evidence.passed)

    def test_scalar_at_zero_uses_the_floor(self):
        witness = scalar_continuity_witness(self.space, self.target, 0.0, self.budget)
        self.assertGreater(witness.r, 0)
        self.assertTrue(witness.evidence.passed)

    def test_root_power_plane(self):
        space = PMSpace.reference(Family.RATIONAL_FROM, ClassicalModular.root_power(0.5), 2)
        target = Ball.at_origin(space, 0.4, 2.0)
        self.assertTrue(addition_continuity_witness(space, target, self.budget).evidence.passed)
        self.assertTrue(scalar_continuity_witness(space, target, -1.5, self.budget).evidence.passed)

    def test_target_must_be_at_origin(self):
        with self.assertRaises(PreconditionViolation):
            addition_continuity_witness(self.space, Ball(self.space, (1.0,), 0.5, 1.0), self.budget)

    def test_needs_homogeneity(self):
        space = line(ClassicalModular.p_power(2))
        with self.assertRaises(PreconditionViolation):
            scalar_continuity_witness(space, Ball.at_origin(space, 0.5, 1.0), 1.0, self.budget)


class RandomizedWitnessTests(SimpleTestCase):
    """Each construction over about a thousand random inputs across both reference families."""

    DRAWS = 63

    def setUp(self):
        self.budget = budget(n_vectors=200, n_scalar_pairs=200, separation_samples=100, witness_samples=100)

    def spaces(self):
        for family in (Family.RATIONAL_FROM, Family.STEP_FROM):
            for dim in (1, 3):
                for modular in (
                    ClassicalModular.p_power(1),
                    ClassicalModular.p_power(2),
                    ClassicalModular.weighted_abs([0.5, 2.0, 1.5][:dim]),
                    ClassicalModular.root_power(0.5),
                ):
                    yield PMSpace.reference(family, modular, dim), modular

    def targets(self, space, rng):
        for _ in range(self.DRAWS):
            yield Ball.at_origin(space, rng.uniform(0.05, 0.95), 10 ** rng.uniform(-1, 1))

    @tag('acceptance')
    def test_separation(self):
        rng = np.random.default_rng(11)
        for space, modular in self.spaces():
            for _ in range(self.DRAWS):
                x = rng.normal(size=space.dim) * 10 ** rng.uniform(-1, 1)
                y = x + rng.normal(size=space.dim)
                witness = separation_witness(space, x, y, self.budget)
                self.assertTrue(witness.evidence.passed, witness.as_dict())

    @tag('acceptance')
    def test_homogeneous_separation(self):
        rng = np.random.default_rng(12)
        for space, modular in self.spaces():
            buildable = modular.homogeneity_exponent() is not None and space.modular_map.family == Family.RATIONAL_FROM
            for _ in range(self.DRAWS):
                x = rng.normal(size=space.dim) * 10 ** rng.uniform(-1, 1)
                if not buildable:
                    with self.assertRaises(PreconditionViolation):
                        homogeneous_separation_witness(space, x, self.budget)
                    continue
                witness = homogeneous_separation_witness(space, x, self.budget)
                self.assertTrue(witness.evidence.passed, witness.as_dict())

    @tag('acceptance')
    def test_addition_continuity(self):
        rng = np.random.default_rng(13)
        for space, modular in self.spaces():
            for target in self.targets(space, rng):
                if modular.homogeneity_exponent() is None:
                    with self.assertRaises(PreconditionViolation):
                        addition_continuity_witness(space, target, self.budget)
                    continue
                witness = addition_continuity_witness(space, target, self.budget)
                self.assertTrue(witness.evidence.passed, witness.as_dict())

    @tag('acceptance')
    def test_scalar_continuity(self):
        rng = np.random.default_rng(14)
        for space, modular in self.spaces():
            for target in self.targets(space, rng):
                lam = rng.uniform(-5, 5)
                if modular.homogeneity_exponent() is None:
                    with self.assertRaises(PreconditionViolation):
                        scalar_continuity_witness(space, target, lam, self.budget)
                    continue
                witness = scalar_continuity_witness(space, target, lam, self.budget)
                self.assertTrue(witness.evidence.passed, witness.as_dict())
