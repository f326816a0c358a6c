from unittest import mock

from django.test import SimpleTestCase, tag

from falsifier.generation import generate_instance
from falsifier.mutations import TARGETS, MutationKind, mutate
from falsifier.registry import PREDICATES, run_registry
from spaces.budget import SampleBudget
from spaces.checks import check_axioms
from spaces.instances import Family, PMSpace
from spaces.modulars import ClassicalModular, ModularKind
from spaces.reports import Verdict


def small_budget(seed=0):
    return SampleBudget.default(n_vectors=1000, n_scalar_pairs=1000, rng_seed=seed)


class GenerationTests(SimpleTestCase):
    def test_deterministic(self):
        self.assertEqual(generate_instance(1, Family.RATIONAL_FROM), generate_instance(1, Family.RATIONAL_FROM))

    def test_valid_instance_passes_the_axioms(self):
        space = generate_instance(1, Family.RATIONAL_FROM)
        self.assertTrue(check_axioms(space, small_budget()).passed)
        self.assertIsNotNone(space.declared_c)

    def test_pm3_mutation_breaks_only_pm3(self):
        space = generate_instance(1, Family.RATIONAL_FROM, MutationKind.BREAK_PM3)
        per_axiom = check_axioms(space, SampleBudget.default()).details['per_axiom']
        self.assertEqual(per_axiom, {'pm1': 'pass', 'pm2': 'pass', 'pm3': 'fail', 'pm4': 'pass'})

    def test_pm2_mutation_avoids_root_power(self):
        for seed in range(30):
            space = generate_instance(seed, Family.RATIONAL_FROM, MutationKind.BREAK_PM2)
            self.assertNotEqual(space.modular_map.modular.kind, ModularKind.ROOT_POWER)

    def test_mutate(self):
        space = PMSpace.reference(Family.RATIONAL_FROM, ClassicalModular.p_power(2), 2)
        self.assertEqual(mutate(space, MutationKind.BREAK_DELTA2_DECLARATION).declared_c, 2.0)
        closed = mutate(space, MutationKind.BREAK_LEFT_CONTINUITY).modular_map
        self.assertEqual((closed.family, closed.closed_step), (Family.STEP_FROM, True))
        root = PMSpace.reference(Family.RATIONAL_FROM, ClassicalModular.root_power(0.5), 2)
        with self.assertRaises(ValueError):
            mutate(root, MutationKind.BREAK_PM2)

    def test_every_mutation_has_a_target(self):
        self.assertEqual(set(TARGETS), set(MutationKind))
        self.assertTrue(set(TARGETS.values()) <= set(PREDICATES))


class RegistryTests(SimpleTestCase):
    def test_valid_rational_instance(self):
        space = PMSpace.reference(Family.RATIONAL_FROM, ClassicalModular.p_power(1), 2)
        run = run_registry(space, small_budget())
        self.assertEqual(run.failures(), [])
        self.assertEqual(set(run.results), set(PREDICATES))
        self.assertEqual(run.results['refine'].verdict, Verdict.PASS)
        self.assertEqual(run.results['homogeneous_separation'].verdict, Verdict.PASS)

    def test_valid_step_instance(self):
        space = PMSpace.reference(Family.STEP_FROM, ClassicalModular.weighted_abs([1.0]), 1)
        run = run_registry(space, small_budget())
        self.assertEqual(run.failures(), [])
        self.assertEqual(run.results['delta2'].verdict, Verdict.PASS)
        self.assertEqual(run.results['separation'].verdict, Verdict.PASS)
        self.assertEqual(run.results['upsilon'].verdict, Verdict.INFEASIBLE)
        self.assertEqual(run.results['homogeneous_separation'].verdict, Verdict.INFEASIBLE)

    def test_convexity_is_skipped_below_beta_one(self):
        space = PMSpace.reference(Family.RATIONAL_FROM, ClassicalModular.root_power(0.5), 2)
        run = run_registry(space, small_budget(), predicates=['convex', 'balanced'])
        self.assertEqual(run.results['convex'].verdict, Verdict.INFEASIBLE)
        self.assertEqual(run.results['balanced'].verdict, Verdict.PASS)

    def test_pm4_mutation(self):
        space = generate_instance(3, Family.RATIONAL_FROM, MutationKind.BREAK_PM4)
        run = run_registry(space, small_budget(), predicates=['pm4'])
        self.assertEqual(run.failures(), ['pm4'])
        self.assertEqual(run.mutation, MutationKind.BREAK_PM4)

    def test_closed_step_defeats_lemma1(self):
        space = generate_instance(1, Family.STEP_FROM, MutationKind.BREAK_LEFT_CONTINUITY)
        run = run_registry(space, small_budget(), predicates=['lemma1', 'left_continuity'])
        self.assertEqual(run.results['lemma1'].verdict, Verdict.INFEASIBLE)
        self.assertEqual(run.results['left_continuity'].verdict, Verdict.FAIL)

    def test_wrong_declaration_is_a_failure(self):
        space = generate_instance(2, Family.RATIONAL_FROM, MutationKind.BREAK_DELTA2_DECLARATION)
        run = run_registry(space, small_budget(), predicates=['delta2', 'refine'])
        self.assertEqual(run.results['delta2'].verdict, Verdict.FAIL)
        self.assertEqual(run.results['refine'].verdict, Verdict.INFEASIBLE)

    def test_crash_is_reported_as_failure(self):
        def explode(space, budget):
            raise ZeroDivisionError('boom')

        space = PMSpace.reference(Family.RATIONAL_FROM, ClassicalModular.p_power(1), 1)
        with mock.patch.dict(PREDICATES, {'pm1': explode}):
            with self.assertLogs('falsifier.registry', level='ERROR'):
                run = run_registry(space, small_budget(), predicates=['pm1'])
        report = run.results['pm1']
        self.assertEqual(report.verdict, Verdict.FAIL)
        self.assertEqual(report.violations[0].inputs['exception'], 'ZeroDivisionError')

    def test_unknown_predicate(self):
        space = PMSpace.reference(Family.RATIONAL_FROM, ClassicalModular.p_power(1), 1)
        with self.assertRaises(ValueError):
            run_registry(space, small_budget(), predicates=['pm5'])

    def test_reproducible(self):
        space = generate_instance(5, Family.RATIONAL_FROM, MutationKind.BREAK_PM3)
        first = run_registry(space, small_budget(5), predicates=['pm3', 'separation'])
        second = run_registry(space, small_budget(5), predicates=['pm3', 'separation'])
        self.assertEqual(first.results, second.results)

    def test_folded_report(self):
        space = PMSpace.reference(Family.RATIONAL_FROM, ClassicalModular.p_power(1), 1)
        report = run_registry(space, small_budget(), predicates=['pm1', 'pm3']).as_report()
        self.assertEqual(report.details['predicates'], {'pm1': 'pass', 'pm3': 'pass'})
        self.assertTrue(report.passed)

    @tag('acceptance')
    def test_every_mutation_is_detected(self):
        budget = SampleBudget.default()
        for mutation, target in TARGETS.items():
            detected = 0
            for seed in range(100):
                family = Family.values[seed % 2]
                space = generate_instance(seed, family, mutation)
                run = run_registry(space, budget.replace(rng_seed=seed), predicates=[target])
                detected += run.results[target].verdict == Verdict.FAIL
            self.assertGreaterEqual(detected, 95, mutation)

    @tag('acceptance')
    def test_no_false_alarms(self):
        budget = SampleBudget.default()
        for seed in range(100):
            space = generate_instance(seed, Family.values[seed % 2])
            run = run_registry(space, budget.replace(rng_seed=seed))
            self.assertEqual(run.failures(), [], (seed, space.describe()))
