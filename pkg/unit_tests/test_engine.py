import unittest

from fairness_probe.cache import EvalCache
from fairness_probe.engine import (group_score, causal_score, apparent_group_score, apparent_causal_score, GROUP,
                                   CAUSAL, APPARENT_GROUP, APPARENT_CAUSAL)
from fairness_probe.exceptions import SubjectCrashedError, SuiteError, UsageError
from fairness_probe.oracle import exhaustive_group, exhaustive_causal
from fairness_probe.sampler import SamplingConfig
from fairness_probe.schema import CharSubset, Input, enumerate_inputs
from fairness_probe.subjects.fixtures import FixtureSubject, parse_fixture
from fairness_probe.suites import OperationalProfile, TestSuite
from unit_tests.helpers import FailingSubject, make_schema


def fixture(text, schema):
    return FixtureSubject(parse_fixture(text), schema)


class TestGroupScore(unittest.TestCase):

    def test_fraction_exact(self):
        schema = make_schema(2, 100)
        result, suite = group_score(fixture('fraction:0:1:0.30,0.40', schema), schema, CharSubset((0,)),
                                    SamplingConfig(), EvalCache())
        self.assertAlmostEqual(result.score, 0.1, places=12)
        self.assertTrue(result.exact)
        self.assertEqual(result.margin, 0.0)
        self.assertEqual([(f.assignment, f.r) for f in result.group_frequencies], [((0,), 100), ((1,), 100)])
        self.assertEqual(result.tests_generated, 200)
        self.assertEqual(len(suite), 200)

    def test_loan_exact(self):
        schema = make_schema(2, 100)
        result, _ = group_score(fixture('fraction:0:1:0.23,0.65', schema), schema, CharSubset((0,)),
                                SamplingConfig(), EvalCache())
        self.assertAlmostEqual(result.score, 0.42, places=12)

    def test_fraction_sampled(self):
        schema = make_schema(2, 100)
        subject = fixture('fraction:0:1:0.30,0.40', schema)
        within = 0
        for seed in range(100):
            cfg = SamplingConfig(confidence=0.99, epsilon=0.05, exhaustive_limit=0, seed=seed)
            result, _ = group_score(subject, schema, CharSubset((0,)), cfg, EvalCache())
            self.assertFalse(result.exact)
            within += 0.0 <= result.score <= 0.2
        self.assertGreaterEqual(within, 99)

    def test_loan_sampled(self):
        schema = make_schema(2, 100)
        subject = fixture('fraction:0:1:0.23,0.65', schema)
        within = 0
        for seed in range(100):
            cfg = SamplingConfig(exhaustive_limit=0, seed=seed)
            result, _ = group_score(subject, schema, CharSubset((0,)), cfg, EvalCache())
            within += abs(result.score - 0.42) <= 0.1
        self.assertGreaterEqual(within, 99)

    def test_sampled_margin(self):
        schema = make_schema(2, 100)
        cfg = SamplingConfig(exhaustive_limit=0, seed=3)
        result, _ = group_score(fixture('fraction:0:1:0.30,0.40', schema), schema, CharSubset((0,)), cfg,
                                EvalCache())
        margins = [f.margin for f in result.group_frequencies]
        self.assertTrue(all(m < 0.05 for m in margins))
        self.assertEqual(result.margin, 2 * max(margins))
        self.assertEqual(result.score, max(f.p for f in result.group_frequencies) -
                         min(f.p for f in result.group_frequencies))
        self.assertEqual((result.confidence, result.epsilon, result.seed), (0.99, 0.05, 3))

    def test_max_samples(self):
        schema = make_schema(2, 2, 2, 2)
        cfg = SamplingConfig(exhaustive_limit=0, max_samples=50)
        with self.assertLogs('fairness_probe.engine', 'WARNING'):
            result, _ = group_score(fixture('xor:1:2', schema), schema, CharSubset((0,)), cfg, EvalCache())
        self.assertTrue(all(f.max_samples_hit and f.r == 50 for f in result.group_frequencies))

    def test_xor_masks_group(self):
        schema = make_schema(2, 2, 2)
        result, _ = group_score(fixture('xor:0:1', schema), schema, CharSubset((0,)), SamplingConfig(), EvalCache())
        self.assertEqual(result.score, 0.0)
        self.assertTrue(result.exact)

    def test_parallel_matches_sequential(self):
        schema = make_schema(3, 2, 2, 2)
        subject = fixture('table:9', schema)
        cfg = SamplingConfig(exhaustive_limit=0, seed=5)
        sequential, _ = group_score(subject, schema, CharSubset((0, 1)), cfg, EvalCache())
        parallel, _ = group_score(subject, schema, CharSubset((0, 1)), cfg, EvalCache(), workers=4)
        self.assertEqual(sequential.score, parallel.score)
        self.assertEqual(sequential.group_frequencies, parallel.group_frequencies)
        self.assertEqual(sequential.tests_generated, parallel.tests_generated)

    def test_empty_subset(self):
        schema = make_schema(2)
        with self.assertRaises(UsageError):
            group_score(fixture('const:true', schema), schema, CharSubset(()), SamplingConfig(), EvalCache())

    def test_partial_result(self):
        schema = make_schema(2, 2, 2)
        subject = FailingSubject(SubjectCrashedError("subject exited"), after=5)
        with self.assertRaises(SubjectCrashedError) as context:
            group_score(subject, schema, CharSubset((0,)), SamplingConfig(), EvalCache())
        partial = context.exception.partial
        self.assertEqual(partial.kind, GROUP)
        self.assertEqual(len(partial.group_frequencies), 1)
        self.assertEqual(partial.group_frequencies[0].assignment, (0,))


class TestCausalScore(unittest.TestCase):

    def test_xor_exact(self):
        schema = make_schema(2, 2, 2)
        result, _ = causal_score(fixture('xor:0:1', schema), schema, CharSubset((0,)), SamplingConfig(),
                                 EvalCache())
        self.assertEqual(result.kind, CAUSAL)
        self.assertEqual(result.score, 1.0)
        self.assertTrue(result.exact)
        self.assertEqual(result.margin, 0.0)

    def test_echo_char(self):
        schema = make_schema(2, 3, 3)
        cfg = SamplingConfig(exhaustive_limit=0)
        result, _ = causal_score(fixture('echo-char:0', schema), schema, CharSubset((0,)), cfg, EvalCache())
        self.assertEqual(result.score, 1.0)
        self.assertFalse(result.exact)
        self.assertEqual(result.margin, 0.0)
        self.assertEqual(result.tests_generated, 60)

    def test_const(self):
        schema = make_schema(2, 3, 3)
        result, _ = causal_score(fixture('const:false', schema), schema, CharSubset((0, 1, 2)), SamplingConfig(),
                                 EvalCache())
        self.assertEqual(result.score, 0.0)
        self.assertFalse(result.lower_bound)

    def test_inner_cap_lower_bound(self):
        schema = make_schema(2, 16)
        cfg = SamplingConfig(causal_inner_cap=1)
        result, _ = causal_score(fixture('threshold:1:15', schema), schema, CharSubset((1,)), cfg, EvalCache())
        self.assertTrue(result.lower_bound)
        self.assertFalse(result.exact)
        self.assertLess(result.score, 1.0)

    def test_not_below_group_score(self):
        schema = make_schema(3, 2, 2)
        for seed in range(5):
            subject = fixture(f'table:{seed}', schema)
            for subset in (CharSubset((0,)), CharSubset((1, 2)), CharSubset((0, 2))):
                group, _ = group_score(subject, schema, subset, SamplingConfig(), EvalCache())
                causal, _ = causal_score(subject, schema, subset, SamplingConfig(), EvalCache())
                self.assertLessEqual(group.score, causal.score + 1e-12)

    def test_reproducible(self):
        schema = make_schema(2, 2, 3, 4)
        subject = fixture('table:2', schema)
        cfg = SamplingConfig(exhaustive_limit=0, seed=17)
        first, first_suite = causal_score(subject, schema, CharSubset((1, 2)), cfg, EvalCache())
        second, second_suite = causal_score(subject, schema, CharSubset((1, 2)), cfg, EvalCache())
        self.assertEqual(first, second)
        self.assertEqual(first_suite, second_suite)


class TestApparentScores(unittest.TestCase):

    def setUp(self):
        self.schema = make_schema(2, 2)
        self.subject = fixture('threshold:1:1', self.schema)

    def test_group(self):
        suite = TestSuite([Input((0, 0)), Input((0, 1)), Input((1, 0))])
        result = apparent_group_score(self.subject, self.schema, CharSubset((0,)), suite, EvalCache())
        self.assertEqual(result.kind, APPARENT_GROUP)
        self.assertEqual(result.score, 0.5)
        self.assertEqual([(f.p, f.r) for f in result.group_frequencies], [(0.5, 2), (0.0, 1)])
        self.assertIsNone(result.confidence)
        self.assertEqual(result.source, 'suite')

    def test_group_skips_missing_groups(self):
        suite = TestSuite([Input((0, 0)), Input((0, 1))])
        result = apparent_group_score(self.subject, self.schema, CharSubset((0,)), suite, EvalCache())
        self.assertEqual(result.score, 0.0)
        self.assertEqual(len(result.group_frequencies), 1)

    def test_causal_suite(self):
        suite = TestSuite([Input((0, 0)), Input((0, 1)), Input((1, 0))])
        result = apparent_causal_score(self.subject, self.schema, CharSubset((1,)), suite, SamplingConfig(),
                                       EvalCache())
        self.assertEqual(result.kind, APPARENT_CAUSAL)
        self.assertAlmostEqual(result.score, 2 / 3)
        self.assertEqual(result.tests_generated, 3)

    def test_causal_profile(self):
        profile = OperationalProfile.from_mapping(self.schema, {'c1': {'v0': 1}})
        result = apparent_causal_score(self.subject, self.schema, CharSubset((1,)), profile, SamplingConfig(),
                                       EvalCache())
        self.assertEqual(result.score, 1.0)
        self.assertEqual(result.source, 'profile')
        self.assertIsNone(result.confidence)
        self.assertIsNone(result.margin)

    def test_causal_profile_masked(self):
        profile = OperationalProfile.uniform(self.schema)
        result = apparent_causal_score(self.subject, self.schema, CharSubset((0,)), profile, SamplingConfig(),
                                       EvalCache())
        self.assertEqual(result.score, 0.0)

    def test_empty_suite(self):
        with self.assertRaises(SuiteError):
            apparent_group_score(self.subject, self.schema, CharSubset((0,)), TestSuite(), EvalCache())
        with self.assertRaises(SuiteError):
            apparent_causal_score(self.subject, self.schema, CharSubset((0,)), TestSuite(), SamplingConfig(),
                                  EvalCache())


class TestApparentAgainstOracle(unittest.TestCase):

    def test_full_suite_matches_exhaustive(self):
        schema = make_schema(2, 3, 2)
        subject = fixture('table:11', schema)
        suite = TestSuite(enumerate_inputs(schema))
        for subset in (CharSubset((0,)), CharSubset((1,)), CharSubset((1, 2)), CharSubset((0, 1, 2))):
            group = apparent_group_score(subject, schema, subset, suite, EvalCache())
            causal = apparent_causal_score(subject, schema, subset, suite, SamplingConfig(), EvalCache())
            self.assertAlmostEqual(group.score, exhaustive_group(subject, schema, subset, EvalCache())[0], places=12)
            self.assertAlmostEqual(causal.score, exhaustive_causal(subject, schema, subset, EvalCache()), places=12)

    def test_correlated_suite_shows_apparent_group_only(self):
        # income alone decides; in the suite, older inputs mostly have high income
        schema = make_schema(2, 2, 4, names=['age', 'income', 'region'])
        subject = fixture('threshold:1:1', schema)
        suite = TestSuite([Input((0, 0, 0)), Input((0, 0, 1)), Input((0, 0, 2)), Input((0, 1, 3)),
                           Input((1, 1, 0)), Input((1, 1, 1)), Input((1, 1, 2)), Input((1, 0, 3))])
        age = CharSubset((0,))
        apparent = apparent_group_score(subject, schema, age, suite, EvalCache())
        self.assertEqual([f.p for f in apparent.group_frequencies], [0.25, 0.75])
        self.assertEqual(apparent.score, 0.5)
        causal, _ = causal_score(subject, schema, age, SamplingConfig(), EvalCache())
        self.assertTrue(causal.exact)
        self.assertEqual(causal.score, 0.0)
        self.assertEqual(apparent_causal_score(subject, schema, age, suite, SamplingConfig(), EvalCache()).score, 0.0)

    def test_uniform_profile_tracks_causal_score(self):
        schema = make_schema(2, 3, 2, 2)
        subject = fixture('table:3', schema)
        profile = OperationalProfile.uniform(schema)
        for subset in (CharSubset((0,)), CharSubset((1,)), CharSubset((2, 3))):
            exact, _ = causal_score(subject, schema, subset, SamplingConfig(), EvalCache())
            apparent = apparent_causal_score(subject, schema, subset, profile, SamplingConfig(seed=8), EvalCache())
            self.assertTrue(exact.exact)
            self.assertLessEqual(abs(apparent.score - exact.score), 0.1)
