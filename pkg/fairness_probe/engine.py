"""Group, causal and apparent discrimination scores.

group_score fixes every assignment of the subset's characteristics in turn and estimates, for each group, the fraction
of inputs the subject accepts; the score is the largest fraction minus the smallest. causal_score estimates the
fraction of inputs for which changing only the subset's characteristics changes the decision. The apparent variants
apply the same measurements to a given test suite or operational profile instead of the full input domain.

Estimates are adaptive (see sampler.py) unless the constrained domain is small enough to enumerate, in which case the
value is exact.

"""

from __future__ import annotations

import itertools
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

from .exceptions import SubjectError, SuiteError, UsageError
from .sampler import (SamplingConfig, AdaptiveEstimator, margin_of_error, should_stop, stream_rng, random_input,
                      profile_input, perturbations, GROUP_STREAM, CAUSAL_STREAM, PERTURBATION_STREAM,
                      APPARENT_CAUSAL_STREAM)
from .schema import CharSubset, Input, Schema, enumerate_assignments, enumerate_inputs
from .settings import GROUP_COUNT_WARNING
from .subjects import default_distance
from .suites import TestSuite, OperationalProfile

logger = logging.getLogger(__name__)

GROUP = 'group'
CAUSAL = 'causal'
APPARENT_GROUP = 'apparent-group'
APPARENT_CAUSAL = 'apparent-causal'


@dataclass(frozen=True)
class GroupFrequency:

    """Estimated fraction of true decisions for one group.

    Attributes:
        assignment (tuple): Label indices fixed for the subset's characteristics, in subset order.
        p (float): Fraction of true decisions.
        r (int): Number of inputs behind p.
        margin (float or None): Margin of error of p at the run's confidence; None for suite-based frequencies.
        exhaustive (bool): Whether every input of the group was evaluated.
        max_samples_hit (bool): Whether sampling stopped at the sample cap before reaching the margin.

    """

    assignment: tuple
    p: float
    r: int
    margin: Optional[float] = None
    exhaustive: bool = False
    max_samples_hit: bool = False


@dataclass(frozen=True)
class ScoreResult:

    """A discrimination measurement.

    For the group kinds, score equals the max minus the min of the reported group frequencies. The score margin of a
    group score is twice the largest per-group margin; apparent kinds carry no confidence.

    """

    kind: str
    subset: CharSubset
    score: float
    confidence: Optional[float] = None
    epsilon: Optional[float] = None
    margin: Optional[float] = None
    group_frequencies: tuple = ()
    tests_generated: int = 0
    cache_hits: int = 0
    exact: bool = False
    lower_bound: bool = False
    seed: Optional[int] = None
    source: Optional[str] = None


@dataclass
class _Tally:
    tests: int = 0
    hits: int = 0
    suite: TestSuite = field(default_factory=TestSuite)

    def evaluate(self, cache, subject, input, schema):
        decision, hit = cache.lookup(subject, input, schema)
        self.tests += 1
        self.hits += hit
        self.suite.add(input)
        return decision


def _merge(tallies):
    merged = _Tally()
    for tally in tallies:
        merged.tests += tally.tests
        merged.hits += tally.hits
        for input in tally.suite:
            merged.suite.add(input)
    return merged


def _require_subset(subset):
    if not len(subset):
        raise UsageError("discrimination scores need a non-empty subset")


def _estimate_group(subject, schema, subset, group_index, assignment, cfg, cache):
    tally = _Tally()
    fixed = dict(zip(subset, assignment))
    free = [i for i in range(schema.n) if i not in fixed]
    counts = schema.label_counts
    constrained = math.prod(counts[i] for i in free)

    if constrained <= cfg.exhaustive_limit:
        accepted = 0
        values = [0] * schema.n
        for position, value in fixed.items():
            values[position] = value
        for free_values in itertools.product(*(range(counts[i]) for i in free)):
            for position, value in zip(free, free_values):
                values[position] = value
            accepted += tally.evaluate(cache, subject, Input(tuple(values)), schema)
        return GroupFrequency(tuple(assignment), accepted / constrained, constrained, 0.0, exhaustive=True), tally

    rng = stream_rng(cfg.seed, GROUP_STREAM, subset, group_index)
    estimator = AdaptiveEstimator()
    while not should_stop(estimator, cfg):
        estimator.observe(tally.evaluate(cache, subject, random_input(schema, fixed, rng), schema))
    margin = margin_of_error(estimator, cfg.confidence)
    capped = margin >= cfg.epsilon
    if capped:
        logger.warning(f"group {assignment} of subset {list(subset)} stopped at {estimator.r} samples "
                       f"with margin {margin:.4f}")
    return GroupFrequency(tuple(assignment), estimator.p, estimator.r, margin, max_samples_hit=capped), tally


def _group_result(kind, subset, frequencies, cfg, tally):
    ps = [f.p for f in frequencies]
    return ScoreResult(
        kind=kind,
        subset=subset,
        score=max(ps) - min(ps) if ps else 0.0,
        confidence=cfg.confidence,
        epsilon=cfg.epsilon,
        margin=2 * max((f.margin for f in frequencies), default=0.0),
        group_frequencies=tuple(frequencies),
        tests_generated=tally.tests,
        cache_hits=tally.hits,
        exact=bool(frequencies) and all(f.exhaustive for f in frequencies),
        seed=cfg.seed,
    )


def group_score(subject, schema: Schema, subset: CharSubset, cfg: SamplingConfig, cache, workers=1):
    """Estimate the group discrimination score of subject with respect to subset.

    Every assignment of labels to the subset's characteristics is a group. Each group's fraction of true decisions
    is estimated independently on its own pseudorandom stream, so workers > 1 evaluates groups concurrently without
    changing any result.

    Args:
        subject (Subject): The subject under test.
        schema (Schema): The input type.
        subset (CharSubset): Non-empty set of characteristics to fix.
        cfg (SamplingConfig): Confidence, margin, caps and seed.
        cache (EvalCache): Shared decision cache.
        workers (int): Number of threads estimating groups.

    Returns:
        (ScoreResult, TestSuite): The score and every input generated to compute it.

    Raises:
        SubjectError: With the groups finished so far attached as a partial ScoreResult.

    """
    _require_subset(subset)
    assignments = list(enumerate_assignments(schema, subset))
    if len(assignments) > GROUP_COUNT_WARNING:
        logger.warning(f"subset {list(subset)} has {len(assignments)} groups")

    done = []
    try:
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as executor:
                futures = [executor.submit(_estimate_group, subject, schema, subset, index, assignment, cfg, cache)
                           for index, assignment in enumerate(assignments)]
                for future in futures:
                    done.append(future.result())
        else:
            for index, assignment in enumerate(assignments):
                done.append(_estimate_group(subject, schema, subset, index, assignment, cfg, cache))
    except SubjectError as error:
        error.partial = _group_result(GROUP, subset, [f for f, _ in done], cfg, _merge(t for _, t in done))
        raise

    tally = _merge(t for _, t in done)
    return _group_result(GROUP, subset, [f for f, _ in done], cfg, tally), tally.suite


class _CausalCheck(object):

    """Decides, for one base input, whether changing the subset's characteristics changes the decision."""

    def __init__(self, subject, schema, subset, cfg, cache, tally, distance):
        self.subject = subject
        self.schema = schema
        self.subset = subset
        self.cfg = cfg
        self.cache = cache
        self.tally = tally
        self.distance = distance
        self.rng = stream_rng(cfg.seed, PERTURBATION_STREAM, subset)
        self.count = math.prod(schema.label_counts[i] for i in subset) - 1
        self.truncated = 0

    def __call__(self, base: Input) -> bool:
        decision = self.tally.evaluate(self.cache, self.subject, base, self.schema)
        # stops at the first perturbation whose decision differs
        stream = perturbations(base, self.subset, self.schema, self.rng, self.cfg.permutation_limit)
        for other in itertools.islice(stream, self.cfg.causal_inner_cap):
            if self.distance(decision, self.tally.evaluate(self.cache, self.subject, other, self.schema)) > 0:
                return True
        # no flip found; if perturbations were left unexamined the result is only a lower bound
        if self.count > self.cfg.causal_inner_cap:
            self.truncated += 1
            logger.debug(f"base input {list(base.values)} capped at {self.cfg.causal_inner_cap} perturbations")
        return False


def _causal_result(kind, subset, estimator, margin, cfg, tally, check, exact, confidence=True, source=None):
    if check.truncated:
        logger.info(f"subset {list(subset)}: {check.truncated} base inputs hit the inner cap, score is a lower bound")
    return ScoreResult(
        kind=kind,
        subset=subset,
        score=estimator.p,
        confidence=cfg.confidence if confidence else None,
        epsilon=cfg.epsilon if confidence else None,
        margin=margin if confidence else None,
        tests_generated=tally.tests,
        cache_hits=tally.hits,
        exact=exact and not check.truncated,
        lower_bound=bool(check.truncated),
        seed=cfg.seed,
        source=source,
    )


def _adaptive_causal(kind, draw, subject, schema, subset, cfg, cache, distance, confidence=True, source=None):
    tally = _Tally()
    check = _CausalCheck(subject, schema, subset, cfg, cache, tally, distance)
    estimator = AdaptiveEstimator()
    try:
        while not should_stop(estimator, cfg):
            estimator.observe(check(draw()))
    except SubjectError as error:
        error.partial = _causal_result(kind, subset, estimator, None, cfg, tally, check, False, confidence, source)
        raise
    margin = margin_of_error(estimator, cfg.confidence)
    if margin >= cfg.epsilon:
        logger.warning(f"causal estimate for subset {list(subset)} stopped at {estimator.r} samples "
                       f"with margin {margin:.4f}")
    return _causal_result(kind, subset, estimator, margin, cfg, tally, check, False, confidence, source), tally.suite


def causal_score(subject, schema: Schema, subset: CharSubset, cfg: SamplingConfig, cache, distance=default_distance):
    """Estimate the causal discrimination score of subject with respect to subset.

    Base inputs are drawn uniformly (or all of them enumerated when the domain is small); for each one, perturbations
    over the subset are examined in a seeded order until one changes the decision, at most causal_inner_cap of them.
    When the cap cuts a search short the score is flagged as a lower bound.

    Returns:
        (ScoreResult, TestSuite): The score and every input generated to compute it.

    """
    _require_subset(subset)
    if schema.domain_size <= cfg.exhaustive_limit:
        tally = _Tally()
        check = _CausalCheck(subject, schema, subset, cfg, cache, tally, distance)
        estimator = AdaptiveEstimator()
        try:
            for base in enumerate_inputs(schema):
                estimator.observe(check(base))
        except SubjectError as error:
            error.partial = _causal_result(CAUSAL, subset, estimator, None, cfg, tally, check, False)
            raise
        return _causal_result(CAUSAL, subset, estimator, 0.0, cfg, tally, check, True), tally.suite

    rng = stream_rng(cfg.seed, CAUSAL_STREAM, subset)
    return _adaptive_causal(CAUSAL, lambda: random_input(schema, {}, rng), subject, schema, subset, cfg, cache,
                            distance)


def _require_suite(suite):
    if not len(suite):
        raise SuiteError("apparent scores need a non-empty test suite")


def apparent_group_score(subject, schema: Schema, subset: CharSubset, suite: TestSuite, cache) -> ScoreResult:
    """Group discrimination score over the inputs of suite only.

    Groups without any suite member are skipped. No confidence is reported: the value is only as representative as
    the suite.

    """
    _require_subset(subset)
    _require_suite(suite)
    tally = _Tally()
    groups = {}
    for input in suite:
        decision = tally.evaluate(cache, subject, input, schema)
        accepted, total = groups.get(tuple(input[i] for i in subset), (0, 0))
        groups[tuple(input[i] for i in subset)] = (accepted + decision, total + 1)
    frequencies = [GroupFrequency(assignment, accepted / total, total)
                   for assignment, (accepted, total) in sorted(groups.items())]
    ps = [f.p for f in frequencies]
    return ScoreResult(
        kind=APPARENT_GROUP,
        subset=subset,
        score=max(ps) - min(ps),
        group_frequencies=tuple(frequencies),
        tests_generated=tally.tests,
        cache_hits=tally.hits,
        source='suite',
    )


def apparent_causal_score(subject, schema: Schema, subset: CharSubset, source, cfg: SamplingConfig, cache,
                          distance=default_distance) -> ScoreResult:
    """Causal discrimination score over a test suite or an operational profile.

    With a TestSuite, an input counts when another suite member differing only within subset gets a different
    decision; counterparts outside the suite are never evaluated. With an OperationalProfile, base inputs are drawn
    from the profile and perturbed freely over the full label sets, with adaptive stopping.

    """
    _require_subset(subset)
    if isinstance(source, OperationalProfile):
        rng = stream_rng(cfg.seed, APPARENT_CAUSAL_STREAM, subset)
        result, _ = _adaptive_causal(APPARENT_CAUSAL, lambda: profile_input(schema, source, rng), subject, schema,
                                     subset, cfg, cache, distance, confidence=False, source='profile')
        return result

    _require_suite(source)
    tally = _Tally()
    outside = [i for i in range(schema.n) if i not in subset]
    buckets = {}
    for input in source:
        decision = tally.evaluate(cache, subject, input, schema)
        buckets.setdefault(tuple(input[i] for i in outside), []).append(decision)
    discriminated = 0
    for decisions in buckets.values():
        seen = set(decisions)
        discriminated += sum(any(distance(decision, other) > 0 for other in seen) for decision in decisions)
    return ScoreResult(
        kind=APPARENT_CAUSAL,
        subset=subset,
        score=discriminated / len(source),
        tests_generated=tally.tests,
        cache_hits=tally.hits,
        source='suite',
    )
