"""Discrimination search: all minimal characteristic subsets whose discrimination score reaches a threshold.

Subsets are visited by size. A subset containing an already recorded discriminating subset is skipped without being
scored: group and causal scores never decrease when characteristics are added, so such a subset discriminates and is
not minimal. Optionally, a causal search first computes the (often cheaper) group score, since a subset's causal
score is never below its group score.

"""

from __future__ import annotations

import itertools
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, List, Optional

from .engine import ScoreResult, group_score, causal_score, GROUP, CAUSAL
from .exceptions import SubjectError, UsageError
from .sampler import SamplingConfig
from .schema import CharSubset, Schema, enumerate_subsets

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SearchConfig:

    """Parameters of a discrimination search.

    Attributes:
        theta (float): Threshold in [0, 1] a score must reach.
        kind (str): group or causal.
        max_subset_size (int or None): Largest subset visited; None means every characteristic.
        sampling (SamplingConfig): Sampling parameters of every score.
        use_group_shortcut (bool): For causal searches, accept a subset whose group score reaches theta.
        prune (bool): Skip supersets of recorded subsets. Without pruning every subset is scored.
        workers (int): Threads scoring the subsets of one size tier.

    """

    theta: float = 0.5
    kind: str = CAUSAL
    max_subset_size: Optional[int] = None
    sampling: SamplingConfig = field(default_factory=SamplingConfig)
    use_group_shortcut: bool = False
    prune: bool = True
    workers: int = 1

    def __post_init__(self):
        if not 0 <= self.theta <= 1:
            raise UsageError(f"threshold must be in [0, 1], got {self.theta}")
        if self.kind not in (GROUP, CAUSAL):
            raise UsageError(f"search kind must be group or causal, got {self.kind!r}")

    @classmethod
    def from_settings(cls, settings, max_subset_size=None):
        """Create a search config from a scrapy Settings object."""
        return cls(
            theta=settings.getfloat('THRESHOLD'),
            kind=settings.get('SEARCH_KIND'),
            max_subset_size=max_subset_size,
            sampling=SamplingConfig.from_settings(settings),
            use_group_shortcut=settings.getbool('GROUP_SHORTCUT'),
            prune=settings.getbool('PRUNE'),
            workers=settings.getint('PARALLEL_WORKERS'),
        )


@dataclass
class SearchResult:

    """Minimal discriminating subsets with the cost of finding them.

    Attributes:
        minimal_sets (list): (CharSubset, ScoreResult) pairs forming an antichain under inclusion.
        subsets_evaluated (int): Subsets actually scored.
        subsets_pruned (int): Subsets skipped because they contain a recorded discriminating subset.
        tests_total (int): Sum of the tests generated by every score computed.
        pruned (list): The skipped subsets.
        lattice_size (int): Subsets a search without pruning would score.

    """

    minimal_sets: List = field(default_factory=list)
    subsets_evaluated: int = 0
    subsets_pruned: int = 0
    tests_total: int = 0
    pruned: List = field(default_factory=list)
    lattice_size: int = 0

    @property
    def reduction_factor(self):
        return self.lattice_size / self.subsets_evaluated if self.subsets_evaluated else None


def would_prune(discriminating: List[CharSubset], candidate: CharSubset) -> bool:
    """True iff some recorded discriminating subset is contained in candidate."""
    return any(recorded.issubset(candidate) for recorded in discriminating)


def minimal_antichain(scored: Dict[CharSubset, float], theta: float) -> List[CharSubset]:
    """Qualifying subsets (score at least theta) none of whose proper subsets qualifies, in enumeration order."""
    minimal = []
    for subset in sorted(scored, key=lambda s: (len(s), s.indices)):
        if scored[subset] >= theta and not would_prune(minimal, subset):
            minimal.append(subset)
    return minimal


def exact_result(kind: str, subset: CharSubset, score: float) -> ScoreResult:
    return ScoreResult(kind=kind, subset=subset, score=score, margin=0.0, exact=True)


def engine_scorer(subject, schema: Schema, cfg: SearchConfig, cache) -> Callable[[CharSubset], ScoreResult]:
    """Scorer running the adaptive engine for cfg.kind, with the group shortcut when enabled."""
    sampling = cfg.sampling

    def score(subset):
        if cfg.kind == GROUP:
            return group_score(subject, schema, subset, sampling, cache)[0]
        if cfg.use_group_shortcut:
            group = group_score(subject, schema, subset, sampling, cache)[0]
            if group.score >= cfg.theta:
                logger.debug(f"subset {list(subset)} accepted by its group score {group.score:.4f}")
                return group
            causal = causal_score(subject, schema, subset, sampling, cache)[0]
            return replace(causal, tests_generated=causal.tests_generated + group.tests_generated,
                           cache_hits=causal.cache_hits + group.cache_hits)
        return causal_score(subject, schema, subset, sampling, cache)[0]

    return score


def discrimination_search(subject, schema: Schema, cfg: SearchConfig, cache,
                          scorer: Optional[Callable[[CharSubset], ScoreResult]] = None) -> SearchResult:
    """Find every minimal subset of characteristics whose score reaches cfg.theta.

    Args:
        subject (Subject): The subject under test.
        schema (Schema): The input type.
        cfg (SearchConfig): Threshold, kind, pruning and sampling parameters.
        cache (EvalCache): Shared decision cache.
        scorer (callable): Optional replacement for the engine, mapping a subset to its ScoreResult.

    Returns:
        result (SearchResult): The minimal sets and the search statistics.

    Raises:
        SubjectError: With the search statistics so far attached as a partial SearchResult.

    """
    max_size = cfg.max_subset_size or schema.n
    if not 1 <= max_size <= schema.n:
        raise UsageError(f"max subset size {max_size} out of range 1..{schema.n}")
    scorer = scorer or engine_scorer(subject, schema, cfg, cache)
    result = SearchResult(lattice_size=sum(math.comb(schema.n, i) for i in range(1, max_size + 1)))
    recorded = []
    scored = {}
    executor = ThreadPoolExecutor(max_workers=cfg.workers) if cfg.workers > 1 else None

    try:
        for size, tier in itertools.groupby(enumerate_subsets(schema, max_size), key=len):
            candidates = []
            for subset in tier:
                if cfg.prune and would_prune([s for s, _ in recorded], subset):
                    logger.debug(f"pruned {list(subset)}")
                    result.pruned.append(subset)
                    result.subsets_pruned += 1
                else:
                    candidates.append(subset)
            logger.info(f"tier {size}: scoring {len(candidates)} subsets, {result.subsets_pruned} pruned so far")

            scores = executor.map(scorer, candidates) if executor else map(scorer, candidates)
            for subset, score in zip(candidates, scores):
                result.subsets_evaluated += 1
                result.tests_total += score.tests_generated
                if not cfg.prune:
                    scored[subset] = score
                elif score.score >= cfg.theta:
                    recorded.append((subset, score))
            result.minimal_sets = list(recorded)
    except SubjectError as error:
        result.minimal_sets = list(recorded)
        error.partial = result
        raise
    finally:
        if executor:
            executor.shutdown()

    if not cfg.prune:
        minimal = minimal_antichain({s: r.score for s, r in scored.items()}, cfg.theta)
        result.minimal_sets = [(subset, scored[subset]) for subset in minimal]
    logger.info(f"search found {len(result.minimal_sets)} minimal sets after scoring {result.subsets_evaluated} "
                f"of {result.lattice_size} subsets")
    return result
