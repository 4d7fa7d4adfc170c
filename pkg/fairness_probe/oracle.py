"""Exhaustive ground truth on small domains.

The oracle evaluates every input of the domain and computes group and causal scores straight from their definitions:
group scores from the true-fraction of each equivalence class of inputs sharing the subset's labels, causal scores
from the classes of inputs agreeing outside the subset. It shares the decision cache with the engine but none of the
sampling code, so it can check the engine independently.

"""

from __future__ import annotations

import logging
from typing import Dict

from .exceptions import BoundExceededError
from .schema import CharSubset, Schema, enumerate_inputs, enumerate_subsets
from .search import SearchResult, exact_result, minimal_antichain
from .settings import ORACLE_DOMAIN_BOUND, ORACLE_SUBSET_BOUND

logger = logging.getLogger(__name__)


def _decisions(subject, schema, cache, bound):
    if schema.domain_size > bound:
        raise BoundExceededError(f"domain of {schema.domain_size} inputs exceeds the oracle bound {bound}")
    return [(input, cache.lookup(subject, input, schema)[0]) for input in enumerate_inputs(schema)]


def exhaustive_group(subject, schema: Schema, subset: CharSubset, cache, bound=ORACLE_DOMAIN_BOUND):
    """Exact group discrimination score and exact per-group frequencies.

    Returns:
        (float, dict): The score and a mapping from assignment (label indices in subset order) to its fraction.

    """
    classes = {}
    for input, decision in _decisions(subject, schema, cache, bound):
        accepted, total = classes.get(tuple(input[i] for i in subset), (0, 0))
        classes[tuple(input[i] for i in subset)] = (accepted + decision, total + 1)
    frequencies = {assignment: accepted / total for assignment, (accepted, total) in sorted(classes.items())}
    return max(frequencies.values()) - min(frequencies.values()), frequencies


def exhaustive_causal(subject, schema: Schema, subset: CharSubset, cache, bound=ORACLE_DOMAIN_BOUND) -> float:
    """Exact fraction of inputs having a counterpart, differing only within subset, with a different decision."""
    classes = {}
    decisions = _decisions(subject, schema, cache, bound)
    for input, decision in decisions:
        key = tuple(v for i, v in enumerate(input) if i not in subset)
        classes.setdefault(key, set()).add(decision)
    discriminated = sum(len(outcomes) > 1 for outcomes in classes.values())
    class_size = schema.domain_size // len(classes)
    return discriminated * class_size / len(decisions)


def score_table(subject, schema: Schema, kind: str, cache, bound=ORACLE_DOMAIN_BOUND,
                subset_bound=ORACLE_SUBSET_BOUND) -> Dict[CharSubset, float]:
    """Exact score of every non-empty subset."""
    if 2 ** schema.n - 1 > subset_bound:
        raise BoundExceededError(f"{2 ** schema.n - 1} subsets exceed the oracle bound {subset_bound}")
    table = {}
    for subset in enumerate_subsets(schema, schema.n):
        if kind == 'group':
            table[subset] = exhaustive_group(subject, schema, subset, cache, bound)[0]
        else:
            table[subset] = exhaustive_causal(subject, schema, subset, cache, bound)
    return table


def exhaustive_search(subject, schema: Schema, theta: float, kind: str, cache, bound=ORACLE_DOMAIN_BOUND,
                      subset_bound=ORACLE_SUBSET_BOUND):
    """Score every subset exactly and return the minimal discriminating antichain as a SearchResult."""
    table = score_table(subject, schema, kind, cache, bound, subset_bound)
    minimal = minimal_antichain(table, theta)
    logger.info(f"oracle search over {len(table)} subsets found {len(minimal)} minimal sets")
    return SearchResult(
        minimal_sets=[(subset, exact_result(kind, subset, table[subset])) for subset in minimal],
        subsets_evaluated=len(table),
        subsets_pruned=0,
        tests_total=len(table) * schema.domain_size,
        lattice_size=len(table),
    )
