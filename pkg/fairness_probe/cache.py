"""Test caching: memoize subject decisions keyed by the full input valuation.

One cache serves a whole run, shared by group, causal and apparent scores and by every subset a search visits. It is
safe for concurrent use: a miss in flight for an input makes other callers wait for that evaluation instead of
running the subject again.

The optional record file holds one entry per line: the comma-joined label indices, a tab, and 0 or 1.

"""

from __future__ import annotations

import logging
import threading

from .exceptions import DeterminismError, SchemaError
from .sampler import stream_rng, VERIFY_STREAM
from .schema import Input, Schema, labels_of
from .subjects import Subject, evaluate_raw

logger = logging.getLogger(__name__)


class EvalCache(object):

    """Mapping from input to decision with exact hit and miss counters.

    Attributes:
        enabled (bool): When False every lookup is a miss and nothing is stored.
        verify_fraction (float): Fraction of hits re-evaluated to check determinism; 0 disables verification.
        hits (int): Lookups answered from the cache.
        misses (int): Lookups that ran the subject, including the ones that failed.

    """

    def __init__(self, enabled=True, verify_fraction=0.0, seed=0):
        self.enabled = enabled
        self.verify_fraction = verify_fraction
        self.hits = 0
        self.misses = 0
        self.errors = 0
        self._entries = {}
        self._in_flight = {}
        self._lock = threading.Lock()
        self._verify_rng = stream_rng(seed, VERIFY_STREAM)

    def __len__(self):
        return len(self._entries)

    def __contains__(self, input):
        return input.values in self._entries

    def lookup(self, subject: Subject, input: Input, schema: Schema):
        """Return (decision, hit) for input, running the subject only on a miss."""
        key = input.values
        if not self.enabled:
            with self._lock:
                self.misses += 1
            try:
                return evaluate_raw(subject, input, schema), False
            except Exception:
                with self._lock:
                    self.errors += 1
                raise

        while True:
            with self._lock:
                if key in self._entries:
                    self.hits += 1
                    decision = self._entries[key]
                    verify = self.verify_fraction > 0 and self._verify_rng.random() < self.verify_fraction
                    break
                flight = self._in_flight.get(key)
                owner = flight is None
                if owner:
                    flight = self._in_flight[key] = threading.Event()
            if not owner:
                flight.wait()
                continue
            try:
                decision = evaluate_raw(subject, input, schema)
            except Exception:
                with self._lock:
                    self.misses += 1
                    self.errors += 1
                    del self._in_flight[key]
                flight.set()
                raise
            with self._lock:
                self.misses += 1
                self._entries[key] = decision
                del self._in_flight[key]
            flight.set()
            return decision, False

        if verify:
            again = evaluate_raw(subject, input, schema)
            if again != decision:
                request = ','.join(labels_of(schema, input))
                logger.error(f"{self.__class__.__name__} subject answered {request} with {decision} then {again}")
                raise DeterminismError(f"non-deterministic subject: {decision} then {again}", request=request)
        return decision, True

    def stats(self):
        """Return the hit, miss and entry counts as a dict."""
        with self._lock:
            return {'hits': self.hits, 'misses': self.misses, 'entries': len(self._entries)}

    def items(self):
        """Return every cached (label indices, decision) pair, sorted by label indices."""
        with self._lock:
            return sorted(self._entries.items())

    def store(self, input: Input, decision: bool):
        """Seed the cache with a known decision, refusing to overwrite a different one."""
        with self._lock:
            known = self._entries.setdefault(input.values, decision)
        if known != decision:
            raise DeterminismError(f"conflicting cached decisions for {list(input.values)}")


def evaluate_cached(cache: EvalCache, subject: Subject, input: Input, schema: Schema) -> bool:
    """Decision for input, from the cache on a hit, from the subject (then stored) on a miss."""
    return cache.lookup(subject, input, schema)[0]


def cache_stats(cache: EvalCache) -> dict:
    """Exact counters: hits, misses and entries (misses minus the misses whose evaluation failed)."""
    return cache.stats()


def load_cache(cache: EvalCache, path, schema: Schema) -> EvalCache:
    """Fill cache from a record file written by save_cache."""
    with open(path, encoding='utf-8') as f:
        for number, line in enumerate(f, start=1):
            try:
                indices, decision = line.rstrip('\n').split('\t')
                input = schema.validate(Input(tuple(int(v) for v in indices.split(','))))
                if decision not in ('0', '1'):
                    raise ValueError(decision)
            except (ValueError, SchemaError) as error:
                raise SchemaError(f"{path}:{number}: malformed cache record {line!r}: {error}") from None
            cache.store(input, decision == '1')
    logger.info(f"loaded {len(cache)} cached decisions from {path}")
    return cache


def save_cache(cache: EvalCache, path):
    """Write every cached decision to a record file.

    Records are sorted by label indices, so the same cache always produces the same file.

    Args:
        cache (EvalCache): The cache to save.
        path (str): Destination of the record file; overwritten.

    """
    with open(path, 'w', encoding='utf-8', newline='\n') as f:
        for values, decision in cache.items():
            f.write(f"{','.join(str(v) for v in values)}\t{1 if decision else 0}\n")
    logger.info(f"saved {len(cache)} cached decisions to {path}")
