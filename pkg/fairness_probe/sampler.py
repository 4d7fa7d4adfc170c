"""Seeded input generation and the adaptive, confidence-driven stopping rule.

Every pseudorandom stream is a numpy Generator over a PCG64 bit generator whose SeedSequence is keyed by the run seed
plus a spawn key naming the logical task (stream kind, subset, group). Streams therefore never depend on the order in
which tasks are evaluated.

The stopping rule is the uncorrected Wald interval: with p the observed proportion after r samples, sampling stops
once r reaches the sampling threshold and z* sqrt(p(1 - p) / r) drops below epsilon, or when r reaches max_samples.

"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Iterator, Mapping

import numpy as np
from scipy.stats import norm

from .exceptions import UsageError, SchemaError
from .schema import Input, CharSubset, Schema

GROUP_STREAM = 0
CAUSAL_STREAM = 1
PERTURBATION_STREAM = 2
APPARENT_CAUSAL_STREAM = 3
SUITE_STREAM = 4
VERIFY_STREAM = 5


@dataclass(frozen=True)
class SamplingConfig:

    """Sampling parameters shared by every estimator of a run.

    Attributes:
        confidence (float): Confidence level in (0, 1).
        epsilon (float): Error margin in (0, 1).
        max_samples (int): Hard cap on samples per estimator.
        sampling_threshold (int): Minimum samples before the margin test.
        seed (int): Run seed, a non-negative 64-bit value.
        exhaustive_limit (int): Enumerate instead of sampling when the constrained domain is this small.
        causal_inner_cap (int): Perturbations examined per base input.
        permutation_limit (int): Largest perturbation count shuffled with a full permutation.

    """

    confidence: float = 0.99
    epsilon: float = 0.05
    max_samples: int = 100000
    sampling_threshold: int = 30
    seed: int = 0
    exhaustive_limit: int = 1024
    causal_inner_cap: int = 256
    permutation_limit: int = 65536

    def __post_init__(self):
        if not 0 < self.confidence < 1:
            raise UsageError(f"confidence must be in (0, 1), got {self.confidence}")
        if not 0 < self.epsilon < 1:
            raise UsageError(f"epsilon must be in (0, 1), got {self.epsilon}")
        if self.sampling_threshold < 1:
            raise UsageError(f"sampling threshold must be at least 1, got {self.sampling_threshold}")
        if self.max_samples < 1 or self.sampling_threshold > self.max_samples:
            raise UsageError(f"sampling threshold {self.sampling_threshold} must not exceed "
                             f"max samples {self.max_samples}")
        if not 0 <= self.seed < 2 ** 64:
            raise UsageError(f"seed must be a non-negative 64-bit value, got {self.seed}")
        if self.causal_inner_cap < 1:
            raise UsageError("causal inner cap must be at least 1")

    @classmethod
    def from_settings(cls, settings):
        """Create a sampling config from a scrapy Settings object.

        Args:
            settings (scrapy.settings.Settings): Settings holding the fairness_probe.settings names.

        Returns:
            config (SamplingConfig): The configuration.

        """
        return cls(
            confidence=settings.getfloat('CONFIDENCE'),
            epsilon=settings.getfloat('EPSILON'),
            max_samples=settings.getint('MAX_SAMPLES'),
            sampling_threshold=settings.getint('SAMPLING_THRESHOLD'),
            seed=settings.getint('SEED'),
            exhaustive_limit=settings.getint('EXHAUSTIVE_LIMIT'),
            causal_inner_cap=settings.getint('CAUSAL_INNER_CAP'),
            permutation_limit=settings.getint('PERMUTATION_ENUMERATION_LIMIT'),
        )


@dataclass
class AdaptiveEstimator:

    """Running proportion estimate.

    Attributes:
        r (int): Samples observed so far.
        count (int): Positive observations.

    """

    r: int = 0
    count: int = 0

    @property
    def p(self):
        return self.count / self.r if self.r else 0.0

    def observe(self, positive):
        self.r += 1
        if positive:
            self.count += 1


@functools.lru_cache(maxsize=64)
def z_value(confidence: float) -> float:
    """Two-sided standard normal quantile z* for a confidence level.

    Uses scipy's inverse normal CDF (the Cephes ndtri rational approximation), accurate far below 1e-8.

    """
    if not 0 < confidence < 1:
        raise UsageError(f"confidence must be in (0, 1), got {confidence}")
    return float(norm.ppf(0.5 + confidence / 2.0))


def margin_of_error(est: AdaptiveEstimator, confidence: float) -> float:
    """Wald half-width z* sqrt(p(1 - p) / r)."""
    if est.r < 1:
        raise UsageError("margin of error is undefined before the first sample")
    p = est.p
    return z_value(confidence) * math.sqrt(p * (1.0 - p) / est.r)


def should_stop(est: AdaptiveEstimator, cfg: SamplingConfig) -> bool:
    """Decide whether an adaptive estimate has seen enough samples.

    Args:
        est (AdaptiveEstimator): The running estimate.
        cfg (SamplingConfig): Sample cap, sampling threshold, confidence and error margin.

    Returns:
        stop (bool): True once max_samples is reached, or once at least sampling_threshold samples give a margin of
            error below epsilon. Always False before the first sample.

    """
    if est.r >= cfg.max_samples:
        return True
    # the margin is undefined at r = 0
    if est.r < 1:
        return False
    return est.r >= cfg.sampling_threshold and margin_of_error(est, cfg.confidence) < cfg.epsilon


def stream_rng(seed: int, kind: int, subset: CharSubset = CharSubset(()), group: int = 0) -> np.random.Generator:
    """Independent PCG64 stream for one logical task of a run."""
    spawn_key = (kind, len(subset)) + tuple(subset) + (group,)
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=spawn_key)))


def random_input(schema: Schema, fixed: Mapping[int, int], rng: np.random.Generator) -> Input:
    """Draw an input agreeing with fixed, every free characteristic uniform over its labels.

    Args:
        schema (Schema): The input type.
        fixed (dict): Position to label index for the constrained characteristics.
        rng (numpy.random.Generator): Stream to draw from; advanced by one draw per free characteristic.

    Returns:
        input (Input): The drawn input.

    """
    counts = schema.label_counts
    for position, value in fixed.items():
        if not 0 <= position < schema.n or not 0 <= value < counts[position]:
            raise SchemaError(f"invalid fixed assignment {position}={value}")
    free = [i for i in range(schema.n) if i not in fixed]
    values = list(counts)
    if free:
        draws = rng.integers(0, [counts[i] for i in free])
        for position, draw in zip(free, draws):
            values[position] = int(draw)
    for position, value in fixed.items():
        values[position] = value
    return Input(tuple(values))


def profile_input(schema: Schema, profile, rng: np.random.Generator) -> Input:
    """Draw an input from an operational profile, one weighted draw per characteristic in schema order."""
    return Input(tuple(int(rng.choice(len(weights), p=weights)) for weights in profile.weights))


def _affine_permutation(count: int, rng: np.random.Generator) -> Iterator[int]:
    # i -> (a * i + b) mod count is a bijection whenever gcd(a, count) == 1
    a = int(rng.integers(1, count)) if count > 1 else 1
    while math.gcd(a, count) != 1:
        a = a + 1 if a + 1 < count else 1
    b = int(rng.integers(0, count))
    return ((a * i + b) % count for i in range(count))


def perturbations(input: Input, subset: CharSubset, schema: Schema, rng: np.random.Generator,
                  permutation_limit: int = 65536) -> Iterator[Input]:
    """Yield every other input that agrees with input outside subset, in a seeded pseudorandom order.

    There are (product of the subset's label counts) - 1 of them. Counts up to permutation_limit are shuffled with a
    Fisher-Yates permutation, larger ones with an affine index permutation.

    """
    # the subset's labels, read as one mixed-radix number, index the fiber of inputs sharing the other labels
    radices = [schema.label_counts[i] for i in subset]
    total = math.prod(radices)
    base = 0
    for position, radix in zip(subset, radices):
        base = base * radix + input[position]
    count = total - 1
    if count <= 0:
        return
    if count <= permutation_limit:
        order = (int(j) for j in rng.permutation(count))
    else:
        order = _affine_permutation(count, rng)

    values = list(input.values)
    for j in order:
        # j ranges over count = total - 1 slots; skipping base leaves the input itself out
        index = j if j < base else j + 1
        # decode index back into labels, last subset characteristic fastest
        for position, radix in zip(reversed(subset.indices), reversed(radices)):
            index, values[position] = divmod(index, radix)
        yield Input(tuple(values))
