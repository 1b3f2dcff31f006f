"""Bit-string genotypes, the jump fitness function, variation operators, and RNG plumbing.

A genotype is a fixed-length bit string packed into a Python integer (bit ``i``
holds position ``i``), so counting ones is a hardware popcount via
``int.bit_count`` and species identity is plain integer equality.  All scalar
randomness is served by :class:`RandomStream`, a buffered view over a
counter-seeded PCG64 generator with explicit ``(seed, stream)`` indexing, so
every run is replayable and independent replicates/grid cells get provably
disjoint streams.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np

_TWO53 = 1 << 53


class Genotype(NamedTuple):
    """Fixed-length bit string; ``bits`` packs positions ``0..n-1``."""

    bits: int
    n: int


@dataclass(frozen=True)
class GaParams:
    """Problem dimension and algorithm knobs for the steady-state GA.

    Attributes
    ----------
    n : int
        Bit-string dimension.
    k : int
        Jump width: the fitness plateau sits at ``n - k`` ones and the sole
        optimum is the all-ones string.  Restricted to ``1 <= k <= n/2``.
    mu : int
        Parent population size (at least 2).
    p_c : float
        Per-iteration probability of applying crossover, in ``[0, 1]``.
    chi : float
        Mutation strength; each bit flips independently with probability
        ``chi / n``.
    seed : int
        Base seed (64-bit, non-negative) from which all streams derive.
    """

    n: int
    k: int
    mu: int
    p_c: float
    chi: float
    seed: int = 1

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be positive, got {self.n}")
        if not (1 <= self.k and 2 * self.k <= self.n):
            raise ValueError(f"k must satisfy 1 <= k <= n/2, got k={self.k}, n={self.n}")
        if self.mu < 2:
            raise ValueError(f"mu must be at least 2, got {self.mu}")
        if not 0.0 <= self.p_c <= 1.0:
            raise ValueError(f"p_c must lie in [0, 1], got {self.p_c}")
        if not 0.0 < self.chi <= self.n:
            raise ValueError(f"chi must lie in (0, n], got {self.chi}")
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be a non-negative 64-bit integer, got {self.seed}")

    @property
    def p_m(self) -> float:
        """Per-bit mutation probability chi / n."""
        return self.chi / self.n

    @property
    def optimum_fitness(self) -> int:
        return self.n + self.k


@lru_cache(maxsize=256)
def _binomial_walk_setup(n: int, p: float):
    # Start mass (1-p)^n and odds ratio for the inverse-CDF walk.
    return math.exp(n * math.log1p(-p)), p / (1.0 - p)


class RandomStream:
    """Deterministic random stream: buffered scalar uniforms over PCG64.

    Every scalar draw used by the GA (coins, indices, bit masks, binomial
    counts) is derived from consecutive uniforms of this stream, which makes
    the draw order of a step easy to state and replay exactly.  Vectorized
    consumers can use the underlying numpy ``generator`` directly; mixing the
    two is still deterministic because buffer refills happen at fixed points
    in the consumption sequence.
    """

    __slots__ = ("generator", "_buf", "_pos")

    BLOCK = 4096

    def __init__(self, generator: np.random.Generator):
        self.generator = generator
        self._buf: list[float] = []
        self._pos = 0

    def uniform(self) -> float:
        """Next uniform float in [0, 1)."""
        pos = self._pos
        buf = self._buf
        if pos >= len(buf):
            self._buf = buf = self.generator.random(self.BLOCK).tolist()
            self._pos = pos = 0
        self._pos = pos + 1
        return buf[pos]

    def index(self, bound: int) -> int:
        """Uniform integer in [0, bound)."""
        i = int(self.uniform() * bound)
        return i if i < bound else bound - 1

    def random_bits(self, nbits: int) -> int:
        """Integer whose low ``nbits`` bits are independent fair coin flips."""
        out = 0
        shift = 0
        while shift < nbits:
            out |= int(self.uniform() * _TWO53) << shift
            shift += 53
        return out & ((1 << nbits) - 1)

    def binomial(self, n: int, p: float) -> int:
        """Binomial(n, p) variate via inverse-CDF walk on one uniform."""
        if p <= 0.0:
            return 0
        if p >= 1.0:
            return n
        start, ratio = _binomial_walk_setup(n, p)
        if start == 0.0:
            # (1-p)^n underflowed; fall back to the generator's own sampler.
            return int(self.generator.binomial(n, p))
        u = self.uniform()
        c = start
        cum = start
        m = 0
        while u > cum and m < n:
            m += 1
            c *= ratio * (n - m + 1) / m
            cum += c
        return m


def make_rng(seed: int, stream: int = 0) -> RandomStream:
    """Independent reproducible random stream ``stream`` under ``seed``.

    Streams with distinct indices are non-overlapping by construction
    (PCG64 keyed through a seed sequence with the stream index as spawn key).
    """
    if not 0 <= seed < 2**64:
        raise ValueError(f"seed must be a non-negative 64-bit integer, got {seed}")
    if stream < 0:
        raise ValueError(f"stream index must be non-negative, got {stream}")
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(stream,))
    return RandomStream(np.random.Generator(np.random.PCG64(ss)))


def random_index_subset(rng: RandomStream, n: int, m: int) -> set[int]:
    """Uniform random m-subset of range(n) (Floyd's sampling algorithm).

    Draws exactly ``m`` uniforms, one per element, for ``j`` ranging over
    ``n-m .. n-1`` in ascending order.
    """
    if not 0 <= m <= n:
        raise ValueError(f"subset size {m} outside [0, {n}]")
    chosen: set[int] = set()
    for j in range(n - m, n):
        t = rng.index(j + 1)
        if t in chosen:
            chosen.add(j)
        else:
            chosen.add(t)
    return chosen


def ones_count(g: Genotype) -> int:
    """Number of one-bits."""
    return g.bits.bit_count()


def hamming_distance(a: Genotype, b: Genotype) -> int:
    """Number of differing positions."""
    if a.n != b.n:
        raise ValueError(f"genotype length mismatch: {a.n} != {b.n}")
    return (a.bits ^ b.bits).bit_count()


def jump_fitness(g: Genotype, k: int) -> int:
    """Jump fitness with gap width ``k``.

    Returns ``k + |x|`` when ``|x| = n`` or ``|x| <= n - k`` and ``n - |x|``
    inside the gap, where ``|x|`` counts ones.  The all-ones string is the
    unique maximum with value ``n + k``; strings with exactly ``n - k`` ones
    form a plateau of value ``n``.
    """
    n = g.n
    if not 1 <= k <= n:
        raise ValueError(f"k must satisfy 1 <= k <= n, got k={k}, n={n}")
    ones = g.bits.bit_count()
    if ones == n or ones <= n - k:
        return k + ones
    return n - ones


def uniform_crossover(a: Genotype, b: Genotype, rng: RandomStream) -> Genotype:
    """Each position independently takes ``a``'s bit or ``b``'s bit with equal probability."""
    if a.n != b.n:
        raise ValueError(f"genotype length mismatch: {a.n} != {b.n}")
    mask = rng.random_bits(a.n)
    return Genotype((a.bits & mask) | (b.bits & ~mask), a.n)


def standard_bit_mutation(g: Genotype, p_m: float, rng: RandomStream) -> Genotype:
    """Flip every bit independently with probability ``p_m``.

    Sampled as a binomial flip count followed by a uniform random subset of
    positions of that size, which realizes the same distribution as n
    per-bit coins.
    """
    if not 0.0 <= p_m <= 1.0:
        raise ValueError(f"p_m must lie in [0, 1], got {p_m}")
    n = g.n
    m = rng.binomial(n, p_m)
    if m == 0:
        return g
    if m == n:
        return Genotype(g.bits ^ ((1 << n) - 1), n)
    flips = 0
    for i in random_index_subset(rng, n, m):
        flips |= 1 << i
    return Genotype(g.bits ^ flips, n)
