"""Population diversity measurement: species censuses and pairwise Hamming statistics.

A species is the set of population members sharing one genotype.  Besides the
one-shot measurements there are incremental trackers that consume step traces,
so long runs can maintain species sizes and distance histograms in O(mu) per
iteration instead of O(mu^2) recomputation.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from .core import Genotype
from .ga import Population, StepTrace


class TraceIntegrityError(Exception):
    """A replayed trace does not match the population state it claims to describe."""


@dataclass
class SpeciesCensus:
    """Counts per distinct genotype."""

    classes: dict[Genotype, int]
    largest_size: int
    species_count: int


def census(pop: Population) -> SpeciesCensus:
    counts = Counter(pop.members)
    return SpeciesCensus(dict(counts), max(counts.values()), len(counts))


@dataclass
class HammingHistogram:
    """Histogram of pairwise Hamming distances over unordered member pairs."""

    counts: dict[int, int]
    total_pairs: int

    def frequencies(self, distances) -> tuple[float, ...]:
        tp = self.total_pairs
        return tuple(self.counts.get(d, 0) / tp for d in distances)

    def mean_distance(self) -> float:
        return sum(d * c for d, c in self.counts.items()) / self.total_pairs


def hamming_histogram(pop: Population) -> HammingHistogram:
    members = pop.members
    mu = len(members)
    if mu < 2:
        raise ValueError("need at least two members for pairwise distances")
    counts: dict[int, int] = {}
    for i in range(mu - 1):
        ai = members[i].bits
        for j in range(i + 1, mu):
            d = (ai ^ members[j].bits).bit_count()
            counts[d] = counts.get(d, 0) + 1
    return HammingHistogram(counts, mu * (mu - 1) // 2)


class SpeciesTracker:
    """Incrementally maintained census with O(1) largest-species updates.

    Keeps a histogram of class sizes so the maximum can be maintained under
    single add/remove updates without scanning (the largest size moves by at
    most one per applied step).
    """

    def __init__(self, pop: Population):
        self.counts: Counter[Genotype] = Counter(pop.members)
        self._size_hist: Counter[int] = Counter(self.counts.values())
        self.largest: int = max(self.counts.values())
        self._mu = len(pop.members)

    def apply(self, trace: StepTrace) -> None:
        if trace.removed_index == self._mu:
            return  # offspring itself was removed; multiset unchanged
        self._add(trace.offspring)
        self._remove(trace.removed_genotype)

    def _add(self, g: Genotype) -> None:
        s = self.counts.get(g, 0)
        self.counts[g] = s + 1
        if s:
            self._size_hist[s] -= 1
            if not self._size_hist[s]:
                del self._size_hist[s]
        self._size_hist[s + 1] += 1
        if s + 1 > self.largest:
            self.largest = s + 1

    def _remove(self, g: Genotype) -> None:
        s = self.counts.get(g, 0)
        if not s:
            raise TraceIntegrityError(f"removal of absent genotype {g}")
        if s == 1:
            del self.counts[g]
        else:
            self.counts[g] = s - 1
        self._size_hist[s] -= 1
        if not self._size_hist[s]:
            del self._size_hist[s]
        if s > 1:
            self._size_hist[s - 1] += 1
        if s == self.largest and not self._size_hist.get(s, 0):
            self.largest = s - 1

    def count(self, g: Genotype) -> int:
        return self.counts.get(g, 0)

    def largest_class(self) -> Genotype:
        """A genotype of maximal count; ties resolved to the smallest packed bits."""
        return min((g for g, c in self.counts.items() if c == self.largest), key=lambda g: g.bits)


def largest_species_series(traces, initial: Population) -> list[int]:
    """Largest species size before any step and after each step of ``traces``."""
    tracker = SpeciesTracker(initial)
    series = [tracker.largest]
    for trace in traces:
        tracker.apply(trace)
        series.append(tracker.largest)
    return series


class PairwiseDistanceTracker:
    """Incrementally maintained pairwise-distance histogram (O(mu) per step)."""

    def __init__(self, pop: Population):
        self._members = [g.bits for g in pop.members]
        hist = hamming_histogram(pop)
        self.counts = dict(hist.counts)
        self.total_pairs = hist.total_pairs

    def apply(self, trace: StepTrace) -> None:
        members = self._members
        r = trace.removed_index
        if r == len(members):
            return
        old = members[r]
        if old != trace.removed_genotype.bits:
            raise TraceIntegrityError("trace removal index does not match tracked member")
        new = trace.offspring.bits
        counts = self.counts
        for idx, mbits in enumerate(members):
            if idx == r:
                continue
            d = (old ^ mbits).bit_count()
            c = counts[d] - 1
            if c:
                counts[d] = c
            else:
                del counts[d]
            d = (new ^ mbits).bit_count()
            counts[d] = counts.get(d, 0) + 1
        members[r] = new

    def frequencies(self, distances) -> tuple[float, ...]:
        tp = self.total_pairs
        return tuple(self.counts.get(d, 0) / tp for d in distances)
