"""Diversity telemetry: species census, distance histograms, incremental trackers."""

from __future__ import annotations

import math
import statistics

import pytest

from jumpga import (
    GaParams,
    Genotype,
    PairwiseDistanceTracker,
    Population,
    SpeciesTracker,
    StepTrace,
    TraceIntegrityError,
    census,
    ga_step,
    hamming_histogram,
    init_monomorphic_plateau,
    init_uniform,
    jump_fitness,
    largest_species_series,
    make_rng,
)


def population_of(n: int, k: int, *bits: int) -> Population:
    members = tuple(Genotype(b, n) for b in bits)
    return Population(members, tuple(jump_fitness(g, k) for g in members), 0)


def test_census_counts_distinct_genotypes():
    pop = population_of(3, 1, 0b011, 0b011, 0b101)
    c = census(pop)
    assert c.classes == {Genotype(0b011, 3): 2, Genotype(0b101, 3): 1}
    assert c.largest_size == 2
    assert c.species_count == 2


def test_census_of_monomorphic_population():
    pop = population_of(4, 1, 0b0111, 0b0111, 0b0111)
    c = census(pop)
    assert c.species_count == 1
    assert c.largest_size == 3


def test_hamming_histogram_hand_example():
    pop = population_of(3, 1, 0b000, 0b011, 0b011)
    h = hamming_histogram(pop)
    assert h.counts == {2: 2, 0: 1}
    assert h.total_pairs == 3
    assert h.mean_distance() == pytest.approx(4 / 3, rel=1e-12)
    assert h.frequencies((0, 2)) == pytest.approx((1 / 3, 2 / 3), rel=1e-12)


def test_hamming_histogram_two_member_population():
    pop = population_of(8, 2, 0b00001111, 0b11111111)
    h = hamming_histogram(pop)
    assert h.counts == {4: 1}
    assert h.total_pairs == 1
    assert h.mean_distance() == 4.0


def test_histogram_and_census_ignore_member_order():
    bits = [0b0110, 0b1111, 0b0110, 0b0001, 0b1111]
    a = population_of(4, 1, *bits)
    b = population_of(4, 1, *reversed(bits))
    assert census(a).classes == census(b).classes
    assert hamming_histogram(a).counts == hamming_histogram(b).counts


def test_mean_pairwise_distance_of_uniform_populations():
    # Independent uniform bit strings differ at each position with probability
    # 1/2, so the mean pairwise distance at n=30 is 15.
    means = []
    for seed in range(100):
        p = GaParams(n=30, k=3, mu=10, p_c=0.5, chi=1.0, seed=seed)
        means.append(hamming_histogram(init_uniform(p, make_rng(seed, 0))).mean_distance())
    grand = statistics.mean(means)
    se = statistics.stdev(means) / math.sqrt(len(means))
    assert abs(grand - 15.0) <= 3 * se + 0.05


def run_with_traces(params: GaParams, steps: int):
    pop = init_uniform(params, make_rng(params.seed, 0))
    rng = make_rng(params.seed, 1)
    history = [pop]
    traces = []
    for _ in range(steps):
        pop, trace = ga_step(pop, params, rng)
        history.append(pop)
        traces.append(trace)
        if trace.optimum_created:
            break
    return history, traces


def test_species_tracker_matches_full_census_after_every_step():
    params = GaParams(n=12, k=3, mu=8, p_c=0.5, chi=1.0, seed=41)
    history, traces = run_with_traces(params, 500)
    tracker = SpeciesTracker(history[0])
    for pop, trace in zip(history[1:], traces):
        tracker.apply(trace)
        c = census(pop)
        assert tracker.largest == c.largest_size
        for g, count in c.classes.items():
            assert tracker.count(g) == count
        largest_class = tracker.largest_class()
        assert c.classes[largest_class] == c.largest_size


def test_pairwise_tracker_matches_full_histogram_after_every_step():
    params = GaParams(n=12, k=3, mu=8, p_c=0.5, chi=1.0, seed=43)
    history, traces = run_with_traces(params, 300)
    tracker = PairwiseDistanceTracker(history[0])
    distances = tuple(range(0, 13))
    for pop, trace in zip(history[1:], traces):
        tracker.apply(trace)
        expected = hamming_histogram(pop).frequencies(distances)
        got = tracker.frequencies(distances)
        assert got == pytest.approx(expected, abs=1e-12)
        assert sum(got) == pytest.approx(1.0, abs=1e-9)


def test_largest_species_series_matches_stepwise_recount():
    params = GaParams(n=15, k=3, mu=10, p_c=0.5, chi=1.0, seed=47)
    history, traces = run_with_traces(params, 1000)
    series = largest_species_series(traces, history[0])
    assert len(series) == len(traces) + 1
    assert series == [census(pop).largest_size for pop in history]
    assert all(1 <= v <= params.mu for v in series)


def test_trackers_reject_inconsistent_traces():
    params = GaParams(n=10, k=2, mu=4, p_c=0.5, chi=1.0, seed=51)
    pop = init_uniform(params, make_rng(51, 0))
    _, trace = ga_step(pop, params, make_rng(51, 1))
    absent = Genotype(pop.members[0].bits ^ 0b1010101, 10)
    assert absent not in pop.members
    bogus = StepTrace(
        t=trace.t,
        event=trace.event,
        parent_indices=trace.parent_indices,
        offspring=trace.offspring,
        offspring_fitness=trace.offspring_fitness,
        removed_index=0,
        removed_genotype=absent,
        optimum_created=False,
    )
    with pytest.raises(TraceIntegrityError):
        SpeciesTracker(pop).apply(bogus)
    with pytest.raises(TraceIntegrityError):
        PairwiseDistanceTracker(pop).apply(bogus)


def test_offspring_discard_leaves_trackers_unchanged():
    params = GaParams(n=12, k=2, mu=4, p_c=0.0, chi=1.0, seed=0)
    pop = init_monomorphic_plateau(params, make_rng(0, 0))
    rng = make_rng(0, 1)
    st = SpeciesTracker(pop)
    pt = PairwiseDistanceTracker(pop)
    dist_axis = tuple(range(0, 5))
    for _ in range(100):
        pop, trace = ga_step(pop, params, rng)
        before = (st.largest, pt.frequencies(dist_axis))
        st.apply(trace)
        pt.apply(trace)
        if trace.removed_index == params.mu:
            assert (st.largest, pt.frequencies(dist_axis)) == before
        if trace.optimum_created:
            break
