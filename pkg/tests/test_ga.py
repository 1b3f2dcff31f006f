"""Steady-state GA engine: initializers, single steps, runs, and replay contracts."""

from __future__ import annotations

import math
import random
import statistics
from collections import Counter

import pytest

from jumpga import (
    EventClass,
    GaParams,
    Genotype,
    Population,
    SnapshotHook,
    StopCondition,
    census,
    check_population,
    classify_event,
    default_snapshot_stride,
    ga_step,
    hamming_distance,
    init_monomorphic_plateau,
    init_uniform,
    jump_fitness,
    make_rng,
    ones_count,
    run,
    standard_bit_mutation,
    uniform_crossover,
)


def population_of(params: GaParams, *bits: int) -> Population:
    members = tuple(Genotype(b, params.n) for b in bits)
    return Population(members, tuple(jump_fitness(m, params.k) for m in members), 0)


def multiset(pop: Population) -> Counter:
    return Counter(g.bits for g in pop.members)


# ---------------------------------------------------------------------------
# initializers


def test_init_uniform_is_deterministic_and_unbiased():
    p = GaParams(n=100, k=5, mu=50, p_c=0.5, chi=1.0, seed=0)
    assert init_uniform(p, make_rng(3, 0)) == init_uniform(p, make_rng(3, 0))
    total = 0
    for seed in range(100):
        pop = init_uniform(p, make_rng(seed, 0))
        assert pop.size == 50
        assert pop.fitnesses == tuple(jump_fitness(g, p.k) for g in pop.members)
        total += sum(ones_count(g) for g in pop.members)
    mean = total / (100 * 50)
    sigma_mean = math.sqrt(100 / 4) / math.sqrt(100 * 50)
    assert abs(mean - 50.0) <= 3 * sigma_mean


def test_init_monomorphic_plateau_is_one_species_at_plateau_fitness():
    p = GaParams(n=20, k=4, mu=7, p_c=0.5, chi=1.0, seed=5)
    pop = init_monomorphic_plateau(p, make_rng(5, 0))
    c = census(pop)
    assert c.species_count == 1
    assert c.largest_size == 7
    assert all(f == 20 for f in pop.fitnesses)
    assert all(ones_count(g) == 16 for g in pop.members)


def test_init_monomorphic_plateau_is_uniform_over_plateau_strings():
    # n=6, k=2: 15 possible zero-pair patterns, each should appear with
    # frequency 1/15 over 10^4 seeds.
    counts = Counter()
    for seed in range(10_000):
        p = GaParams(n=6, k=2, mu=3, p_c=0.5, chi=1.0, seed=seed)
        pop = init_monomorphic_plateau(p, make_rng(seed, 0))
        counts[pop.members[0].bits] += 1
    assert len(counts) == 15
    sigma = math.sqrt((1 / 15) * (14 / 15) / 10_000)
    for c in counts.values():
        assert abs(c / 10_000 - 1 / 15) <= 3 * sigma


# ---------------------------------------------------------------------------
# event classification


def test_classify_event_by_parent_count_and_distance():
    n = 10
    a = Genotype(0b1111111100, n)
    assert classify_event(False, (a,)) == EventClass.MUTATION_ONLY
    assert classify_event(True, (a, a)) == EventClass.CROSSOVER_CLOSE
    two_apart = Genotype(a.bits ^ 0b11, n)
    assert hamming_distance(a, two_apart) == 2
    assert classify_event(True, (a, two_apart)) == EventClass.CROSSOVER_CLOSE
    four_apart = Genotype(a.bits ^ 0b1111, n)
    assert hamming_distance(a, four_apart) == 4
    assert classify_event(True, (a, four_apart)) == EventClass.CROSSOVER_DISTANT


# ---------------------------------------------------------------------------
# single-step semantics


def manual_step(pop: Population, params: GaParams, rng) -> tuple[Population, dict]:
    """Mirror of the engine's documented draw order, written independently.

    Draws: crossover coin; parent index(es); crossover mask; mutation count
    and positions; a removal tie-break index only when two or more members of
    the extended multiset share the minimum fitness.
    """
    mu = params.mu
    if rng.uniform() < params.p_c:
        i, j = rng.index(mu), rng.index(mu)
        parents = (i, j)
        child = uniform_crossover(pop.members[i], pop.members[j], rng)
        child = standard_bit_mutation(child, params.p_m, rng)
    else:
        i = rng.index(mu)
        parents = (i,)
        child = standard_bit_mutation(pop.members[i], params.p_m, rng)
    cf = jump_fitness(child, params.k)
    low, ties = cf, [mu]
    for r in range(mu):
        f = pop.fitnesses[r]
        if f < low:
            low, ties = f, [r]
        elif f == low:
            ties.append(r)
    removed = ties[0] if len(ties) == 1 else ties[rng.index(len(ties))]
    if removed == mu:
        new = Population(pop.members, pop.fitnesses, pop.generation + 1)
    else:
        new = Population(
            pop.members[:removed] + (child,) + pop.members[removed + 1 :],
            pop.fitnesses[:removed] + (cf,) + pop.fitnesses[removed + 1 :],
            pop.generation + 1,
        )
    return new, dict(parents=parents, offspring=child, removed=removed)


@pytest.mark.parametrize(
    "n,k,mu,p_c",
    [(2, 1, 2, 0.5), (12, 3, 5, 0.7), (20, 2, 8, 0.0), (16, 4, 6, 1.0)],
)
def test_step_follows_documented_draw_order(n, k, mu, p_c):
    params = GaParams(n=n, k=k, mu=mu, p_c=p_c, chi=1.0, seed=17)
    pop_a = init_uniform(params, make_rng(17, 0))
    pop_b = pop_a
    rng_a = make_rng(17, 1)
    rng_b = make_rng(17, 1)
    for _ in range(200):
        pop_a, trace = ga_step(pop_a, params, rng_a)
        pop_b, manual = manual_step(pop_b, params, rng_b)
        assert trace.parent_indices == manual["parents"]
        assert trace.offspring == manual["offspring"]
        assert trace.removed_index == manual["removed"]
        assert pop_a == pop_b


def test_step_discards_strictly_worst_offspring_without_touching_population():
    # From a plateau population with rate-0 crossover, an offspring that lands
    # in the fitness gap is strictly worst and must be removed on creation.
    params = GaParams(n=12, k=2, mu=4, p_c=0.0, chi=1.0, seed=0)
    pop = init_monomorphic_plateau(params, make_rng(0, 0))
    rng = make_rng(0, 1)
    seen_discard = False
    for _ in range(300):
        before = multiset(pop)
        pop, trace = ga_step(pop, params, rng)
        if trace.removed_index == params.mu:
            assert multiset(pop) == before
            assert trace.removed_genotype == trace.offspring
            if trace.offspring_fitness < min(pop.fitnesses):
                seen_discard = True
        if trace.optimum_created:
            break
    assert seen_discard


def test_step_with_negligible_mutation_keeps_monomorphic_population():
    params = GaParams(n=12, k=2, mu=4, p_c=1.0, chi=1e-12, seed=4)
    pop = init_monomorphic_plateau(params, make_rng(4, 0))
    start = pop.members[0]
    rng = make_rng(4, 1)
    for _ in range(50):
        pop, trace = ga_step(pop, params, rng)
        assert trace.event == EventClass.CROSSOVER_CLOSE
        assert trace.offspring == start
    assert census(pop).species_count == 1


def test_step_trace_bookkeeping_matches_population_change():
    params = GaParams(n=14, k=3, mu=6, p_c=0.5, chi=1.0, seed=23)
    pop = init_uniform(params, make_rng(23, 0))
    rng = make_rng(23, 1)
    for t in range(1, 401):
        before = multiset(pop)
        prev = pop
        pop, trace = ga_step(pop, params, rng)
        assert trace.t == t
        assert pop.generation == t
        assert pop.size == params.mu
        assert trace.offspring_fitness == jump_fitness(trace.offspring, params.k)
        assert trace.optimum_created == (trace.offspring_fitness == params.n + params.k)
        after = multiset(pop)
        if trace.removed_index == params.mu:
            assert after == before
        else:
            assert trace.removed_genotype == prev.members[trace.removed_index]
            expected = Counter(before)
            expected[trace.offspring.bits] += 1
            expected[trace.removed_genotype.bits] -= 1
            assert after == +expected
        if trace.optimum_created:
            break


def test_trajectory_invariants_hold_over_long_runs():
    params = GaParams(n=12, k=3, mu=5, p_c=0.5, chi=1.0, seed=31)
    pop = init_uniform(params, make_rng(31, 0))
    rng = make_rng(31, 1)
    focal = pop.members[0]
    best = max(pop.fitnesses)
    all_plateau_seen = False
    for t in range(1, 2001):
        y_before = sum(g == focal for g in pop.members)
        pop, trace = ga_step(pop, params, rng)
        new_best = max(pop.fitnesses)
        assert new_best >= best  # elitism: best fitness never decreases
        best = new_best
        y_after = sum(g == focal for g in pop.members)
        assert abs(y_after - y_before) <= 1  # one replacement per iteration
        if all_plateau_seen:
            assert min(pop.fitnesses) >= params.n
        elif min(pop.fitnesses) >= params.n:
            all_plateau_seen = True
        if t % 200 == 0:
            check_population(pop, params.k)
        if trace.optimum_created:
            break


def test_plateau_members_sit_at_even_pairwise_distances():
    params = GaParams(n=30, k=2, mu=6, p_c=1.0, chi=1.0, seed=2)
    pop = init_monomorphic_plateau(params, make_rng(2, 0))
    rng = make_rng(2, 1)
    for _ in range(300):
        pop, trace = ga_step(pop, params, rng)
        if trace.optimum_created:
            break
        plateau = [g for g, f in zip(pop.members, pop.fitnesses) if f == params.n]
        for i in range(len(plateau)):
            for j in range(i + 1, len(plateau)):
                assert hamming_distance(plateau[i], plateau[j]) % 2 == 0


# ---------------------------------------------------------------------------
# run loop


def test_run_stops_immediately_when_optimum_already_present():
    params = GaParams(n=8, k=2, mu=3, p_c=0.5, chi=1.0, seed=1)
    pop = population_of(params, 0xFF, 0x3F, 0x00)
    res = run(pop, params, StopCondition(), make_rng(1, 0))
    assert res.stop_reason == "optimum_found"
    assert res.iterations == 0
    assert res.evaluations == params.mu


def test_run_counts_initial_population_as_evaluated():
    for seed in range(5):
        params = GaParams(n=14, k=2, mu=4, p_c=0.5, chi=1.0, seed=seed)
        pop = init_uniform(params, make_rng(seed, 0))
        res = run(pop, params, StopCondition(max_iterations=100_000), make_rng(seed, 1))
        assert res.evaluations == params.mu + res.iterations


def test_run_full_plateau_stop():
    params = GaParams(n=14, k=3, mu=4, p_c=0.5, chi=1.0, seed=9)
    pop = init_uniform(params, make_rng(9, 0))
    res = run(
        pop, params, StopCondition(optimum=True, full_plateau=True, max_iterations=10**6), make_rng(9, 1)
    )
    assert res.stop_reason in ("full_plateau", "optimum_found")
    assert min(res.population.fitnesses) >= params.n
    # Already-plateau populations stop before any iteration.
    mono = init_monomorphic_plateau(params, make_rng(9, 2))
    res2 = run(mono, params, StopCondition(optimum=True, full_plateau=True), make_rng(9, 3))
    assert res2.stop_reason == "full_plateau"
    assert res2.iterations == 0


def test_run_iteration_cap():
    params = GaParams(n=40, k=3, mu=4, p_c=0.5, chi=1.0, seed=13)
    pop = init_uniform(params, make_rng(13, 0))
    res = run(pop, params, StopCondition(max_iterations=50), make_rng(13, 1))
    assert res.stop_reason == "max_iterations"
    assert res.iterations == 50
    assert res.evaluations == 54


def test_crossover_probability_boundaries_control_event_mix():
    base = dict(n=16, k=2, mu=5, chi=1.0, seed=6)
    for p_c, expected_parents in ((1.0, 2), (0.0, 1)):
        params = GaParams(p_c=p_c, **base)
        pop = init_uniform(params, make_rng(6, 0))
        rng = make_rng(6, 1)
        for _ in range(200):
            pop, trace = ga_step(pop, params, rng)
            assert len(trace.parent_indices) == expected_parents
            if p_c == 0.0:
                assert trace.event == EventClass.MUTATION_ONLY
            else:
                assert trace.event != EventClass.MUTATION_ONLY
            if trace.optimum_created:
                break


def test_runs_replay_identically_for_equal_seeds():
    params = GaParams(n=18, k=3, mu=6, p_c=0.5, chi=1.0, seed=77)

    def trajectory():
        pop = init_uniform(params, make_rng(77, 0))
        rng = make_rng(77, 1)
        out = []
        for _ in range(500):
            pop, trace = ga_step(pop, params, rng)
            out.append((trace.event, trace.parent_indices, trace.offspring.bits, trace.removed_index))
            if trace.optimum_created:
                break
        return out

    assert trajectory() == trajectory()


def test_small_instances_reach_the_optimum_from_every_seed():
    worst = 0
    for seed in range(100):
        params = GaParams(n=20, k=2, mu=8, p_c=0.5, chi=1.0, seed=seed)
        pop = init_uniform(params, make_rng(seed, 0))
        res = run(pop, params, StopCondition(max_iterations=10_000_000), make_rng(seed, 1))
        assert res.stop_reason == "optimum_found"
        worst = max(worst, res.iterations)
    assert worst < 100_000


def test_snapshot_hooks_sample_on_stride():
    params = GaParams(n=16, k=2, mu=5, p_c=0.5, chi=1.0, seed=3)
    pop = init_uniform(params, make_rng(3, 0))
    hook = SnapshotHook("largest", lambda p: census(p).largest_size, stride=10)
    res = run(pop, params, StopCondition(max_iterations=100), make_rng(3, 1), (hook,))
    series = res.telemetry["largest"]
    stops = res.iterations
    assert [t for t, _ in series] == list(range(10, stops + 1, 10))
    assert all(1 <= v <= params.mu for _, v in series)
    with pytest.raises(ValueError):
        SnapshotHook("bad", lambda p: 0, stride=0)
    assert default_snapshot_stride(64) == 1
    assert default_snapshot_stride(65) == 10


# ---------------------------------------------------------------------------
# agreement with an independent reference implementation


def referee_largest_species(seed: int, n: int, k: int, mu: int, p_c: float, chi: float, steps: int) -> int:
    """Plain-list (mu+1) GA sharing no code or RNG with the package."""
    rnd = random.Random(seed)

    def fitness(x: list[int]) -> int:
        o = sum(x)
        return k + o if (o == n or o <= n - k) else n - o

    pop = [[rnd.randint(0, 1) for _ in range(n)] for _ in range(mu)]
    fits = [fitness(x) for x in pop]
    pm = chi / n
    for _ in range(steps):
        if rnd.random() < p_c:
            pa = pop[rnd.randrange(mu)]
            pb = pop[rnd.randrange(mu)]
            child = [pa[i] if rnd.random() < 0.5 else pb[i] for i in range(n)]
        else:
            child = list(pop[rnd.randrange(mu)])
        for i in range(n):
            if rnd.random() < pm:
                child[i] = 1 - child[i]
        cf = fitness(child)
        if cf == n + k:
            break
        ext = fits + [cf]
        low = min(ext)
        r = rnd.choice([i for i, f in enumerate(ext) if f == low])
        if r < mu:
            pop[r], fits[r] = child, cf
    return max(Counter(tuple(x) for x in pop).values())


def test_largest_species_distribution_matches_reference_implementation():
    n, k, mu, p_c, chi, steps, reps = 50, 3, 16, 0.5, 1.0, 800, 100
    package_vals = []
    for seed in range(reps):
        params = GaParams(n=n, k=k, mu=mu, p_c=p_c, chi=chi, seed=seed)
        pop = init_uniform(params, make_rng(seed, 0))
        rng = make_rng(seed, 1)
        for _ in range(steps):
            pop, trace = ga_step(pop, params, rng)
            if trace.optimum_created:
                break
        package_vals.append(census(pop).largest_size)
    referee_vals = [referee_largest_species(seed, n, k, mu, p_c, chi, steps) for seed in range(reps)]

    mean_p, mean_r = statistics.mean(package_vals), statistics.mean(referee_vals)
    se = math.sqrt(
        statistics.variance(package_vals) / reps + statistics.variance(referee_vals) / reps
    )
    assert abs(mean_p - mean_r) <= 3 * se

    tail_p = sum(v >= 12 for v in package_vals) / reps
    tail_r = sum(v >= 12 for v in referee_vals) / reps
    se_tail = math.sqrt(2 * 0.25 / reps)
    assert abs(tail_p - tail_r) <= 3 * se_tail
