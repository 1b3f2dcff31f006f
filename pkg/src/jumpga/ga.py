"""Steady-state (mu+1) GA engine with per-iteration event classification.

One iteration creates a single offspring -- either by uniform crossover of two
uniformly chosen parents (with replacement) followed by standard bit mutation,
or by mutation of one uniformly chosen parent -- and then removes one
lowest-fitness member of the extended (mu+1) multiset, breaking ties uniformly
at random.  Runtime is counted in fitness evaluations: mu for initialization
plus one per iteration; the optimum counts as evaluated the moment it is
created as an offspring.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .core import (
    GaParams,
    Genotype,
    RandomStream,
    hamming_distance,
    jump_fitness,
    random_index_subset,
    standard_bit_mutation,
    uniform_crossover,
)


class EventClass(Enum):
    """How an iteration produced its offspring.

    CROSSOVER_CLOSE    crossover with parents at Hamming distance <= 2
    CROSSOVER_DISTANT  crossover with parents further apart (>= 4 when the
                       population sits on the plateau, where distances are even)
    MUTATION_ONLY      no crossover, single mutated parent
    """

    CROSSOVER_CLOSE = "crossover_close"
    CROSSOVER_DISTANT = "crossover_distant"
    MUTATION_ONLY = "mutation_only"


@dataclass(frozen=True)
class Population:
    """Multiset of genotypes with cached fitness values.

    ``members`` and ``fitnesses`` are parallel tuples; ``generation`` counts
    applied iterations.  Member order carries no meaning beyond indexing
    within a single step.
    """

    members: tuple[Genotype, ...]
    fitnesses: tuple[int, ...]
    generation: int = 0

    @property
    def size(self) -> int:
        return len(self.members)

    @property
    def n(self) -> int:
        return self.members[0].n


class IntegrityError(Exception):
    """Cached state disagrees with a full recomputation."""


def check_population(pop: Population, k: int) -> None:
    """Verify the fitness cache and shared dimension (test/debug helper)."""
    n = pop.members[0].n
    for g, f in zip(pop.members, pop.fitnesses):
        if g.n != n:
            raise IntegrityError(f"mixed genotype dimensions: {g.n} != {n}")
        if jump_fitness(g, k) != f:
            raise IntegrityError(f"cached fitness {f} wrong for {g}")


@dataclass(frozen=True)
class StepTrace:
    """Record of one iteration, sufficient to replay population deltas.

    ``removed_index`` indexes the extended multiset: values ``0..mu-1`` name
    pre-step members, value ``mu`` means the offspring itself was removed (so
    the population multiset is unchanged).  ``removed_genotype`` is the
    genotype that left the extended multiset.
    """

    t: int
    event: EventClass
    parent_indices: tuple[int, ...]
    offspring: Genotype
    offspring_fitness: int
    removed_index: int
    removed_genotype: Genotype
    optimum_created: bool


@dataclass(frozen=True)
class StopCondition:
    """Run termination: any enabled condition stops the run.

    ``optimum`` stops once the optimum has been evaluated (including in the
    initial population), ``full_plateau`` stops once every member has fitness
    at least n (plateau or optimum), ``max_iterations`` caps the iteration
    count (reaching it flags non-convergence, not an error).
    """

    optimum: bool = True
    full_plateau: bool = False
    max_iterations: int | None = None

    def __post_init__(self):
        if self.max_iterations is not None and self.max_iterations < 0:
            raise ValueError(f"max_iterations must be non-negative, got {self.max_iterations}")
        if not (self.optimum or self.full_plateau or self.max_iterations is not None):
            raise ValueError("at least one stop condition must be enabled")


@dataclass
class RunResult:
    population: Population
    iterations: int
    evaluations: int
    stop_reason: str
    telemetry: dict = field(default_factory=dict)


def init_uniform(params: GaParams, rng: RandomStream) -> Population:
    """mu genotypes drawn uniformly from {0,1}^n (one mask draw per member, in order)."""
    members = tuple(Genotype(rng.random_bits(params.n), params.n) for _ in range(params.mu))
    fits = tuple(jump_fitness(g, params.k) for g in members)
    return Population(members, fits, 0)


def init_monomorphic_plateau(params: GaParams, rng: RandomStream) -> Population:
    """mu copies of one plateau point drawn uniformly among strings with exactly k zeros."""
    bits = (1 << params.n) - 1
    for i in random_index_subset(rng, params.n, params.k):
        bits ^= 1 << i
    g = Genotype(bits, params.n)
    f = jump_fitness(g, params.k)
    return Population((g,) * params.mu, (f,) * params.mu, 0)


def classify_event(used_crossover: bool, parents: tuple[Genotype, ...]) -> EventClass:
    """Event class of an iteration given its parent genotypes."""
    if not used_crossover:
        return EventClass.MUTATION_ONLY
    a, b = parents
    if hamming_distance(a, b) <= 2:
        return EventClass.CROSSOVER_CLOSE
    return EventClass.CROSSOVER_DISTANT


def ga_step(pop: Population, params: GaParams, rng: RandomStream) -> tuple[Population, StepTrace]:
    """Advance one iteration; returns the new population and its trace.

    Scalar draws happen in a fixed order so that traces replay exactly:
    (1) crossover coin ``u < p_c`` with ``u`` uniform on [0, 1),
    (2) parent index draws (two with crossover, else one; with replacement),
    (3) crossover mask bits (crossover only),
    (4) mutation flip count, then flip positions (ascending Floyd draws),
    (5) removal tie-break index, drawn only when two or more candidates tie
        at the minimum fitness.
    """
    mu = params.mu
    members = pop.members
    if rng.uniform() < params.p_c:
        i = rng.index(mu)
        j = rng.index(mu)
        pa = members[i]
        pb = members[j]
        parents = (i, j)
        child = uniform_crossover(pa, pb, rng)
        child = standard_bit_mutation(child, params.p_m, rng)
        if hamming_distance(pa, pb) <= 2:
            event = EventClass.CROSSOVER_CLOSE
        else:
            event = EventClass.CROSSOVER_DISTANT
    else:
        i = rng.index(mu)
        parents = (i,)
        child = standard_bit_mutation(members[i], params.p_m, rng)
        event = EventClass.MUTATION_ONLY
    child_fit = jump_fitness(child, params.k)

    # Worst of the extended multiset; the offspring participates as index mu.
    low = child_fit
    ties = [mu]
    fits = pop.fitnesses
    for r in range(mu):
        f = fits[r]
        if f < low:
            low = f
            ties = [r]
        elif f == low:
            ties.append(r)
    removed = ties[0] if len(ties) == 1 else ties[rng.index(len(ties))]

    if removed == mu:
        removed_genotype = child
        new_pop = Population(members, fits, pop.generation + 1)
    else:
        removed_genotype = members[removed]
        new_pop = Population(
            members[:removed] + (child,) + members[removed + 1 :],
            fits[:removed] + (child_fit,) + fits[removed + 1 :],
            pop.generation + 1,
        )
    trace = StepTrace(
        t=pop.generation + 1,
        event=event,
        parent_indices=parents,
        offspring=child,
        offspring_fitness=child_fit,
        removed_index=removed,
        removed_genotype=removed_genotype,
        optimum_created=child_fit == params.n + params.k,
    )
    return new_pop, trace


def run(
    pop: Population,
    params: GaParams,
    stop: StopCondition,
    rng: RandomStream,
    telemetry_hooks: tuple = (),
) -> RunResult:
    """Run until a stop condition triggers.

    Hooks are called as ``hook.on_step(t, trace, population)`` after every
    iteration; hooks exposing ``name`` and ``series`` attributes have their
    collected series attached to the result's ``telemetry`` dict.
    """

    def finish(population: Population, t: int, reason: str) -> RunResult:
        telemetry = {
            h.name: h.series for h in telemetry_hooks if hasattr(h, "name") and hasattr(h, "series")
        }
        return RunResult(population, t, params.mu + t, reason, telemetry)

    optimum = params.optimum_fitness
    if stop.optimum and any(f == optimum for f in pop.fitnesses):
        return finish(pop, 0, "optimum_found")
    if stop.full_plateau and min(pop.fitnesses) >= params.n:
        return finish(pop, 0, "full_plateau")

    t = 0
    while stop.max_iterations is None or t < stop.max_iterations:
        pop, trace = ga_step(pop, params, rng)
        t += 1
        for h in telemetry_hooks:
            h.on_step(t, trace, pop)
        if stop.optimum and trace.optimum_created:
            return finish(pop, t, "optimum_found")
        if stop.full_plateau and min(pop.fitnesses) >= params.n:
            return finish(pop, t, "full_plateau")
    return finish(pop, t, "max_iterations")


def default_snapshot_stride(mu: int) -> int:
    """Telemetry snapshot stride: every iteration up to mu=64, every 10th beyond."""
    return 1 if mu <= 64 else 10


class SnapshotHook:
    """Pull-based telemetry hook: records ``(t, probe(population))`` every ``stride`` steps."""

    def __init__(self, name: str, probe, stride: int = 1):
        if stride < 1:
            raise ValueError(f"stride must be positive, got {stride}")
        self.name = name
        self.probe = probe
        self.stride = stride
        self.series: list[tuple[int, object]] = []

    def on_step(self, t: int, trace: StepTrace, population: Population) -> None:
        if t % self.stride == 0:
            self.series.append((t, self.probe(population)))
