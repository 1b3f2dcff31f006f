"""Simulation and analysis laboratory for the steady-state (mu+1) genetic
algorithm on jump fitness functions: an exact, reproducible implementation of
the algorithm with diversity telemetry, closed-form probability and runtime
bound evaluators, and Monte Carlo machinery that validates every bound against
the behaviour of the production step function.
"""

from .analysis import (
    BoundReport,
    DriftParams,
    close_crossover_decrease_bound,
    close_crossover_increase_bound,
    close_crossover_increase_oscale,
    diversity_saturation_population,
    drift_tail_bound,
    exact_optimum_probability,
    mutation_only_increase_oscale,
    mutation_only_transition_bounds,
    no_flip_probability,
    optimum_creation_lower_bound,
    persistence_drift_params,
    runtime_bound,
    survival_constant,
)
from .core import (
    GaParams,
    Genotype,
    RandomStream,
    hamming_distance,
    jump_fitness,
    make_rng,
    ones_count,
    standard_bit_mutation,
    uniform_crossover,
)
from .diversity import (
    HammingHistogram,
    PairwiseDistanceTracker,
    SpeciesCensus,
    SpeciesTracker,
    TraceIntegrityError,
    census,
    hamming_histogram,
    largest_species_series,
)
from .experiments import (
    ComparisonSummary,
    ConditionedEstimate,
    DistanceSeriesRun,
    DriftEstimate,
    ExperimentConfig,
    MonteCarloFrequency,
    SurvivalSummary,
    SweepCell,
    SweepResult,
    TakeoverSummary,
    estimate_transition,
    estimate_unconditioned_drift,
    run_bound_sweep,
    run_comparison,
    run_figure1,
    run_survival,
    run_takeover,
    sample_optimum_creation_frequency,
    sweep_grid_ys,
    takeover_reference,
    two_species_population,
)
from .ga import (
    EventClass,
    IntegrityError,
    Population,
    RunResult,
    SnapshotHook,
    StepTrace,
    StopCondition,
    check_population,
    classify_event,
    default_snapshot_stride,
    ga_step,
    init_monomorphic_plateau,
    init_uniform,
    run,
)

__version__ = "0.1.0"

__all__ = [
    "BoundReport",
    "ComparisonSummary",
    "ConditionedEstimate",
    "DistanceSeriesRun",
    "DriftEstimate",
    "DriftParams",
    "EventClass",
    "ExperimentConfig",
    "GaParams",
    "Genotype",
    "HammingHistogram",
    "IntegrityError",
    "MonteCarloFrequency",
    "PairwiseDistanceTracker",
    "Population",
    "RandomStream",
    "RunResult",
    "SnapshotHook",
    "SpeciesCensus",
    "SpeciesTracker",
    "StepTrace",
    "StopCondition",
    "SurvivalSummary",
    "SweepCell",
    "SweepResult",
    "TakeoverSummary",
    "TraceIntegrityError",
    "census",
    "check_population",
    "classify_event",
    "close_crossover_decrease_bound",
    "close_crossover_increase_bound",
    "close_crossover_increase_oscale",
    "default_snapshot_stride",
    "diversity_saturation_population",
    "drift_tail_bound",
    "estimate_transition",
    "estimate_unconditioned_drift",
    "exact_optimum_probability",
    "ga_step",
    "hamming_distance",
    "hamming_histogram",
    "init_monomorphic_plateau",
    "init_uniform",
    "jump_fitness",
    "largest_species_series",
    "make_rng",
    "mutation_only_increase_oscale",
    "mutation_only_transition_bounds",
    "no_flip_probability",
    "ones_count",
    "optimum_creation_lower_bound",
    "persistence_drift_params",
    "run",
    "run_bound_sweep",
    "run_comparison",
    "run_figure1",
    "run_survival",
    "run_takeover",
    "runtime_bound",
    "sample_optimum_creation_frequency",
    "standard_bit_mutation",
    "survival_constant",
    "sweep_grid_ys",
    "takeover_reference",
    "two_species_population",
    "uniform_crossover",
]
