"""Mechanistic three-state scalability model (solo / grupo / fermo).

System units interact through seven mass-action transitions; the resulting
population dynamics reproduce the classical scalability laws (Amdahl,
Gustafson, Gunther's USL, swarm performance) as special cases and extend
them with a microscopic interpretation.  The package computes steady states
and throughput/speedup curves over system size, validates the mean-field
ODE against exact stochastic simulation, and fits transition rates to
empirical throughput data.
"""

from .errors import (
    ConvergenceError,
    DatasetParseError,
    NumericalError,
    SingularFixedPointError,
    UndefinedSpeedupError,
)
from .model import (
    Contribution,
    FixedPoint,
    PopulationState,
    Rates,
    Stability,
    SystemConfig,
    jacobian_reduced,
    rhs_full,
    rhs_reduced,
)
from .steady import (
    IntegrationDiagnostics,
    IntegrationSettings,
    SweepResult,
    SweepRow,
    find_critical_n,
    integrate_to_steady,
    sweep,
)
from .laws import (
    AmdahlParams,
    GustafsonParams,
    SwarmParams,
    UslParams,
    amdahl_speedup,
    fp_amdahl,
    fp_diminishing,
    fp_ideal_concurrency,
    gustafson_speedup,
    speedup,
    swarm_performance,
    throughput,
    usl_approx_speedup,
    usl_speedup,
)
from .ssa import DiscreteState, EnsembleStats, SsaSettings, propensities, run_ensemble, simulate, step
from .fitting import (
    Dataset,
    DeResult,
    DeSettings,
    FitResult,
    FitSpec,
    de_minimize,
    differential_evolution,
    fit_dataset,
    objective_mse,
)
from .io import ParamsDocument, normalize_axis, parse_dataset
from .presets import TABLE1_RATES, TABLE2, get_preset

__version__ = "0.1.0"

__all__ = [
    "AmdahlParams",
    "Contribution",
    "ConvergenceError",
    "Dataset",
    "DatasetParseError",
    "DeResult",
    "DeSettings",
    "DiscreteState",
    "EnsembleStats",
    "FitResult",
    "FitSpec",
    "FixedPoint",
    "GustafsonParams",
    "IntegrationDiagnostics",
    "IntegrationSettings",
    "NumericalError",
    "ParamsDocument",
    "PopulationState",
    "Rates",
    "SingularFixedPointError",
    "Stability",
    "SsaSettings",
    "SwarmParams",
    "SweepResult",
    "SweepRow",
    "SystemConfig",
    "TABLE1_RATES",
    "TABLE2",
    "UndefinedSpeedupError",
    "UslParams",
    "amdahl_speedup",
    "de_minimize",
    "differential_evolution",
    "find_critical_n",
    "fit_dataset",
    "fp_amdahl",
    "fp_diminishing",
    "fp_ideal_concurrency",
    "get_preset",
    "gustafson_speedup",
    "integrate_to_steady",
    "jacobian_reduced",
    "normalize_axis",
    "objective_mse",
    "parse_dataset",
    "propensities",
    "rhs_full",
    "rhs_reduced",
    "run_ensemble",
    "simulate",
    "speedup",
    "step",
    "swarm_performance",
    "sweep",
    "throughput",
    "usl_approx_speedup",
    "usl_speedup",
]
