"""Rate recovery from throughput data via differential evolution.

The objective evaluates a candidate (k1..k7, c_s) by integrating the model
to steady state at every dataset size and scoring the mean squared error of
the predicted throughput curve; a self-contained DE/rand/1/bin optimizer
(dithered mutation factor, binomial crossover, greedy selection) searches
the box-constrained parameter space.  Whole generations are evaluated as one
batched steady-state solve, which is what the generation-synchronous DE
semantics allow.

Only curve-level recovery is meaningful here: eight parameters against a
few dozen points are not identifiable, and two of the rates are exactly
degenerate whenever fermo stays unpopulated, so tests and callers should
compare fitted curves (MSE), never fitted parameter values.
"""

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .batch import steady_states_batch
from .model import Contribution, Rates
from .steady import DEFAULT_SETTINGS, IntegrationSettings

__all__ = [
    "Dataset",
    "DeSettings",
    "DeResult",
    "FitSpec",
    "FitResult",
    "PARAM_NAMES",
    "objective_mse",
    "de_minimize",
    "differential_evolution",
    "fit_dataset",
]

PARAM_NAMES = ("k1", "k2", "k3", "k4", "k5", "k6", "k7", "c_s")


@dataclass(frozen=True)
class Dataset:
    """Observed (n, x) throughput points, n strictly increasing."""

    n: np.ndarray
    x: np.ndarray
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "n", np.asarray(self.n, dtype=float))
        object.__setattr__(self, "x", np.asarray(self.x, dtype=float))
        if self.n.ndim != 1 or self.n.shape != self.x.shape:
            raise ValueError("n and x must be 1-D arrays of equal length")
        if len(self.n) < 2:
            raise ValueError("a dataset needs at least 2 points")
        if not np.all(np.isfinite(self.n)) or not np.all(np.isfinite(self.x)):
            raise ValueError("dataset values must be finite")
        if not np.all(np.diff(self.n) > 0):
            raise ValueError("n must be strictly increasing")

    @property
    def points(self):
        return list(zip(self.n.tolist(), self.x.tolist()))

    def __len__(self):
        return len(self.n)


@dataclass(frozen=True)
class DeSettings:
    """DE/rand/1/bin hyperparameters.

    pop_size None means 15 x (number of free parameters).  The mutation
    factor is dithered per mutant, uniform in [f_min, f_max].  Termination:
    max_generations, or population objective stddev < tol * |mean|.
    """

    pop_size: int | None = None
    f_min: float = 0.5
    f_max: float = 1.0
    crossover: float = 0.7
    max_generations: int = 300
    tol: float = 1e-8
    seed: int = 0

    def __post_init__(self):
        if self.pop_size is not None and self.pop_size < 4:
            raise ValueError("pop_size must be >= 4")
        if not (0.0 <= self.f_min <= self.f_max):
            raise ValueError("need 0 <= f_min <= f_max")
        if not (0.0 < self.crossover <= 1.0):
            raise ValueError("crossover must be in (0, 1]")
        if self.max_generations < 1:
            raise ValueError("max_generations must be >= 1")


@dataclass(frozen=True)
class DeResult:
    x: np.ndarray
    fun: float
    generations: int
    evaluations: int
    converged: bool


@dataclass(frozen=True)
class FitSpec:
    """What to fit and how.

    bounds           per-parameter search box for k1..k7 and c_s
    fixed            parameters pinned to constants (excluded from search)
    c_g              grupo contribution, pinned (0 for the standard
                     parallel-workload reading)
    pin_cs_to_first  pin c_s to the first data point's x (the X(1) = c_s
                     convention; assumes the axis was normalized so the
                     first point sits at N = 1)
    penalty_factor   integration failures score penalty_factor * max(x)^2,
                     which dominates any genuine MSE on the data
    """

    bounds: dict = field(default_factory=dict)
    fixed: dict = field(default_factory=dict)
    c_g: float = 0.0
    pin_cs_to_first: bool = False
    penalty_factor: float = 1e6
    de: DeSettings = field(default_factory=DeSettings)

    DEFAULT_BOUNDS = {name: (0.0, 10.0) for name in PARAM_NAMES}

    def __post_init__(self):
        for name in self.bounds:
            if name not in PARAM_NAMES:
                raise ValueError(f"unknown parameter {name!r}")
        for name in self.fixed:
            if name not in PARAM_NAMES:
                raise ValueError(f"unknown parameter {name!r}")
        for name, (lo, hi) in self.effective_bounds().items():
            if not (math.isfinite(lo) and math.isfinite(hi) and lo <= hi):
                raise ValueError(f"invalid bounds for {name}: [{lo}, {hi}]")
        if not self.free_names():
            raise ValueError("at least one parameter must be free")

    def effective_bounds(self):
        out = dict(self.DEFAULT_BOUNDS)
        out.update(self.bounds)
        return out

    def free_names(self):
        return [name for name in PARAM_NAMES if name not in self.fixed]

    def assemble(self, free_matrix: np.ndarray) -> np.ndarray:
        """Insert fixed values into (m, n_free) rows -> (m, 8) full vectors."""
        free_matrix = np.atleast_2d(free_matrix)
        full = np.empty((free_matrix.shape[0], len(PARAM_NAMES)))
        j = 0
        for i, name in enumerate(PARAM_NAMES):
            if name in self.fixed:
                full[:, i] = self.fixed[name]
            else:
                full[:, i] = free_matrix[:, j]
                j += 1
        return full


def objective_mse(
    params,
    data: Dataset,
    spec: FitSpec,
    settings: IntegrationSettings = DEFAULT_SETTINGS,
):
    """Mean squared error of the model throughput curve against the data.

    `params` is one full parameter vector (k1..k7, c_s) or a (m, 8) matrix
    of candidates; returns a float or an (m,) array accordingly.  Steady
    states come from time integration from the all-solo start at every
    dataset size.  Candidates whose integration fails anywhere score the
    configured penalty instead of raising.
    """
    arr = np.asarray(params, dtype=float)
    single = arr.ndim == 1
    arr = np.atleast_2d(arr)
    if arr.shape[1] != len(PARAM_NAMES):
        raise ValueError(f"parameter vectors must have {len(PARAM_NAMES)} entries")
    m = arr.shape[0]
    npts = len(data)
    # lanes: candidate-major blocks of the dataset sizes
    k_lanes = np.repeat(arr[:, :7], npts, axis=0)
    n_lanes = np.tile(data.n, m)
    s, g, _, ok = steady_states_batch(k_lanes, n_lanes, settings)
    c_s = arr[:, 7]
    x_model = c_s[:, None] * s.reshape(m, npts) + spec.c_g * g.reshape(m, npts)
    mse = np.mean((x_model - data.x[None, :]) ** 2, axis=1)
    penalty = spec.penalty_factor * float(np.max(np.abs(data.x))) ** 2
    failed = ~ok.reshape(m, npts).all(axis=1)
    mse = np.where(failed, penalty, mse)
    return float(mse[0]) if single else mse


def de_minimize(func, bounds, settings: DeSettings = DeSettings(), vectorized: bool = False):
    """Minimize func over a box with DE/rand/1/bin.

    bounds is a sequence of (lo, hi) pairs.  With vectorized=True, func is
    called once per generation with an (m, d) matrix and must return (m,)
    values; otherwise it is called per candidate vector.  Mutants use
    x_r1 + F (x_r2 - x_r3) with distinct indices and per-mutant F drawn
    uniformly from [f_min, f_max]; out-of-bounds coordinates are resampled
    uniformly inside the box; one crossover coordinate per trial is forced.
    """
    lo = np.array([b[0] for b in bounds], dtype=float)
    hi = np.array([b[1] for b in bounds], dtype=float)
    d = len(bounds)
    pop_size = settings.pop_size or max(4, 15 * d)
    rng = np.random.Generator(np.random.PCG64(settings.seed))

    def evaluate(matrix):
        if vectorized:
            return np.asarray(func(matrix), dtype=float)
        return np.array([float(func(row)) for row in matrix])

    pop = lo + rng.random((pop_size, d)) * (hi - lo)
    fvals = evaluate(pop)
    evaluations = pop_size
    converged = False
    generations = 0
    for generations in range(1, settings.max_generations + 1):
        factors = rng.uniform(settings.f_min, settings.f_max, size=pop_size)
        r1 = np.empty(pop_size, dtype=int)
        r2 = np.empty(pop_size, dtype=int)
        r3 = np.empty(pop_size, dtype=int)
        for j in range(pop_size):
            choices = rng.permutation(pop_size - 1)[:3]
            choices = np.where(choices >= j, choices + 1, choices)  # skip target
            r1[j], r2[j], r3[j] = choices
        mutants = pop[r1] + factors[:, None] * (pop[r2] - pop[r3])
        out = (mutants < lo) | (mutants > hi)
        if out.any():
            mutants[out] = (lo + rng.random((pop_size, d)) * (hi - lo))[out]
        cross = rng.random((pop_size, d)) < settings.crossover
        forced = rng.integers(0, d, size=pop_size)
        cross[np.arange(pop_size), forced] = True
        trials = np.where(cross, mutants, pop)
        tvals = evaluate(trials)
        evaluations += pop_size
        better = tvals <= fvals
        pop[better] = trials[better]
        fvals[better] = tvals[better]
        mean = np.mean(fvals)
        if np.std(fvals) < settings.tol * abs(mean):
            converged = True
            break
    best = int(np.argmin(fvals))
    return DeResult(
        x=pop[best].copy(),
        fun=float(fvals[best]),
        generations=generations,
        evaluations=evaluations,
        converged=converged,
    )


@dataclass(frozen=True)
class FitResult:
    rates: Rates
    c_s: float
    c_g: float
    mse: float
    generations_used: int
    converged: bool
    objective_evaluations: int

    @property
    def contribution(self):
        return Contribution(c_s=self.c_s, c_g=self.c_g)


def differential_evolution(spec: FitSpec, objective) -> FitResult:
    """Search the spec's free parameters; `objective` sees full (m, 8) rows."""
    names = spec.free_names()
    bounds = [spec.effective_bounds()[name] for name in names]

    def wrapped(free_matrix):
        return objective(spec.assemble(free_matrix))

    res = de_minimize(wrapped, bounds, spec.de, vectorized=True)
    full = spec.assemble(res.x[None, :])[0]
    rates = Rates(*[max(v, 0.0) for v in full[:7]])
    return FitResult(
        rates=rates,
        c_s=float(full[7]),
        c_g=spec.c_g,
        mse=res.fun,
        generations_used=res.generations,
        converged=res.converged,
        objective_evaluations=res.evaluations,
    )


def fit_dataset(
    data: Dataset,
    spec: FitSpec = FitSpec(),
    settings: IntegrationSettings = DEFAULT_SETTINGS,
) -> FitResult:
    """Fit transition rates (and c_s unless pinned) to a throughput dataset."""
    if spec.pin_cs_to_first and "c_s" not in spec.fixed:
        fixed = dict(spec.fixed)
        fixed["c_s"] = float(data.x[0])
        spec = replace(spec, fixed=fixed)

    def objective(full_matrix):
        return objective_mse(full_matrix, data, spec, settings)

    return differential_evolution(spec, objective)
