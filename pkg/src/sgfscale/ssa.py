"""Exact stochastic simulation of the seven reactions at integer counts.

Propensities follow standard mass action for discrete populations:
same-species pair reactions use x(x-1) (number of ordered pairs), so the
expected fluxes converge to the mean-field ODE terms 2k x^2 as populations
grow.  Every reaction moves units between states without creating or
destroying them, so s + g + f = N holds exactly at every event.

Runs are reproducible: the ensemble master seed is split into independent
per-run streams (PCG64 via SeedSequence.spawn), and a fixed seed yields a
bitwise-identical trajectory.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericalError
from .model import Rates

__all__ = [
    "DiscreteState",
    "SsaSettings",
    "EnsembleStats",
    "STOICHIOMETRY",
    "propensities",
    "step",
    "simulate",
    "run_ensemble",
]

# Per-reaction population deltas (ds, dg, df):
#   2S->2G, S+G->2G, S+F->G+F, G->S, 2G->2F, G+F->2F, F->G
STOICHIOMETRY = (
    (-2, 2, 0),
    (-1, 1, 0),
    (-1, 1, 0),
    (1, -1, 0),
    (0, -2, 2),
    (0, -1, 1),
    (0, 1, -1),
)

_RNG_BUFFER = 8192


@dataclass(frozen=True)
class DiscreteState:
    """Integer populations at time t."""

    s: int
    g: int
    f: int
    t: float = 0.0

    def __post_init__(self):
        for name in ("s", "g", "f"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or v < 0:
                raise ValueError(f"{name} must be a non-negative integer, got {v!r}")

    @property
    def total(self):
        return self.s + self.g + self.f


@dataclass(frozen=True)
class SsaSettings:
    t_end: float = 20.0
    seed: int = 0
    record_interval: float = 0.5

    def __post_init__(self):
        if not (math.isfinite(self.t_end) and self.t_end > 0):
            raise ValueError("t_end must be > 0")
        if not (math.isfinite(self.record_interval) and self.record_interval > 0):
            raise ValueError("record_interval must be > 0")


@dataclass(frozen=True)
class EnsembleStats:
    """Per-sample-time moments of (s, g, f) over an ensemble of runs.

    `mean` and `var` have shape (len(times), 3); `var` is the population
    variance over runs (zero for a single run).
    """

    times: np.ndarray
    mean: np.ndarray
    var: np.ndarray
    runs: int


def propensities(state: DiscreteState, rates: Rates) -> np.ndarray:
    """The seven reaction propensities at an integer state."""
    s, g, f = state.s, state.g, state.f
    k1, k2, k3, k4, k5, k6, k7 = rates.as_tuple()
    return np.array(
        [
            k1 * s * (s - 1),
            k2 * s * g,
            k3 * s * f,
            k4 * g,
            k5 * g * (g - 1),
            k6 * g * f,
            k7 * f,
        ],
        dtype=float,
    )


def step(state: DiscreteState, rates: Rates, rng: np.random.Generator):
    """Advance by one reaction event.

    Returns (next_state, waiting_time).  The waiting time is exponential with
    rate sum(propensities); the reaction is chosen proportionally to its
    propensity.  A state with zero total propensity is absorbing: the state
    comes back unchanged with an infinite waiting time.
    """
    a = propensities(state, rates)
    total = float(a.sum())
    if total <= 0.0:
        return state, math.inf
    dt = rng.exponential(1.0 / total)
    target = rng.random() * total
    acc = 0.0
    j = 6
    for i in range(7):
        acc += a[i]
        if target < acc:
            j = i
            break
    ds, dg, df = STOICHIOMETRY[j]
    new = DiscreteState(state.s + ds, state.g + dg, state.f + df, state.t + dt)
    if new.total != state.total:
        raise NumericalError("reaction update broke conservation")  # unreachable
    return new, dt


def simulate(n: int, rates: Rates, t_end: float, sample_times, rng: np.random.Generator):
    """One trajectory from (n, 0, 0); returns integer states at sample_times.

    Sampling is piecewise-constant: each sample time reports the state that
    was current just before the next event.  Conservation is checked at
    every event.
    """
    k1, k2, k3, k4, k5, k6, k7 = rates.as_tuple()
    sample_times = np.asarray(sample_times, dtype=float)
    out = np.empty((len(sample_times), 3), dtype=np.int64)
    s, g, f = int(n), 0, 0
    t = 0.0
    si = 0
    exps = rng.standard_exponential(_RNG_BUFFER)
    unis = rng.random(_RNG_BUFFER)
    ui = 0
    while True:
        a1 = k1 * s * (s - 1)
        a2 = k2 * s * g
        a3 = k3 * s * f
        a4 = k4 * g
        a5 = k5 * g * (g - 1)
        a6 = k6 * g * f
        a7 = k7 * f
        total = a1 + a2 + a3 + a4 + a5 + a6 + a7
        if total <= 0.0:
            t_next = math.inf
        else:
            if ui >= _RNG_BUFFER:
                exps = rng.standard_exponential(_RNG_BUFFER)
                unis = rng.random(_RNG_BUFFER)
                ui = 0
            t_next = t + exps[ui] / total
        while si < len(sample_times) and sample_times[si] < t_next:
            out[si, 0] = s
            out[si, 1] = g
            out[si, 2] = f
            si += 1
        if si >= len(sample_times) or t_next > t_end:
            break
        r = unis[ui] * total
        ui += 1
        t = t_next
        if r < a1:
            s -= 2; g += 2
        elif r < a1 + a2:
            s -= 1; g += 1
        elif r < a1 + a2 + a3:
            s -= 1; g += 1
        elif r < a1 + a2 + a3 + a4:
            g -= 1; s += 1
        elif r < a1 + a2 + a3 + a4 + a5:
            g -= 2; f += 2
        elif r < a1 + a2 + a3 + a4 + a5 + a6:
            g -= 1; f += 1
        else:
            f -= 1; g += 1
        if s + g + f != n:
            raise NumericalError("reaction update broke conservation")  # unreachable
    return out


def sample_grid(settings: SsaSettings) -> np.ndarray:
    """Recording times 0, dt, 2dt, ... up to (and possibly including) t_end."""
    count = int(math.floor(settings.t_end / settings.record_interval + 1e-9)) + 1
    return settings.record_interval * np.arange(count)


def run_ensemble(n: int, rates: Rates, settings: SsaSettings, runs: int) -> EnsembleStats:
    """Independent trajectories from (n, 0, 0) with split per-run seeds."""
    if n < 1 or int(n) != n:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    if runs < 1:
        raise ValueError(f"runs must be >= 1, got {runs!r}")
    times = sample_grid(settings)
    children = np.random.SeedSequence(settings.seed).spawn(runs)
    trajectories = np.empty((runs, len(times), 3), dtype=np.int64)
    for i in range(runs):
        rng = np.random.Generator(np.random.PCG64(children[i]))
        trajectories[i] = simulate(int(n), rates, settings.t_end, times, rng)
    mean = trajectories.mean(axis=0)
    var = trajectories.var(axis=0)
    return EnsembleStats(times=times, mean=mean, var=var, runs=runs)
