"""Core model types and the reaction-kinetics right-hand sides.

A system of N units moves between three states: working alone (solo, s),
interacting (grupo, g), and blocked on a congested resource (fermo, f).
Seven mass-action transitions couple the populations:

    2S -> 2G   (rate k1)        2G -> 2F   (rate k5)
    S+G -> 2G  (rate k2)        G+F -> 2F  (rate k6)
    S+F -> G+F (rate k3)        F -> G     (rate k7)
    G -> S     (rate k4)

The mean-field ODE system is

    ds/dt = -2 k1 s^2 - k2 s g - k3 s f + k4 g
    dg/dt =  2 k1 s^2 + k2 s g + k3 s f - k4 g - 2 k5 g^2 - k6 g f + k7 f
    df/dt =  2 k5 g^2 + k6 g f - k7 f

with s + g + f = N conserved.  Populations are real-valued concentrations
(volume fixed to 1, so counts and concentrations coincide); the integer view
lives in `sgfscale.ssa`.
"""

import enum
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Rates",
    "Contribution",
    "PopulationState",
    "SystemConfig",
    "Stability",
    "FixedPoint",
    "rhs_full",
    "rhs_reduced",
    "jacobian_reduced",
]


def _require_finite(name, value):
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class Rates:
    """The seven transition rates, all >= 0, units 1/time.

    Pair-reaction rates (k1, k2, k3, k5, k6) are per-unit-concentration per
    time; with volume fixed to 1 they apply directly to population counts.
    """

    k1: float = 0.0
    k2: float = 0.0
    k3: float = 0.0
    k4: float = 0.0
    k5: float = 0.0
    k6: float = 0.0
    k7: float = 0.0

    def __post_init__(self):
        for name, value in self.as_dict().items():
            _require_finite(name, value)
            if value < 0:
                raise ValueError(f"{name} must be >= 0, got {value!r}")

    def as_tuple(self):
        return (self.k1, self.k2, self.k3, self.k4, self.k5, self.k6, self.k7)

    def as_dict(self):
        return {f"k{i}": v for i, v in enumerate(self.as_tuple(), start=1)}

    @property
    def all_zero(self):
        return all(v == 0.0 for v in self.as_tuple())


@dataclass(frozen=True)
class Contribution:
    """Per-unit throughput of solo (c_s) and grupo (c_g) units.

    Fermo units never contribute.
    """

    c_s: float = 1.0
    c_g: float = 0.0

    def __post_init__(self):
        for name in ("c_s", "c_g"):
            value = getattr(self, name)
            _require_finite(name, value)
            if value < 0:
                raise ValueError(f"{name} must be >= 0, got {value!r}")


@dataclass(frozen=True)
class PopulationState:
    """Real-valued populations (s, g, f) at time t."""

    s: float
    g: float
    f: float
    t: float = 0.0

    def __post_init__(self):
        for name in ("s", "g", "f", "t"):
            _require_finite(name, getattr(self, name))
        for name in ("s", "g", "f"):
            if getattr(self, name) < 0:
                raise ValueError(f"population {name} must be >= 0")

    @property
    def total(self):
        return self.s + self.g + self.f


@dataclass(frozen=True)
class SystemConfig:
    """Rates, contribution coefficients and system size for one scenario."""

    rates: Rates
    contribution: Contribution
    n: float

    def __post_init__(self):
        _require_finite("n", self.n)
        if self.n <= 0:
            raise ValueError(f"system size n must be > 0, got {self.n!r}")


class Stability(enum.Enum):
    STABLE = "stable"
    UNSTABLE = "unstable"
    MARGINAL = "marginal"


#: eigenvalue real parts within this band of zero count as marginal
DEFAULT_STABILITY_TOL = 1e-9


@dataclass(frozen=True)
class FixedPoint:
    """Converged populations with a stability label and the residual

    max(|ds/dt|, |dg/dt|, |df/dt|) evaluated at the point."""

    s_star: float
    g_star: float
    f_star: float
    stability: Stability
    residual: float

    @property
    def total(self):
        return self.s_star + self.g_star + self.f_star


def _flux_terms(s, g, f, k1, k2, k3, k4, k5, k6, k7):
    # One flux per reaction; every RHS component is a signed sum of these,
    # which is what keeps the three components summing to ~0 in floats.
    return (
        2.0 * k1 * s * s,
        k2 * s * g,
        k3 * s * f,
        k4 * g,
        2.0 * k5 * g * g,
        k6 * g * f,
        k7 * f,
    )


def _rhs(s, g, f, k1, k2, k3, k4, k5, k6, k7):
    t1, t2, t3, t4, t5, t6, t7 = _flux_terms(s, g, f, k1, k2, k3, k4, k5, k6, k7)
    return (
        -t1 - t2 - t3 + t4,
        t1 + t2 + t3 - t4 - t5 - t6 + t7,
        t5 + t6 - t7,
    )


def rhs_full(state: PopulationState, cfg: SystemConfig):
    """Time derivatives (ds/dt, dg/dt, df/dt) of the full three-ODE system."""
    for name, v in (("s", state.s), ("g", state.g), ("f", state.f)):
        if not math.isfinite(v):
            raise ValueError(f"non-finite population {name}")
    return _rhs(state.s, state.g, state.f, *cfg.rates.as_tuple())


def rhs_reduced(s: float, f: float, cfg: SystemConfig):
    """Derivatives (ds/dt, df/dt) of the reduced system with g = N - s - f.

    Agrees exactly with the (s, f) components of `rhs_full` evaluated at
    (s, N - s - f, f).
    """
    _check_reduced_point(s, f, cfg.n)
    g = cfg.n - s - f
    ds, _, df = _rhs(s, g, f, *cfg.rates.as_tuple())
    return ds, df


def _check_reduced_point(s, f, n):
    if not (math.isfinite(s) and math.isfinite(f)):
        raise ValueError("non-finite population")
    if s < 0 or f < 0:
        raise ValueError(f"populations must be >= 0, got s={s!r}, f={f!r}")
    if s + f > n * (1.0 + 1e-12) + 1e-12:
        raise ValueError(f"s + f = {s + f!r} exceeds system size n = {n!r}")


def _jacobian_entries(s, f, n, k1, k2, k3, k4, k5, k6, k7):
    g = n - s - f
    a11 = -4.0 * k1 * s - k2 * g + k2 * s - k3 * f - k4
    a12 = k2 * s - k3 * s - k4
    a21 = -4.0 * k5 * g - k6 * f
    a22 = -4.0 * k5 * g + k6 * g - k6 * f - k7
    return a11, a12, a21, a22


def jacobian_reduced(s: float, f: float, cfg: SystemConfig) -> np.ndarray:
    """Analytic 2x2 Jacobian of `rhs_reduced` with respect to (s, f)."""
    _check_reduced_point(s, f, cfg.n)
    a11, a12, a21, a22 = _jacobian_entries(s, f, cfg.n, *cfg.rates.as_tuple())
    return np.array([[a11, a12], [a21, a22]])


def classify_stability(
    s: float, f: float, rates: Rates, n: float, tol: float = DEFAULT_STABILITY_TOL
) -> Stability:
    """Label a point by the reduced-Jacobian eigenvalues.

    Stable needs both real parts < -tol; any real part > +tol is unstable;
    everything else (including the structurally frozen fermo direction of
    rate sets with k5 = k6 = k7 = 0, whose eigenvalue is exactly zero) is
    marginal.
    """
    a11, a12, a21, a22 = _jacobian_entries(s, f, n, *rates.as_tuple())
    eigs = np.linalg.eigvals(np.array([[a11, a12], [a21, a22]]))
    re = eigs.real
    if np.all(re < -tol):
        return Stability.STABLE
    if np.any(re > tol):
        return Stability.UNSTABLE
    return Stability.MARGINAL
