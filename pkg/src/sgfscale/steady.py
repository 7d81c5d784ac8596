"""Steady-state computation by time integration, and size sweeps.

The stable operating point of a configuration is defined as the limit of the
trajectory started from the all-solo state (s, g, f) = (N, 0, 0).  It is
found by integrating the full three-ODE system with an adaptive embedded
Dormand-Prince 5(4) pair until the right-hand side's max-norm stays below
``steady_tol * max(1, N)`` for two consecutive accepted steps.

Near the fixed point an error-controlled integrator grows its steps until the
accepted-state jitter sits at the local error tolerance, which can keep the
residual permanently above a tight steadiness threshold.  To certify
steadiness the stepper therefore switches to a "polish" phase once the
residual comes within reach: steps are capped at 0.8 / ||J|| (J = reduced
Jacobian at the current point), which keeps every mode of the linearized
dynamics strongly damped so the distance to the fixed point decays
geometrically to rounding level.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, NumericalError
from .model import (
    Contribution,
    FixedPoint,
    Rates,
    Stability,
    SystemConfig,
    _jacobian_entries,
    _rhs,
    classify_stability,
)

__all__ = [
    "IntegrationSettings",
    "IntegrationDiagnostics",
    "SweepRow",
    "SweepResult",
    "integrate_to_steady",
    "sweep",
    "find_critical_n",
]

# Dormand-Prince 5(4) tableau (FSAL).
_A21 = 1 / 5
_A31, _A32 = 3 / 40, 9 / 40
_A41, _A42, _A43 = 44 / 45, -56 / 15, 32 / 9
_A51, _A52, _A53, _A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
_A61, _A62, _A63, _A64, _A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
_B1, _B3, _B4, _B5, _B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
_E1, _E3, _E4, _E5, _E6, _E7 = (
    71 / 57600,
    -71 / 16695,
    71 / 1920,
    -17253 / 339200,
    22 / 525,
    -1 / 40,
)

# Conservation / positivity slack, relative to N (checked per accepted step).
SIMPLEX_TOL = 1e-9

# Polish-phase damping: step <= _POLISH_DAMP / ||J||_inf.
_POLISH_DAMP = 0.8


@dataclass(frozen=True)
class IntegrationSettings:
    """Knobs for the steady-state integrator.

    dt_initial  first attempted step
    t_max       horizon cap; reaching it raises ConvergenceError
    steady_tol  residual threshold, scaled by max(1, N)
    max_steps   attempted-step cap
    rtol, atol  local error tolerances of the embedded pair
    """

    dt_initial: float = 0.01
    t_max: float = 1e6
    steady_tol: float = 1e-9
    max_steps: int = 10_000_000
    rtol: float = 1e-8
    atol: float = 1e-10

    def __post_init__(self):
        for name in ("dt_initial", "t_max", "steady_tol", "rtol", "atol"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be a positive finite number")
        if self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")


DEFAULT_SETTINGS = IntegrationSettings()


@dataclass(frozen=True)
class IntegrationDiagnostics:
    """Per-run quality numbers gathered over all accepted steps."""

    steps_accepted: int
    t_final: float
    max_conservation_defect: float
    min_population: float


def _step_dp54(s, g, f, h, d1, k):
    """One Dormand-Prince 5(4) step; returns (new state, new rhs, error triple)."""
    k1s, k1g, k1f = d1
    k2s, k2g, k2f = _rhs(s + h * _A21 * k1s, g + h * _A21 * k1g, f + h * _A21 * k1f, *k)
    k3s, k3g, k3f = _rhs(
        s + h * (_A31 * k1s + _A32 * k2s),
        g + h * (_A31 * k1g + _A32 * k2g),
        f + h * (_A31 * k1f + _A32 * k2f),
        *k,
    )
    k4s, k4g, k4f = _rhs(
        s + h * (_A41 * k1s + _A42 * k2s + _A43 * k3s),
        g + h * (_A41 * k1g + _A42 * k2g + _A43 * k3g),
        f + h * (_A41 * k1f + _A42 * k2f + _A43 * k3f),
        *k,
    )
    k5s, k5g, k5f = _rhs(
        s + h * (_A51 * k1s + _A52 * k2s + _A53 * k3s + _A54 * k4s),
        g + h * (_A51 * k1g + _A52 * k2g + _A53 * k3g + _A54 * k4g),
        f + h * (_A51 * k1f + _A52 * k2f + _A53 * k3f + _A54 * k4f),
        *k,
    )
    k6s, k6g, k6f = _rhs(
        s + h * (_A61 * k1s + _A62 * k2s + _A63 * k3s + _A64 * k4s + _A65 * k5s),
        g + h * (_A61 * k1g + _A62 * k2g + _A63 * k3g + _A64 * k4g + _A65 * k5g),
        f + h * (_A61 * k1f + _A62 * k2f + _A63 * k3f + _A64 * k4f + _A65 * k5f),
        *k,
    )
    sn = s + h * (_B1 * k1s + _B3 * k3s + _B4 * k4s + _B5 * k5s + _B6 * k6s)
    gn = g + h * (_B1 * k1g + _B3 * k3g + _B4 * k4g + _B5 * k5g + _B6 * k6g)
    fn = f + h * (_B1 * k1f + _B3 * k3f + _B4 * k4f + _B5 * k5f + _B6 * k6f)
    k7s, k7g, k7f = _rhs(sn, gn, fn, *k)
    es = h * (_E1 * k1s + _E3 * k3s + _E4 * k4s + _E5 * k5s + _E6 * k6s + _E7 * k7s)
    eg = h * (_E1 * k1g + _E3 * k3g + _E4 * k4g + _E5 * k5g + _E6 * k6g + _E7 * k7g)
    ef = h * (_E1 * k1f + _E3 * k3f + _E4 * k4f + _E5 * k5f + _E6 * k6f + _E7 * k7f)
    return (sn, gn, fn), (k7s, k7g, k7f), (es, eg, ef)


def _integrate(k, n, settings):
    """Drive (N, 0, 0) to steady state; returns (state, residual, diagnostics)."""
    rtol, atol = settings.rtol, settings.atol
    thresh = settings.steady_tol * max(1.0, n)
    t_max = settings.t_max
    s, g, f = float(n), 0.0, 0.0
    t = 0.0
    h = min(settings.dt_initial, t_max)
    d1 = _rhs(s, g, f, *k)
    r = max(abs(d1[0]), abs(d1[1]), abs(d1[2]))
    cons_slack = SIMPLEX_TOL * n
    naccept = 0
    max_defect = 0.0
    min_pop = 0.0
    if r < thresh:
        return (s, g, f), r, IntegrationDiagnostics(0, 0.0, 0.0, 0.0)
    consec = 0
    for _ in range(settings.max_steps):
        if t >= t_max:
            break
        a11, a12, a21, a22 = _jacobian_entries(s, f, n, *k)
        jnorm = max(abs(a11) + abs(a12), abs(a21) + abs(a22))
        ymax = max(abs(s), abs(g), abs(f))
        # Adaptive stepping keeps the accepted-state jitter near the local
        # error weight, so the residual floor is about jnorm * weight; engage
        # the damped polish phase safely above that floor.
        floor = jnorm * (atol + rtol * ymax)
        polish = r < max(100.0 * thresh, 64.0 * floor)
        if polish and jnorm > 0.0:
            h = min(_POLISH_DAMP / jnorm, t_max - t)
        elif t + h > t_max:
            h = t_max - t
        (sn, gn, fn), d_new, (es, eg, ef) = _step_dp54(s, g, f, h, d1, k)
        if polish:
            accept = True
        else:
            ws = atol + rtol * max(abs(s), abs(sn))
            wg = atol + rtol * max(abs(g), abs(gn))
            wf = atol + rtol * max(abs(f), abs(fn))
            err = max(abs(es) / ws, abs(eg) / wg, abs(ef) / wf)
            accept = err <= 1.0
        if accept:
            t += h
            s, g, f = sn, gn, fn
            d1 = d_new
            naccept += 1
            defect = abs(s + g + f - n)
            max_defect = max(max_defect, defect)
            low = min(s, g, f)
            min_pop = min(min_pop, low)
            if defect > cons_slack or low < -cons_slack:
                raise NumericalError(
                    f"state left the simplex at t={t:g} "
                    f"(defect={defect:g}, min population={low:g})"
                )
            r = max(abs(d1[0]), abs(d1[1]), abs(d1[2]))
            if r < thresh:
                consec += 1
                if consec >= 2:
                    return (s, g, f), r, IntegrationDiagnostics(naccept, t, max_defect, min_pop)
            else:
                consec = 0
        if not polish:
            fac = 0.9 * err**-0.2 if err > 0.0 else 5.0
            h *= min(5.0, max(0.2, fac))
    raise ConvergenceError(
        f"no steady state within t_max={settings.t_max:g} / "
        f"max_steps={settings.max_steps} (residual {r:g}, threshold {thresh:g})",
        state=(s, g, f),
        residual=r,
        n=n,
    )


def integrate_to_steady(
    cfg: SystemConfig,
    settings: IntegrationSettings = DEFAULT_SETTINGS,
    with_diagnostics: bool = False,
):
    """Integrate from (N, 0, 0) until steady and classify the terminal point.

    Returns a FixedPoint, or (FixedPoint, IntegrationDiagnostics) when
    ``with_diagnostics`` is set.  Raises ConvergenceError (carrying the last
    state and residual) if the budget runs out, NumericalError if the
    trajectory leaves the simplex.

    With all rates zero the dynamics are frozen: the initial point is
    returned immediately and labelled stable by convention (every point is
    an equilibrium; this is the ideal linear-speedup case).
    """
    if cfg.rates.all_zero:
        fp = FixedPoint(cfg.n, 0.0, 0.0, Stability.STABLE, 0.0)
        diag = IntegrationDiagnostics(0, 0.0, 0.0, 0.0)
        return (fp, diag) if with_diagnostics else fp
    (s, g, f), residual, diag = _integrate(cfg.rates.as_tuple(), cfg.n, settings)
    # report tiny negative round-off as zero
    s, g, f = max(s, 0.0), max(g, 0.0), max(f, 0.0)
    stability = classify_stability(
        min(s, cfg.n), min(f, cfg.n), cfg.rates, cfg.n, settings.steady_tol
    )
    fp = FixedPoint(s, g, f, stability, residual)
    return (fp, diag) if with_diagnostics else fp


@dataclass(frozen=True)
class SweepRow:
    """One sweep entry; speedup is None when c_s = 0 (undefined)."""

    n: float
    s: float
    g: float
    f: float
    throughput: float
    speedup: float | None


@dataclass(frozen=True)
class SweepResult:
    rows: tuple

    def __post_init__(self):
        ns = [row.n for row in self.rows]
        if any(b <= a for a, b in zip(ns, ns[1:])):
            raise ValueError("sweep rows must have strictly increasing n")

    def __len__(self):
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(row, name) for row in self.rows], dtype=float)


def sweep(
    rates: Rates,
    contribution: Contribution,
    n_values,
    settings: IntegrationSettings = DEFAULT_SETTINGS,
) -> SweepResult:
    """Steady states, throughput and speedup over a grid of system sizes.

    Each row is computed independently from the all-solo start.  Convergence
    failures are re-raised with the offending n attached.
    """
    n_values = [float(v) for v in n_values]
    if not n_values:
        raise ValueError("n_values must be non-empty")
    if any(v <= 0 for v in n_values):
        raise ValueError("all n values must be > 0")
    if any(b <= a for a, b in zip(n_values, n_values[1:])):
        raise ValueError("n values must be strictly increasing")
    rows = []
    for n in n_values:
        cfg = SystemConfig(rates, contribution, n)
        try:
            fp = integrate_to_steady(cfg, settings)
        except ConvergenceError as exc:
            raise ConvergenceError(
                f"sweep failed at n={n:g}: {exc}", state=exc.state, residual=exc.residual, n=n
            ) from exc
        x = contribution.c_s * fp.s_star + contribution.c_g * fp.g_star
        if contribution.c_s > 0:
            sp = fp.s_star + (contribution.c_g / contribution.c_s) * fp.g_star
        else:
            sp = None
        rows.append(SweepRow(n, fp.s_star, fp.g_star, fp.f_star, x, sp))
    return SweepResult(tuple(rows))


def find_critical_n(sweep_result: SweepResult):
    """Locate the interior throughput maximum of a sweep, if there is one.

    Returns (n_c, x_max) for a curve that rises to an interior peak and then
    strictly decreases to the end of the sweep; None for monotone curves.
    Among exactly tied maxima the smallest n wins.
    """
    rows = sweep_result.rows
    if not rows:
        raise ValueError("empty sweep")
    x = [row.throughput for row in rows]
    i = max(range(len(x)), key=lambda j: (x[j], -j))  # first index of the max
    if i == 0 or i == len(x) - 1:
        return None
    if any(x[j] <= x[j + 1] for j in range(i, len(x) - 1)):
        return None
    return rows[i].n, x[i]
