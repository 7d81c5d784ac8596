"""Vectorized steady-state solver for many (rates, N) systems at once.

Used by the fitting objective, where every differential-evolution generation
needs steady states for (candidates x data points) independent systems.  The
stepper is the same Dormand-Prince 5(4) pair with the damped polish phase as
`sgfscale.steady`, but every lane carries its own step size, clock and
convergence counter, so slow lanes never hold converged ones hostage;
converged (or failed) lanes are frozen and compacted away.

Lanes that exhaust the horizon or leave the simplex are reported as failed
rather than raising: the fitting objective maps them to a penalty value.
"""

import numpy as np

from .steady import (
    _A21, _A31, _A32, _A41, _A42, _A43, _A51, _A52, _A53, _A54,
    _A61, _A62, _A63, _A64, _A65, _B1, _B3, _B4, _B5, _B6,
    _E1, _E3, _E4, _E5, _E6, _E7, _POLISH_DAMP, SIMPLEX_TOL,
    IntegrationSettings, DEFAULT_SETTINGS,
)

__all__ = ["steady_states_batch"]


def _rhs_arrays(s, g, f, k):
    k1, k2, k3, k4, k5, k6, k7 = k
    t1 = 2.0 * k1 * s * s
    t2 = k2 * s * g
    t3 = k3 * s * f
    t4 = k4 * g
    t5 = 2.0 * k5 * g * g
    t6 = k6 * g * f
    t7 = k7 * f
    return (-t1 - t2 - t3 + t4, t1 + t2 + t3 - t4 - t5 - t6 + t7, t5 + t6 - t7)


def _jac_norm_arrays(s, f, n, k):
    k1, k2, k3, k4, k5, k6, k7 = k
    g = n - s - f
    r1 = np.abs(-4.0 * k1 * s - k2 * g + k2 * s - k3 * f - k4) + np.abs(k2 * s - k3 * s - k4)
    r2 = np.abs(-4.0 * k5 * g - k6 * f) + np.abs(-4.0 * k5 * g + k6 * g - k6 * f - k7)
    return np.maximum(r1, r2)


def _max3(a, b, c):
    return np.maximum(a, np.maximum(b, c))


def steady_states_batch(
    k_matrix: np.ndarray,
    n_values: np.ndarray,
    settings: IntegrationSettings = DEFAULT_SETTINGS,
):
    """Steady states of m independent systems.

    k_matrix    (m, 7) transition rates per lane
    n_values    (m,) system sizes per lane

    Returns (s, g, f, ok): four (m,) arrays.  Lanes with ok False did not
    certify a steady state (budget exhausted or simplex violation); their
    populations are the last accepted state.
    """
    k_matrix = np.asarray(k_matrix, dtype=float)
    n_values = np.asarray(n_values, dtype=float)
    m = len(n_values)
    if k_matrix.shape != (m, 7):
        raise ValueError(f"k_matrix must have shape ({m}, 7)")

    S = n_values.copy()
    G = np.zeros(m)
    F = np.zeros(m)
    OK = np.zeros(m, dtype=bool)

    rtol, atol = settings.rtol, settings.atol
    t_max = settings.t_max

    # live views over the still-active lanes
    idx = np.arange(m)
    k = tuple(k_matrix[:, j].copy() for j in range(7))
    n = n_values.copy()
    s, g, f = S.copy(), G.copy(), F.copy()
    t = np.zeros(m)
    h = np.full(m, min(settings.dt_initial, t_max))
    consec = np.zeros(m, dtype=np.int64)
    thresh = settings.steady_tol * np.maximum(1.0, n)
    slack = SIMPLEX_TOL * n

    d1 = _rhs_arrays(s, g, f, k)
    resid = _max3(np.abs(d1[0]), np.abs(d1[1]), np.abs(d1[2]))

    def _compact(keep):
        nonlocal idx, k, n, s, g, f, t, h, consec, thresh, slack, d1, resid
        idx = idx[keep]
        k = tuple(kk[keep] for kk in k)
        n = n[keep]
        s, g, f = s[keep], g[keep], f[keep]
        t, h = t[keep], h[keep]
        consec = consec[keep]
        thresh, slack = thresh[keep], slack[keep]
        d1 = tuple(d[keep] for d in d1)
        resid = resid[keep]

    already = resid < thresh
    if already.any():
        OK[idx[already]] = True
        _compact(~already)

    for _ in range(settings.max_steps):
        if len(idx) == 0:
            break
        jn = _jac_norm_arrays(s, f, n, k)
        ymax = _max3(np.abs(s), np.abs(g), np.abs(f))
        # Engage the damped polish phase above the adaptive jitter floor
        # (see sgfscale.steady); per-lane, others keep error-controlled steps.
        floor = jn * (atol + rtol * ymax)
        polish = resid < np.maximum(100.0 * thresh, 64.0 * floor)
        jn_safe = np.where(jn > 0.0, jn, 1.0)
        h = np.where(
            polish & (jn > 0.0),
            np.minimum(_POLISH_DAMP / jn_safe, t_max - t),
            np.minimum(h, t_max - t),
        )

        k1s, k1g, k1f = d1
        k2s, k2g, k2f = _rhs_arrays(
            s + h * (_A21 * k1s), g + h * (_A21 * k1g), f + h * (_A21 * k1f), k
        )
        k3s, k3g, k3f = _rhs_arrays(
            s + h * (_A31 * k1s + _A32 * k2s),
            g + h * (_A31 * k1g + _A32 * k2g),
            f + h * (_A31 * k1f + _A32 * k2f),
            k,
        )
        k4s, k4g, k4f = _rhs_arrays(
            s + h * (_A41 * k1s + _A42 * k2s + _A43 * k3s),
            g + h * (_A41 * k1g + _A42 * k2g + _A43 * k3g),
            f + h * (_A41 * k1f + _A42 * k2f + _A43 * k3f),
            k,
        )
        k5s, k5g, k5f = _rhs_arrays(
            s + h * (_A51 * k1s + _A52 * k2s + _A53 * k3s + _A54 * k4s),
            g + h * (_A51 * k1g + _A52 * k2g + _A53 * k3g + _A54 * k4g),
            f + h * (_A51 * k1f + _A52 * k2f + _A53 * k3f + _A54 * k4f),
            k,
        )
        k6s, k6g, k6f = _rhs_arrays(
            s + h * (_A61 * k1s + _A62 * k2s + _A63 * k3s + _A64 * k4s + _A65 * k5s),
            g + h * (_A61 * k1g + _A62 * k2g + _A63 * k3g + _A64 * k4g + _A65 * k5g),
            f + h * (_A61 * k1f + _A62 * k2f + _A63 * k3f + _A64 * k4f + _A65 * k5f),
            k,
        )
        sn = s + h * (_B1 * k1s + _B3 * k3s + _B4 * k4s + _B5 * k5s + _B6 * k6s)
        gn = g + h * (_B1 * k1g + _B3 * k3g + _B4 * k4g + _B5 * k5g + _B6 * k6g)
        fn = f + h * (_B1 * k1f + _B3 * k3f + _B4 * k4f + _B5 * k5f + _B6 * k6f)
        k7s, k7g, k7f = _rhs_arrays(sn, gn, fn, k)
        es = h * (_E1 * k1s + _E3 * k3s + _E4 * k4s + _E5 * k5s + _E6 * k6s + _E7 * k7s)
        eg = h * (_E1 * k1g + _E3 * k3g + _E4 * k4g + _E5 * k5g + _E6 * k6g + _E7 * k7g)
        ef = h * (_E1 * k1f + _E3 * k3f + _E4 * k4f + _E5 * k5f + _E6 * k6f + _E7 * k7f)

        ws = atol + rtol * np.maximum(np.abs(s), np.abs(sn))
        wg = atol + rtol * np.maximum(np.abs(g), np.abs(gn))
        wf = atol + rtol * np.maximum(np.abs(f), np.abs(fn))
        err = _max3(np.abs(es) / ws, np.abs(eg) / wg, np.abs(ef) / wf)
        err = np.where(np.isfinite(err), err, np.inf)
        bad_state = ~(np.isfinite(sn) & np.isfinite(gn) & np.isfinite(fn))
        accept = (polish | (err <= 1.0)) & ~bad_state

        t = np.where(accept, t + h, t)
        s = np.where(accept, sn, s)
        g = np.where(accept, gn, g)
        f = np.where(accept, fn, f)
        d1 = (
            np.where(accept, k7s, d1[0]),
            np.where(accept, k7g, d1[1]),
            np.where(accept, k7f, d1[2]),
        )
        resid = np.where(accept, _max3(np.abs(d1[0]), np.abs(d1[1]), np.abs(d1[2])), resid)

        defect = np.abs(s + g + f - n)
        low = np.minimum(s, np.minimum(g, f))
        violated = accept & ((defect > slack) | (low < -slack))

        below = resid < thresh
        consec = np.where(accept, np.where(below, consec + 1, 0), consec)
        converged = consec >= 2

        exhausted = (t >= t_max) & ~converged
        finished = converged | violated | exhausted
        if finished.any():
            lanes = idx[finished]
            S[lanes] = s[finished]
            G[lanes] = g[finished]
            F[lanes] = f[finished]
            OK[lanes] = (converged & ~violated)[finished]
            keep = ~finished
            _compact(keep)
            if len(idx) == 0:
                break
            polish, err = polish[keep], err[keep]

        err_safe = np.where(err > 0.0, err, 1.0)
        grow = np.where(err > 0.0, 0.9 * err_safe**-0.2, 5.0)
        h = np.where(polish, h, h * np.clip(grow, 0.2, 5.0))

    # lanes still active after the step budget: failed
    if len(idx) > 0:
        S[idx], G[idx], F[idx] = s, g, f
        OK[idx] = False
    return S, G, F, OK
