import math

import numpy as np
import pytest

from sgfscale.model import (
    Contribution,
    PopulationState,
    Rates,
    SystemConfig,
    jacobian_reduced,
    rhs_full,
    rhs_reduced,
)
from sgfscale.presets import TABLE1_RATES


def cfg_for(rates, n=100.0):
    return SystemConfig(rates, Contribution(), n)


class TestTypes:
    def test_negative_rate_rejected(self):
        with pytest.raises(ValueError):
            Rates(k1=-0.1)

    def test_non_finite_rate_rejected(self):
        with pytest.raises(ValueError):
            Rates(k3=math.nan)
        with pytest.raises(ValueError):
            Rates(k7=math.inf)

    def test_contribution_validation(self):
        with pytest.raises(ValueError):
            Contribution(c_s=-1.0)
        with pytest.raises(ValueError):
            Contribution(c_g=math.inf)

    def test_population_state_validation(self):
        with pytest.raises(ValueError):
            PopulationState(-1.0, 0.0, 0.0)
        with pytest.raises(ValueError):
            PopulationState(math.nan, 0.0, 0.0)

    def test_system_size_positive(self):
        with pytest.raises(ValueError):
            SystemConfig(Rates(), Contribution(), 0.0)


class TestRhsFull:
    def test_no_reactions_no_flow(self):
        state = PopulationState(3.0, 4.0, 5.0)
        assert rhs_full(state, cfg_for(Rates(), 12.0)) == (0.0, 0.0, 0.0)

    def test_pair_reaction_flux(self):
        # only 2S -> 2G active: ds/dt = -2 k1 s^2 = -8 at s=2, k1=1
        state = PopulationState(2.0, 0.0, 0.0)
        assert rhs_full(state, cfg_for(Rates(k1=1.0), 2.0)) == (-8.0, 8.0, 0.0)

    def test_table1_hand_evaluation(self):
        ds, dg, df = rhs_full(PopulationState(10.0, 5.0, 2.0), cfg_for(TABLE1_RATES, 17.0))
        assert ds == pytest.approx(42.8, rel=1e-14)
        assert dg == pytest.approx(-51.7, rel=1e-14)
        assert df == pytest.approx(8.9, rel=1e-14)
        assert abs(ds + dg + df) <= 1e-12 * max(abs(ds), abs(dg), abs(df))

    def test_conservation_on_random_grid(self):
        rng = np.random.default_rng(42)
        for _ in range(1000):
            rates = Rates(*rng.uniform(0.0, 10.0, size=7))
            pops = rng.uniform(0.0, 50.0, size=3)
            state = PopulationState(*pops)
            cfg = cfg_for(rates, float(pops.sum()) + 1.0)
            ds, dg, df = rhs_full(state, cfg)
            scale = max(abs(ds), abs(dg), abs(df), 1.0)
            assert abs(ds + dg + df) <= 1e-12 * scale

    def test_rejects_non_finite_state(self):
        with pytest.raises(ValueError):
            PopulationState(math.inf, 1.0, 1.0)


class TestBoundaryInvariance:
    """Flow never points out of the simplex on its faces."""

    def test_faces(self):
        rng = np.random.default_rng(7)
        for _ in range(300):
            rates = Rates(*rng.uniform(0.0, 5.0, size=7))
            a, b = rng.uniform(0.0, 20.0, size=2)
            n = a + b + 1.0
            cfg = cfg_for(rates, n)
            ds, _, _ = rhs_full(PopulationState(0.0, a, b), cfg)
            assert ds >= 0.0
            _, dg, _ = rhs_full(PopulationState(a, 0.0, b), cfg)
            assert dg >= 0.0
            _, _, df = rhs_full(PopulationState(a, b, 0.0), cfg)
            assert df >= 0.0


class TestRhsReduced:
    def test_zero_rates(self):
        assert rhs_reduced(1.0, 2.0, cfg_for(Rates(), 5.0)) == (0.0, 0.0)

    def test_matches_full_projection_exactly(self):
        rng = np.random.default_rng(123)
        for _ in range(1000):
            rates = Rates(*rng.uniform(0.0, 10.0, size=7))
            n = float(rng.uniform(1.0, 300.0))
            s = float(rng.uniform(0.0, n))
            f = float(rng.uniform(0.0, n - s))
            cfg = cfg_for(rates, n)
            g = n - s - f
            full = rhs_full(PopulationState(s, max(g, 0.0), f), cfg)
            red = rhs_reduced(s, f, cfg)
            assert red[0] == full[0]
            assert red[1] == full[2]

    def test_no_fermo_source(self):
        # k5 = k6 = k7 = 0 and f = 0: nothing ever reaches fermo
        cfg = cfg_for(Rates(k1=1.0, k2=2.0, k3=3.0, k4=4.0), 10.0)
        _, df = rhs_reduced(4.0, 0.0, cfg)
        assert df == 0.0

    def test_domain_error_outside_simplex(self):
        cfg = cfg_for(Rates(), 5.0)
        with pytest.raises(ValueError):
            rhs_reduced(4.0, 2.0, cfg)
        with pytest.raises(ValueError):
            rhs_reduced(-0.5, 1.0, cfg)


def finite_difference_jacobian(s, f, cfg, h=1e-6):
    def col(ds, df_):
        up = rhs_reduced(s + ds * h / 2, f + df_ * h / 2, cfg)
        dn = rhs_reduced(s - ds * h / 2, f - df_ * h / 2, cfg)
        return [(up[0] - dn[0]) / h, (up[1] - dn[1]) / h]

    c1 = col(1.0, 0.0)
    c2 = col(0.0, 1.0)
    return np.array([[c1[0], c2[0]], [c1[1], c2[1]]])


class TestJacobian:
    def test_zero_rates_zero_matrix(self):
        jac = jacobian_reduced(1.0, 2.0, cfg_for(Rates(), 5.0))
        assert np.all(jac == 0.0)

    def test_matches_finite_differences(self):
        rng = np.random.default_rng(99)
        for _ in range(1000):
            rates = Rates(*rng.uniform(0.0, 10.0, size=7))
            n = float(rng.uniform(2.0, 200.0))
            # keep an h/2 margin inside the simplex so the FD stencil is valid
            s = float(rng.uniform(1e-3, n * 0.49))
            f = float(rng.uniform(1e-3, n * 0.49))
            cfg = cfg_for(rates, n)
            jac = jacobian_reduced(s, f, cfg)
            fd = finite_difference_jacobian(s, f, cfg)
            scale = np.maximum(np.abs(fd), 1e-3)
            assert np.all(np.abs(jac - fd) / scale < 1e-4)

    def test_single_rate_entry(self):
        # only G -> S active: d(ds/dt)/ds = -k4 everywhere
        cfg = cfg_for(Rates(k4=1.0), 10.0)
        jac = jacobian_reduced(10.0, 0.0, cfg)
        assert jac[0, 0] == pytest.approx(-1.0, rel=1e-12)
        # finite-difference stencil needs an interior point
        interior = jacobian_reduced(6.0, 2.0, cfg)
        fd = finite_difference_jacobian(6.0, 2.0, cfg)
        assert np.allclose(interior, fd, rtol=1e-4, atol=1e-6)
