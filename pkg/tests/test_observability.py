import numpy as np
import pytest

import movingwave as mw
from movingwave import boundary_trace, build_counterexample, make_geometry
from movingwave.observability import (observability_budget,
                                      one_endpoint_identity,
                                      two_endpoint_identity)
from movingwave.quadrature import composite_nodes


@pytest.mark.parametrize("side", ["right", "left"])
@pytest.mark.parametrize("M", [1, 2, 3])
def test_one_endpoint_identity(random_mode_coeffs, side, M):
    r = one_endpoint_identity(random_mode_coeffs, side, M)
    assert r.residual < 1e-10 * abs(r.rhs)
    weight = 1 - (0.3 if side == "right" else 0.1) ** 2
    assert r.rhs == pytest.approx(
        4 * M * random_mode_coeffs.S / weight ** 2, rel=1e-12)


def test_one_endpoint_window(g1, random_mode_coeffs):
    r = one_endpoint_identity(random_mode_coeffs, "right", 2)
    assert r.windows["right"][0] == pytest.approx(g1.t0)
    assert r.windows["right"][1] == pytest.approx(
        (g1.alpha * g1.beta) ** 2 * g1.t0, rel=1e-13)


def test_two_endpoint_identity_M1(random_mode_coeffs):
    r = two_endpoint_identity(random_mode_coeffs, 1)
    assert r.residual < 1e-10 * abs(r.rhs)


@pytest.mark.parametrize("M", [2, 3])
def test_two_endpoint_periodic_windows_exact(random_mode_coeffs, M):
    r = two_endpoint_identity(random_mode_coeffs, M, windows="periodic")
    assert r.residual < 1e-10 * abs(r.rhs)


def test_two_endpoint_power_windows_fail_off_diagonal(random_mode_coeffs):
    """With unequal speeds the beta^M/alpha^M windows miss cancellation
    between different modes, so the M = 2 statement carries a genuine
    residual; this documents the size of the defect on the reference
    geometry."""
    r = two_endpoint_identity(random_mode_coeffs, 2, windows="power")
    assert r.residual > 1e-4 * abs(r.rhs)


def test_two_endpoint_power_windows_exact_for_equal_speeds():
    g = make_geometry(0.2, 0.2, 1.0)
    rng = np.random.default_rng(4)
    modes = {}
    for n in range(1, 4):
        v = rng.standard_normal() + 1j * rng.standard_normal()
        modes[n], modes[-n] = v, np.conj(v)
    c = mw.SpectralCoefficients.from_modes(g, modes)
    for M in (1, 2, 3):
        r = two_endpoint_identity(c, M, windows="power")
        assert r.residual < 1e-10 * abs(r.rhs)


def test_identity_input_validation(random_mode_coeffs):
    with pytest.raises(ValueError):
        one_endpoint_identity(random_mode_coeffs, "right", 0)
    with pytest.raises(ValueError):
        two_endpoint_identity(random_mode_coeffs, 1, windows="diagonal")


class TestBudget:
    def test_feasibility_threshold(self, g1):
        for mode in ("one_endpoint", "two_endpoint"):
            T_req = g1.T_obs1 if mode == "one_endpoint" else g1.T_obs2
            assert not observability_budget(g1, 0.99 * T_req, mode).feasible
            assert observability_budget(g1, T_req, mode).feasible
            assert observability_budget(g1, 1.5 * T_req, mode).feasible

    def test_one_endpoint_constants(self, g1):
        b = observability_budget(g1, g1.T_obs1, "one_endpoint", "right")
        ab = g1.alpha * g1.beta
        assert b.inverse_constant == pytest.approx(
            ab * (1 - 0.09) ** 2 / (4 * 0.7), rel=1e-12)
        assert b.direct_constant == pytest.approx(
            4 * b.M * 1.3 / (1 - 0.09) ** 2, rel=1e-12)
        assert b.M >= 1

    def test_two_endpoint_constants(self, g1):
        b = observability_budget(g1, g1.T_obs2, "two_endpoint")
        assert b.side == "both"
        assert b.inverse_constant == pytest.approx(
            (1 - 0.01) ** 2 * g1.alpha / (4 * 0.7), rel=1e-12)

    def test_longer_window_larger_M(self, g1):
        b1 = observability_budget(g1, g1.T_obs1, "one_endpoint")
        b2 = observability_budget(g1, 40 * g1.T_obs1, "one_endpoint")
        assert b2.M > b1.M

    def test_validation(self, g1):
        with pytest.raises(ValueError):
            observability_budget(g1, -1.0, "one_endpoint")
        with pytest.raises(ValueError):
            observability_budget(g1, 1.0, "sideways")


@pytest.fixture(scope="module")
def ce(g1):
    return build_counterexample(g1, 0.2, "one_endpoint", N=512)


class TestCounterexample:
    def test_silent_below_sharp_window(self, g1, ce):
        lo, hi = ce.silent_window
        assert lo == pytest.approx(g1.t0)
        assert hi == pytest.approx(0.8 * g1.alpha * g1.beta * g1.t0,
                                   rel=1e-13)
        t_sil = np.linspace(lo, hi * (1 - 1e-9), 400)
        t_all = np.linspace(g1.t0, ce.support[1], 400)
        tr_sil = boundary_trace(ce.coefficients, "right", t_sil)
        tr_all = boundary_trace(ce.coefficients, "right", t_all)
        peak = np.max(np.abs(tr_all))
        assert peak > 0
        assert np.max(np.abs(tr_sil)) < 1e-6 * peak

    def test_trace_matches_closed_form(self, g1, ce):
        lo = ce.support[0]
        t = np.linspace(lo, ce.support[1] * (1 - 1e-9), 300)
        tr = boundary_trace(ce.coefficients, "right", t)
        pred = ce.predicted_trace("right", t)
        assert np.max(np.abs(tr - pred)) < 1e-5 * np.max(np.abs(pred))

    def test_profile_has_zero_mean_against_dt_over_t(self, ce):
        lo, hi = ce.support
        t, w = composite_nodes(lo, hi, 256, 12)
        assert abs(np.sum(w * ce.g(t) / t)) < 1e-12


    def test_g_periodic(self, g1, ce):
        t = np.linspace(ce.support[0], ce.support[1] * (1 - 1e-9), 50)
        period = g1.alpha * g1.beta
        np.testing.assert_allclose(ce.g_periodic(period * t),
                                   ce.g_periodic(t), atol=1e-12)

    def test_initial_data_consistent_with_series(self, g1, ce):
        """The closed-form data coincide with the series traces at t0."""
        d = ce.initial_data()
        a, b = g1.core
        x = np.linspace(a + 1e-6, b - 1e-6, 25)
        phi, phi_x, phi_t = mw.evaluate(ce.coefficients, x, g1.t0)
        scale = np.max(np.abs(phi_x)) + 1e-300
        assert np.max(np.abs(np.asarray(d.phi0_x(x)) - phi_x)) < 1e-6 * scale
        assert np.max(np.abs(np.asarray(d.phi1(x)) - phi_t)) < 1e-6 * scale

    def test_two_endpoint_both_traces_silent(self, g1):
        ce = build_counterexample(g1, 0.2, "two_endpoint", N=512)
        lo, hi = ce.silent_window
        assert hi == pytest.approx(0.8 * g1.alpha * g1.t0, rel=1e-13)
        t_sil = np.linspace(lo, hi * (1 - 1e-9), 300)
        t_all = np.linspace(g1.t0, ce.support[1], 300)
        peak = 0.0
        for side in ("right", "left"):
            peak = max(peak, np.max(np.abs(
                boundary_trace(ce.coefficients, side, t_all))))
        for side in ("right", "left"):
            tr = boundary_trace(ce.coefficients, side, t_sil)
            assert np.max(np.abs(tr)) < 1e-5 * peak

    def test_left_anchor_for_faster_left_wall(self):
        g = make_geometry(0.4, 0.1, 1.0)   # beta > alpha
        ce = build_counterexample(g, 0.25, "two_endpoint", N=256)
        assert ce.anchor == "left"
        d = ce.initial_data()
        assert d.label == "from_coefficients"

    def test_validation(self, g1):
        with pytest.raises(ValueError):
            build_counterexample(g1, 1.5)
        with pytest.raises(ValueError):
            build_counterexample(g1, 0.2, "sideways")
