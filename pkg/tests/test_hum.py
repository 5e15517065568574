import numpy as np
import pytest

import movingwave as mw
from movingwave.hum import (HUMSpace, apply_lambda, control_bound_check,
                            synthesize_control, verify_null_control)


@pytest.fixture(scope="module")
def space(g1):
    return HUMSpace.build(g1, n=192)


def _smooth_state(space, seed=0):
    a, b = space.geometry.core
    u = (space.x - a) / (b - a)
    z0 = np.sin(np.pi * u) ** 4
    z1 = 0.3 * np.sin(2 * np.pi * u)
    return (z0, z1)


class TestHUMSpace:
    def test_riesz_inverts_energy_inner(self, space):
        rng = np.random.default_rng(0)
        f1 = rng.standard_normal(space.n)
        f0 = rng.standard_normal(space.n)
        f0[0] = f0[-1] = 0.0
        z = space.riesz((f0, f1))
        w0 = rng.standard_normal(space.n)
        w0[0] = w0[-1] = 0.0
        w = (w0, rng.standard_normal(space.n))
        # <riesz(f), w>_E equals the mass-weighted pairing of f with w
        lhs = space.energy_inner(z, w)
        rhs = float(np.sum(space.mass * (f0 * w0 + f1 * w[1])))
        assert lhs == pytest.approx(rhs, rel=1e-10)

    def test_state_norm_positive(self, space):
        z = _smooth_state(space)
        assert space.state_norm(z) > 0
        zero = (np.zeros(space.n), np.zeros(space.n))
        assert space.state_norm(zero) == 0.0

    def test_as_initial_data_interpolates(self, space):
        z = _smooth_state(space)
        d = space.as_initial_data(z)
        np.testing.assert_allclose(np.asarray(d.phi0(space.x)), z[0],
                                   atol=1e-12)

    def test_build_rejects_tiny_grids(self, g1):
        with pytest.raises(ValueError):
            HUMSpace.build(g1, n=4)


class TestLambdaOperator:
    @pytest.mark.parametrize("mode", ["one_endpoint", "two_endpoint"])
    def test_symmetry(self, g1, space, mode):
        T = g1.T_obs1
        rng = np.random.default_rng(7)
        a, b = g1.core
        u = (space.x - a) / (b - a)
        z = (np.sin(np.pi * u) ** 4, 0.2 * np.sin(2 * np.pi * u))
        w = (np.sin(2 * np.pi * u) ** 4, 0.1 * np.sin(np.pi * u))
        iz = apply_lambda(space, z, T, mode, trace_n=2048)
        iw = apply_lambda(space, w, T, mode, trace_n=2048)
        pzw = space.pairing((iz.q0, iz.q1), w)
        pwz = space.pairing((iw.q0, iw.q1), z)
        scale = abs(pzw) + abs(pwz) + 1e-300
        assert abs(pzw - pwz) < 1e-4 * scale

    @pytest.mark.parametrize("mode", ["one_endpoint", "two_endpoint"])
    def test_self_pairing_is_trace_energy(self, g1, space, mode):
        """<Lambda z, z> equals the weighted squared-trace integral, which
        also certifies positivity of the operator."""
        z = _smooth_state(space)
        img = apply_lambda(space, z, g1.T_obs1, mode, trace_n=2048)
        self_pair = space.pairing((img.q0, img.q1), z)
        assert self_pair > 0
        assert self_pair == pytest.approx(img.trace_energy, rel=1e-3)

    def test_bad_inputs(self, g1, space):
        z = _smooth_state(space)
        with pytest.raises(ValueError):
            apply_lambda(space, z, -1.0)
        with pytest.raises(ValueError):
            apply_lambda(space, z, g1.T_obs1, "sideways")


@pytest.fixture(scope="module")
def roundtrip(g1):
    """Inverse-crime target: image of a known state under the operator."""
    space = HUMSpace.build(g1, n=192)
    z_true = _smooth_state(space)
    img = apply_lambda(space, z_true, g1.T_obs1, "one_endpoint",
                       trace_n=2048)
    u0 = -img.q1.copy()
    u0[0] = u0[-1] = 0.0
    u1 = img.q0
    result = synthesize_control(g1, u0, u1, g1.T_obs1, n=192,
                                trace_n=2048, tol=1e-5, max_iter=100)
    return space, z_true, img, u0, u1, result


class TestSynthesis:
    def test_cg_converges_fast(self, roundtrip):
        *_, result = roundtrip
        assert result.converged
        assert result.iterations <= 30
        assert result.residual < 1e-4

    def test_control_recovery(self, roundtrip):
        space, z_true, img, u0, u1, result = roundtrip
        want = img.traces["right"].samples
        got = result.controls["right"].samples
        rel = np.linalg.norm(got - want) / np.linalg.norm(want)
        assert rel < 1e-3

    def test_terminal_energy_removed(self, g1, roundtrip):
        space, z_true, img, u0, u1, result = roundtrip
        d = space.as_initial_data((u0, u1))
        check = verify_null_control(g1, d, result.controls, g1.T_obs1,
                                    quad_n=512)
        assert not check.degenerate
        assert check.ratio < 1e-3

    def test_control_cost_positive(self, roundtrip):
        *_, result = roundtrip
        assert result.control_cost() > 0

    def test_bound_check_structure(self, g1, roundtrip):
        space, z_true, img, u0, u1, result = roundtrip
        d = space.as_initial_data((u0, u1))
        check = verify_null_control(g1, d, result.controls, g1.T_obs1,
                                    quad_n=512)
        out = control_bound_check(g1, result, check.energy_initial)
        assert set(out) >= {"weighted_cost", "bound", "within_budget",
                            "budget"}
        assert out["weighted_cost"] > 0
        assert out["bound"] > 0

    def test_zero_target_is_trivial(self, g1):
        n = 64
        zeros = np.zeros(n)
        result = synthesize_control(g1, zeros, zeros, g1.T_obs1, n=n,
                                    trace_n=512)
        assert result.converged
        assert result.iterations == 0
        assert result.control_cost() == pytest.approx(0.0, abs=1e-20)
