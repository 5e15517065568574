import numpy as np
import pytest

from movingwave.quadrature import (composite_nodes, integrate,
                                   integrate_adaptive, oscillatory_panels)


def test_polynomial_exactness():
    # order-8 Gauss-Legendre integrates degree-15 polynomials exactly
    val = integrate(lambda x: x ** 15, 0.0, 1.0, panels=1, order=8)
    assert val == pytest.approx(1.0 / 16.0, rel=1e-14)


def test_smooth_integral():
    val = integrate(np.sin, 0.0, np.pi, panels=8, order=12)
    assert val == pytest.approx(2.0, rel=1e-14)


def test_breakpoints_hit_kink():
    f = lambda x: np.abs(x - 0.3)
    exact = 0.5 * (0.3 ** 2 + 0.7 ** 2)
    coarse = integrate(f, 0.0, 1.0, panels=4, order=8)
    split = integrate(f, 0.0, 1.0, panels=4, order=8, breakpoints=(0.3,))
    assert split == pytest.approx(exact, rel=1e-14)
    assert abs(coarse - exact) > abs(split - exact)


def test_composite_nodes_weights_sum():
    x, w = composite_nodes(-2.0, 5.0, 16, 10)
    assert w.sum() == pytest.approx(7.0, rel=1e-14)
    assert np.all(np.diff(x) > 0)
    assert x[0] > -2.0 and x[-1] < 5.0


def test_adaptive_matches_fixed():
    import math
    val = integrate_adaptive(lambda x: np.exp(-x * x), -4.0, 4.0, rtol=1e-12)
    assert val == pytest.approx(math.sqrt(math.pi) * math.erf(4.0),
                                rel=1e-10)


def test_oscillatory_panels_scale_with_frequency():
    low = oscillatory_panels(10.0, 1.0)
    high = oscillatory_panels(1000.0, 1.0)
    assert high > low >= 8
