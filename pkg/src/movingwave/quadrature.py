"""Composite Gauss-Legendre quadrature helpers shared by all identity checks."""
from __future__ import annotations

import numpy as np

_rule_cache: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _gl_rule(order: int) -> tuple[np.ndarray, np.ndarray]:
    if order not in _rule_cache:
        _rule_cache[order] = np.polynomial.legendre.leggauss(order)
    return _rule_cache[order]


def composite_nodes(a: float, b: float, panels: int, order: int = 12,
                    breakpoints=()) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of a composite Gauss-Legendre rule on (a, b).

    Interior ``breakpoints`` become panel boundaries; the remaining panels
    are distributed over the smooth pieces proportionally to their length.
    """
    if b <= a:
        raise ValueError(f"empty interval ({a}, {b})")
    edges = [a] + sorted(x for x in breakpoints if a < x < b) + [b]
    xs, ws = _gl_rule(order)
    all_nodes, all_weights = [], []
    total = b - a
    for lo, hi in zip(edges[:-1], edges[1:]):
        n_pan = max(1, int(round(panels * (hi - lo) / total)))
        bounds = np.linspace(lo, hi, n_pan + 1)
        for p_lo, p_hi in zip(bounds[:-1], bounds[1:]):
            half = 0.5 * (p_hi - p_lo)
            all_nodes.append(0.5 * (p_lo + p_hi) + half * xs)
            all_weights.append(half * ws)
    return np.concatenate(all_nodes), np.concatenate(all_weights)


def integrate(f, a: float, b: float, panels: int = 16, order: int = 12,
              breakpoints=()) -> complex:
    """Integral of a vectorized callable on (a, b) with a fixed composite rule."""
    x, w = composite_nodes(a, b, panels, order, breakpoints)
    return np.sum(w * f(x))


def integrate_adaptive(f, a: float, b: float, *, panels: int = 8,
                       order: int = 12, breakpoints=(), rtol: float = 1e-10,
                       scale: float | None = None, max_panels: int = 4096):
    """Panel-doubling composite integration.

    Doubles the panel count until successive values differ by less than
    ``rtol * scale`` (scale defaults to the magnitude of the current value).
    """
    prev = integrate(f, a, b, panels, order, breakpoints)
    while panels < max_panels:
        panels *= 2
        cur = integrate(f, a, b, panels, order, breakpoints)
        ref = scale if scale is not None else max(abs(cur), 1e-300)
        if abs(cur - prev) <= rtol * ref:
            return cur
        prev = cur
    return prev


def oscillatory_panels(freq: float, length: float, minimum: int = 8) -> int:
    """Panel count keeping a phase exp(i*freq*s) well resolved by order-12 GL."""
    return max(minimum, int(np.ceil(freq * length / 4.0)) + 4)
