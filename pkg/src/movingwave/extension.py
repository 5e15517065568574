"""Initial data on the starting interval and its reflected extensions.

The data (phi0, phi1) live on the initial interval.  To expose the two
weighted orthogonal bases, phi1 and phi0_x are extended onto the enlarged
intervals by an odd-like (resp. even-like) reflection about each endpoint,
with the affine argument maps induced by the moving walls.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .geometry import DomainGeometry
from .quadrature import composite_nodes


def numeric_derivative(f: Callable, a: float, b: float,
                       h: float | None = None) -> Callable:
    """4th-order finite-difference derivative of f on [a, b].

    Central stencil in the interior, shifted 5-point stencils within 2h of
    the endpoints.  Default h is 1e-5 times the interval length.
    """
    if h is None:
        h = (b - a) * 1e-5
    # offsets/weights: central, forward, backward 5-point rules
    offs = {
        "c": (np.array([-2, -1, 1, 2]), np.array([1, -8, 8, -1]) / 12.0),
        "f": (np.array([0, 1, 2, 3, 4]),
              np.array([-25, 48, -36, 16, -3]) / 12.0),
        "b": (np.array([-4, -3, -2, -1, 0]),
              np.array([3, -16, 36, -48, 25]) / 12.0),
    }

    def deriv(x):
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        x = np.atleast_1d(x)
        out = np.empty_like(x)
        lo = x < a + 2 * h
        hi = x > b - 2 * h
        mid = ~(lo | hi)
        for mask, key in ((mid, "c"), (lo, "f"), (hi, "b")):
            if not mask.any():
                continue
            o, w = offs[key]
            vals = np.stack([np.asarray(f(x[mask] + k * h), dtype=float)
                             for k in o])
            out[mask] = (w @ vals) / h
        return out[0] if scalar else out

    return deriv


def antiderivative(f: Callable, a: float, b: float, *, panels: int = 2048,
                   order: int = 8, breakpoints=()) -> Callable:
    """Cubic-spline antiderivative of f on [a, b], vanishing at a.

    Panel integrals are computed by Gauss-Legendre, so accuracy is limited
    only by the spline interpolation between panel edges.
    """
    from scipy.interpolate import CubicSpline

    edges = [a] + sorted(x for x in breakpoints if a < x < b) + [b]
    knots = [np.array([a])]
    increments = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        n_pan = max(8, int(round(panels * (hi - lo) / (b - a))))
        bounds = np.linspace(lo, hi, n_pan + 1)
        xs, ws = composite_nodes(lo, hi, n_pan, order)
        vals = (ws * np.asarray(f(xs), dtype=float)).reshape(n_pan, order)
        increments.append(vals.sum(axis=1))
        knots.append(bounds[1:])
    grid = np.concatenate(knots)
    cumulative = np.concatenate([[0.0], np.cumsum(np.concatenate(increments))])
    return CubicSpline(grid, cumulative)


@dataclass(frozen=True)
class InitialData:
    """Position/velocity profiles on the initial interval, as callables.

    ``phi0`` must vanish at both endpoints.  If ``phi0_x`` is omitted it is
    replaced by a 4th-order finite-difference rule when an extension is
    built.
    """

    phi0: Callable
    phi1: Callable
    phi0_x: Optional[Callable] = None
    label: str = "custom"

    def derivative_on(self, a: float, b: float) -> Callable:
        return self.phi0_x if self.phi0_x is not None \
            else numeric_derivative(self.phi0, a, b)


@dataclass(frozen=True)
class ExtendedData:
    """phi1 and phi0_x extended onto (-L1*t0, L2*t0)."""

    geometry: DomainGeometry
    ext_phi1: Callable = field(repr=False)
    ext_phi0_x: Callable = field(repr=False)
    core: tuple[float, float]
    bounds: tuple[float, float]
    source: InitialData = field(repr=False, default=None)

    def ext_phi0(self) -> Callable:
        """Antiderivative of ext_phi0_x vanishing at the left core endpoint.

        Only materialized on request; shifts so that phi0 vanishes at
        -ell1*t0 as in the core data.
        """
        lo, hi = self.bounds
        a_core = self.core[0]
        raw = antiderivative(self.ext_phi0_x, lo, hi,
                             breakpoints=self.core)
        offset = raw(a_core)
        return lambda x: raw(x) - offset


def _checked(vals_fn, lo, hi):
    """Wrap a piecewise evaluator with a domain check on (lo, hi)."""
    tol = 1e-12 * (abs(lo) + abs(hi))

    def wrapped(x):
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        x = np.atleast_1d(x)
        if (x < lo - tol).any() or (x > hi + tol).any():
            raise ValueError(
                f"evaluation outside the extension domain ({lo}, {hi})")
        out = vals_fn(np.clip(x, lo, hi))
        return out[0] if scalar else out

    return wrapped


def left_argument_map(g: DomainGeometry):
    """Affine map sending (-L1*t0, -ell1*t0) onto the core, and back.

    As a map of the full extended interval it is an involution: points on
    either side of the pivot x = -ell1*t0 are exchanged.
    """
    t0, r = g.t0, (1.0 - g.ell1) / (1.0 + g.ell1)

    def m(x):
        x = np.asarray(x, dtype=float)
        pivot = -g.ell1 * t0
        fwd = -t0 + r * (t0 - x)          # left branch -> core
        inv = t0 - (t0 + x) / r           # core -> left branch
        return np.where(x <= pivot, fwd, inv)

    return m


def right_argument_map(g: DomainGeometry):
    """Affine involution about the pivot x = ell2*t0 (right-branch analogue)."""
    t0, r = g.t0, (1.0 - g.ell2) / (1.0 + g.ell2)

    def m(x):
        x = np.asarray(x, dtype=float)
        pivot = g.ell2 * t0
        fwd = t0 - r * (t0 + x)           # right branch -> core
        inv = -t0 + (t0 - x) / r          # core -> right branch
        return np.where(x >= pivot, fwd, inv)

    return m


def extend(g: DomainGeometry, d: InitialData, *,
           boundary_tol: float = 1e-7) -> ExtendedData:
    """Build the odd-like/even-like extensions of (phi1, phi0_x).

    On the left branch x in (-L1*t0, -ell1*t0):
        ext_phi1(x)   = -r1 * phi1(-t0 + r1*(t0 - x)),
        ext_phi0_x(x) = +r1 * phi0_x(same argument),  r1 = (1-ell1)/(1+ell1),
    and mirrored with r2 = (1-ell2)/(1+ell2) on (ell2*t0, L2*t0).
    """
    t0 = g.t0
    a, b = g.core
    lo, hi = g.extended
    r1 = (1.0 - g.ell1) / (1.0 + g.ell1)
    r2 = (1.0 - g.ell2) / (1.0 + g.ell2)

    # H^1_0 compatibility of the position profile
    sample = np.asarray(d.phi0(np.linspace(a, b, 33)), dtype=float)
    scale = np.max(np.abs(sample)) + 1.0
    for endpoint in (a, b):
        if abs(float(np.asarray(d.phi0(endpoint)))) > boundary_tol * scale:
            raise ValueError(
                f"phi0 must vanish at the endpoint x={endpoint}")

    phi0_x = d.derivative_on(a, b)
    phi1 = d.phi1

    def piecewise(core_fn, sign):
        def vals(x):
            out = np.empty_like(x)
            left = x < a
            right = x > b
            mid = ~(left | right)
            if mid.any():
                out[mid] = core_fn(x[mid])
            if left.any():
                arg = np.clip(-t0 + r1 * (t0 - x[left]), a, b)
                out[left] = sign * r1 * np.asarray(core_fn(arg), dtype=float)
            if right.any():
                arg = np.clip(t0 - r2 * (t0 + x[right]), a, b)
                out[right] = sign * r2 * np.asarray(core_fn(arg), dtype=float)
            return out
        return vals

    ext_phi1 = _checked(piecewise(lambda x: np.asarray(phi1(x), float), -1.0),
                        lo, hi)
    ext_phi0_x = _checked(piecewise(lambda x: np.asarray(phi0_x(x), float), +1.0),
                          lo, hi)
    return ExtendedData(geometry=g, ext_phi1=ext_phi1, ext_phi0_x=ext_phi0_x,
                        core=(a, b), bounds=(lo, hi), source=d)
