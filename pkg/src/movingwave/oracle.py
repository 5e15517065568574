"""Exact method-of-characteristics solver on the expanding interval.

Writes the solution as phi = F(t+x) + H(t-x) and resolves F and H by
repeated reflection at the moving endpoints.  Each reflection multiplies the
characteristic argument by a fixed ratio, so any query point reaches the
data line after finitely many steps.  Serves as the independent oracle for
the series solution and as the forward/backward solver of the control loop.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .geometry import DomainGeometry
from .extension import InitialData, antiderivative
from .spectral import WaveField

_EPS = 1e-12
_MAX_REFLECTIONS = 10_000


def reflect(g: DomainGeometry, side: str, invariant: float) -> float:
    """Forward image of a conserved characteristic argument at one bounce.

    A right-moving ray with t+x = w hits the left wall and continues as a
    ray with t-x = w*(1+ell1)/(1-ell1); symmetrically a left-moving ray with
    t-x = u bounces off the right wall onto t+x = u*(1+ell2)/(1-ell2).
    """
    if side == "right":
        return invariant * (1.0 + g.ell2) / (1.0 - g.ell2)
    if side == "left":
        return invariant * (1.0 + g.ell1) / (1.0 - g.ell1)
    raise ValueError(f"side must be 'left' or 'right', got {side!r}")


@dataclass(frozen=True)
class ControlFunction:
    """Boundary control sampled on a time window, zero outside it.

    Evaluation uses a clamped cubic spline through the samples; the
    derivative is the spline derivative.  ``side`` records which endpoint
    the control drives.
    """

    side: str
    window: tuple[float, float]
    times: np.ndarray = field(repr=False)
    samples: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.side not in ("left", "right"):
            raise ValueError(f"bad side {self.side!r}")
        t = np.asarray(self.times, dtype=float)
        v = np.asarray(self.samples, dtype=float)
        if t.ndim != 1 or t.shape != v.shape or t.size < 4:
            raise ValueError("need matching 1-d arrays of >= 4 samples")
        if not np.all(np.diff(t) > 0):
            raise ValueError("sample times must be strictly increasing")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "samples", v)

    @classmethod
    def from_callable(cls, side: str, window: tuple[float, float],
                      fn: Callable, n: int = 4096) -> "ControlFunction":
        t = np.linspace(window[0], window[1], n)
        return cls(side=side, window=tuple(window), times=t,
                   samples=np.asarray(fn(t), dtype=float))

    @property
    def _spline(self):
        sp = self.__dict__.get("_spline_obj")
        if sp is None:
            from scipy.interpolate import CubicSpline
            sp = CubicSpline(self.times, self.samples)
            object.__setattr__(self, "_spline_obj", sp)
        return sp

    def _masked(self, t, fn):
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        t = np.atleast_1d(t)
        out = np.zeros_like(t)
        lo, hi = self.window
        inside = (t >= lo) & (t <= hi)
        if inside.any():
            out[inside] = fn(t[inside])
        return float(out[0]) if scalar else out

    def __call__(self, t):
        return self._masked(t, self._spline)

    def derivative(self, t):
        return self._masked(t, self._spline.derivative())

    def l2_norm_sq(self) -> float:
        """Integral of the squared control over its window."""
        trapezoid = getattr(np, "trapezoid", np.trapz)
        return float(trapezoid(self.samples ** 2, self.times))

    def scaled(self, factor: float) -> "ControlFunction":
        return ControlFunction(side=self.side, window=self.window,
                               times=self.times,
                               samples=self.samples * factor)


def _zero(t):
    return np.zeros_like(np.asarray(t, dtype=float))


def _as_bc(obj) -> tuple[Callable, Callable]:
    """Normalize a boundary condition into (value, derivative) callables."""
    if obj is None:
        return _zero, _zero
    if isinstance(obj, ControlFunction):
        return obj.__call__, obj.derivative
    if isinstance(obj, tuple) and len(obj) == 2:
        return obj
    raise TypeError("boundary data must be None, a ControlFunction, or a"
                    " (value, derivative) pair of callables")


class CharacteristicSolver:
    """Resolves F, H and their derivatives by reflection.

    direction='forward' starts from initial data at t0 and bounces
    characteristic arguments down into the data range; 'backward' starts
    from terminal data at t_end and grows them up into the terminal range.
    """

    def __init__(self, g: DomainGeometry, *, direction: str = "forward",
                 data: Optional[InitialData] = None,
                 terminal: Optional[tuple] = None,
                 bc_left=None, bc_right=None, t_end: float | None = None):
        if direction not in ("forward", "backward"):
            raise ValueError(f"bad direction {direction!r}")
        self.g = g
        self.direction = direction
        self.bc_left, self.bc_left_d = _as_bc(bc_left)
        self.bc_right, self.bc_right_d = _as_bc(bc_right)

        if direction == "forward":
            t_ref = g.t0
            if data is None:
                raise ValueError("forward solve requires initial data")
            a, b = g.core
            phi0 = data.phi0
            phi1 = data.phi1
            phi0_x = data.derivative_on(a, b)
            psi = antiderivative(phi1, a, b)
            core = (a, b)

            def F0(w):
                x = np.clip(w - t_ref, *core)
                return 0.5 * (np.asarray(phi0(x), float)
                              + np.asarray(psi(x), float))

            def H0(u):
                x = np.clip(t_ref - u, *core)
                return 0.5 * (np.asarray(phi0(x), float)
                              - np.asarray(psi(x), float))

            def F0p(w):
                x = np.clip(w - t_ref, *core)
                return 0.5 * (np.asarray(phi0_x(x), float)
                              + np.asarray(phi1(x), float))

            def H0p(u):
                x = np.clip(t_ref - u, *core)
                return -0.5 * (np.asarray(phi0_x(x), float)
                               - np.asarray(phi1(x), float))
        else:
            if t_end is None:
                raise ValueError("backward solve requires t_end")
            t_ref = t_end
            a, b = -g.ell1 * t_end, g.ell2 * t_end
            core = (a, b)
            if terminal is None:
                F0 = H0 = F0p = H0p = _zero
            else:
                psi0, psi1 = terminal
                psi0_x = InitialData(phi0=psi0, phi1=psi1).derivative_on(a, b)
                anti = antiderivative(psi1, a, b)

                def F0(w):
                    x = np.clip(w - t_ref, *core)
                    return 0.5 * (np.asarray(psi0(x), float)
                                  + np.asarray(anti(x), float))

                def H0(u):
                    x = np.clip(t_ref - u, *core)
                    return 0.5 * (np.asarray(psi0(x), float)
                                  - np.asarray(anti(x), float))

                def F0p(w):
                    x = np.clip(w - t_ref, *core)
                    return 0.5 * (np.asarray(psi0_x(x), float)
                                  + np.asarray(psi1(x), float))

                def H0p(u):
                    x = np.clip(t_ref - u, *core)
                    return -0.5 * (np.asarray(psi0_x(x), float)
                                   - np.asarray(psi1(x), float))

        self.t_ref = t_ref
        self.base = {"F": F0, "H": H0}
        self.base_d = {"F": F0p, "H": H0p}
        g1, g2 = g.ell1, g.ell2
        self.w_range = ((1.0 - g1) * t_ref, (1.0 + g2) * t_ref)
        self.u_range = ((1.0 - g2) * t_ref, (1.0 + g1) * t_ref)

    def _resolve(self, is_F: np.ndarray, arg: np.ndarray,
                 derivative: bool) -> np.ndarray:
        g = self.g
        is_F = is_F.copy()
        arg = arg.astype(float).copy()
        coef = np.ones_like(arg)
        acc = np.zeros_like(arg)
        forward = self.direction == "forward"
        wlo, whi = self.w_range
        ulo, uhi = self.u_range
        r1 = (1.0 - g.ell1) / (1.0 + g.ell1)
        r2 = (1.0 - g.ell2) / (1.0 + g.ell2)

        for _ in range(_MAX_REFLECTIONS):
            if forward:
                f_out = is_F & (arg > whi * (1.0 + _EPS))
                h_out = (~is_F) & (arg > uhi * (1.0 + _EPS))
            else:
                f_out = is_F & (arg < wlo * (1.0 - _EPS))
                h_out = (~is_F) & (arg < ulo * (1.0 - _EPS))
            if not (f_out.any() or h_out.any()):
                break
            if f_out.any():
                a = arg[f_out]
                if forward:
                    # F(w) = bc_right(w/(1+l2)) - H(w (1-l2)/(1+l2))
                    tau = a / (1.0 + g.ell2)
                    bc = self.bc_right_d(tau) / (1.0 + g.ell2) if derivative \
                        else self.bc_right(tau)
                    ratio = r2
                else:
                    # F(w) = bc_left(w/(1-l1)) - H(w (1+l1)/(1-l1))
                    tau = a / (1.0 - g.ell1)
                    bc = self.bc_left_d(tau) / (1.0 - g.ell1) if derivative \
                        else self.bc_left(tau)
                    ratio = 1.0 / r1
                acc[f_out] += coef[f_out] * np.asarray(bc, float)
                coef[f_out] *= -ratio if derivative else -1.0
                arg[f_out] = a * ratio
                is_F[f_out] = False
            if h_out.any():
                a = arg[h_out]
                if forward:
                    # H(u) = bc_left(u/(1+l1)) - F(u (1-l1)/(1+l1))
                    tau = a / (1.0 + g.ell1)
                    bc = self.bc_left_d(tau) / (1.0 + g.ell1) if derivative \
                        else self.bc_left(tau)
                    ratio = r1
                else:
                    # H(u) = bc_right(u/(1-l2)) - F(u (1+l2)/(1-l2))
                    tau = a / (1.0 - g.ell2)
                    bc = self.bc_right_d(tau) / (1.0 - g.ell2) if derivative \
                        else self.bc_right(tau)
                    ratio = 1.0 / r2
                acc[h_out] += coef[h_out] * np.asarray(bc, float)
                coef[h_out] *= -ratio if derivative else -1.0
                arg[h_out] = a * ratio
                is_F[h_out] = True
        else:
            raise RuntimeError("reflection loop failed to terminate")

        table = self.base_d if derivative else self.base
        out = np.empty_like(arg)
        for kind, mask in (("F", is_F), ("H", ~is_F)):
            if not mask.any():
                continue
            lo, hi = self.w_range if kind == "F" else self.u_range
            a = arg[mask]
            if (a < lo * (1.0 - 1e-9)).any() or (a > hi * (1.0 + 1e-9)).any():
                raise RuntimeError("characteristic argument left the data"
                                   " range after reflection")
            out[mask] = table[kind](np.clip(a, lo, hi))
        return acc + coef * out

    def __call__(self, x, t) -> WaveField:
        """Evaluate (phi, phi_x, phi_t) on broadcastable arrays."""
        g = self.g
        x = np.asarray(x, dtype=float)
        t = np.asarray(t, dtype=float)
        x, t = np.broadcast_arrays(x, t)
        shape = x.shape
        xf, tf = x.ravel().astype(float), t.ravel().astype(float)

        tol = 1e-12 * self.t_ref
        if (tf < g.t0 - tol).any():
            raise ValueError("evaluation before the initial time t0")
        if self.direction == "backward" and (tf > self.t_ref + tol).any():
            raise ValueError("backward solve queried after its terminal time")
        if (xf < -g.ell1 * tf - tol).any() or (xf > g.ell2 * tf + tol).any():
            raise ValueError("evaluation point outside the moving interval")

        w = tf + xf
        u = tf - xf
        ones = np.ones(w.size, dtype=bool)
        F = self._resolve(ones, w, False)
        H = self._resolve(~ones, u, False)
        Fp = self._resolve(ones, w, True)
        Hp = self._resolve(~ones, u, True)
        return WaveField(
            x=x, t=t,
            phi=(F + H).reshape(shape),
            phi_x=(Fp - Hp).reshape(shape),
            phi_t=(Fp + Hp).reshape(shape),
            provenance=f"characteristics-{self.direction}")


def solve_homogeneous(g: DomainGeometry, d: InitialData, x, t) -> WaveField:
    """Free evolution of initial data, sampled at broadcastable (x, t)."""
    return CharacteristicSolver(g, direction="forward", data=d)(x, t)


def solve_forced(g: DomainGeometry, d: InitialData, x, t, *,
                 bc_left=None, bc_right=None) -> WaveField:
    """Forward evolution with Dirichlet data at one or both moving walls."""
    return CharacteristicSolver(g, direction="forward", data=d,
                                bc_left=bc_left, bc_right=bc_right)(x, t)


def solve_backward(g: DomainGeometry, x, t, *, t_end: float,
                   terminal=None, bc_left=None, bc_right=None) -> WaveField:
    """Backward evolution from data at t_end (zero by default) with walls
    driven by the given Dirichlet traces."""
    return CharacteristicSolver(g, direction="backward", terminal=terminal,
                                t_end=t_end, bc_left=bc_left,
                                bc_right=bc_right)(x, t)


def oracle_boundary_trace(g: DomainGeometry, d: InitialData, side: str, t, *,
                          bc_left=None, bc_right=None) -> np.ndarray:
    """phi_x along a moving endpoint, computed by characteristics."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    x = g.ell2 * t if side == "right" else -g.ell1 * t
    if side not in ("left", "right"):
        raise ValueError(f"bad side {side!r}")
    field = solve_forced(g, d, x, t, bc_left=bc_left, bc_right=bc_right)
    return field.phi_x


@dataclass(frozen=True)
class RayTrace:
    """Bounce history of one characteristic argument (debug helper)."""

    start_kind: str
    start_arg: float
    bounces: list  # (wall, time_of_impact, new_kind, new_arg)


def trace_ray(g: DomainGeometry, kind: str, arg: float,
              max_bounces: int = 64) -> RayTrace:
    """Follow a characteristic argument backward to the initial data line."""
    t0 = g.t0
    whi = (1.0 + g.ell2) * t0
    uhi = (1.0 + g.ell1) * t0
    bounces = []
    k, a = kind, float(arg)
    for _ in range(max_bounces):
        if k == "F" and a > whi * (1.0 + _EPS):
            tau = a / (1.0 + g.ell2)
            a *= (1.0 - g.ell2) / (1.0 + g.ell2)
            k = "H"
            bounces.append(("right", tau, k, a))
        elif k == "H" and a > uhi * (1.0 + _EPS):
            tau = a / (1.0 + g.ell1)
            a *= (1.0 - g.ell1) / (1.0 + g.ell1)
            k = "F"
            bounces.append(("left", tau, k, a))
        else:
            break
    return RayTrace(start_kind=kind, start_arg=float(arg), bounces=bounces)
