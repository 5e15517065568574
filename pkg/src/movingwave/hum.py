"""Boundary control synthesis by duality (Hilbert uniqueness method).

The control-to-state pairing is realized through two exact characteristic
solves: a forward solve of the homogeneous problem records the wall trace
phi_x, and a backward solve driven by that trace (as Dirichlet data, with
zero terminal state) is read off at t0.  The resulting operator

    Lambda(z0, z1) = (psi_t(., t0), -psi(., t0))

is symmetric positive semi-definite against the energy inner product, with

    <Lambda z, z> = (1-ell2^2) int_{t0}^{t0+T} phi_x(ell2 t, t)^2 dt

(plus the matching left-wall term in two-endpoint mode).  Conjugate
gradients in the energy space, preconditioned by the Riesz map of the
P1 stiffness/lumped-mass pair, then solves Lambda z = (u1, -u0); the wall
trace of the minimizer is the null control.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.linalg import cholesky_banded, cho_solve_banded

from .geometry import DomainGeometry
from .extension import InitialData
from .oracle import (CharacteristicSolver, ControlFunction, solve_backward,
                     solve_forced)
from .quadrature import composite_nodes


@dataclass(frozen=True)
class HUMSpace:
    """Uniform P1 grid on the initial interval with energy inner product.

    Position components carry the H^1_0 seminorm through the tridiagonal
    stiffness matrix; velocity components carry the trapezoid (lumped) L^2
    mass.  The Riesz map turns L^2-type functionals into gradient
    directions for CG.
    """

    geometry: DomainGeometry
    n: int
    x: np.ndarray = field(repr=False)
    h: float
    mass: np.ndarray = field(repr=False)
    _chol: np.ndarray = field(repr=False)

    @classmethod
    def build(cls, g: DomainGeometry, n: int = 512) -> "HUMSpace":
        if n < 8:
            raise ValueError("need at least 8 grid nodes")
        a, b = g.core
        x = np.linspace(a, b, n)
        h = x[1] - x[0]
        mass = np.full(n, h)
        mass[0] = mass[-1] = 0.5 * h
        # banded upper form of the interior stiffness tridiag(-1,2,-1)/h
        m = n - 2
        ab = np.zeros((2, m))
        ab[0, 1:] = -1.0 / h
        ab[1, :] = 2.0 / h
        chol = cholesky_banded(ab)
        return cls(geometry=g, n=n, x=x, h=h, mass=mass, _chol=chol)

    def stiffness_apply(self, z0: np.ndarray) -> np.ndarray:
        out = np.zeros_like(z0)
        out[1:-1] = (2.0 * z0[1:-1] - z0[:-2] - z0[2:]) / self.h
        return out

    def energy_inner(self, z: tuple, w: tuple) -> float:
        k = self.stiffness_apply(z[0])
        return float(k @ w[0] + np.sum(self.mass * z[1] * w[1]))

    def riesz(self, f: tuple) -> tuple:
        """Gradient representer of the functional (f0, f1) against (M., M.)."""
        rhs = (self.mass * f[0])[1:-1]
        z0 = np.zeros(self.n)
        z0[1:-1] = cho_solve_banded((self._chol, False), rhs)
        return (z0, np.asarray(f[1], dtype=float).copy())

    def state_norm(self, z: tuple) -> float:
        return math.sqrt(max(self.energy_inner(z, z), 0.0))

    def as_initial_data(self, z: tuple) -> InitialData:
        s0 = CubicSpline(self.x, z[0])
        s1 = CubicSpline(self.x, z[1])
        return InitialData(phi0=s0, phi1=s1, phi0_x=s0.derivative(),
                           label="grid-state")

    def pairing(self, q: tuple, z: tuple) -> float:
        """Duality pairing sum_i m_i (q0 z0 + q1 z1)."""
        return float(np.sum(self.mass * (q[0] * z[0] + q[1] * z[1])))


@dataclass(frozen=True)
class LambdaImage:
    """One application of the control operator to a grid state."""

    q0: np.ndarray = field(repr=False)     # psi_t(., t0)
    q1: np.ndarray = field(repr=False)     # -psi(., t0)
    traces: dict = field(repr=False)       # side -> ControlFunction (phi_x)
    trace_energy: float                     # weighted squared-trace integral


def _trace_energy(g: DomainGeometry, traces: dict) -> float:
    total = 0.0
    for side, tr in traces.items():
        weight = (1.0 - g.ell2 ** 2) if side == "right" \
            else (1.0 - g.ell1 ** 2)
        t, w = composite_nodes(tr.window[0], tr.window[1],
                               max(64, tr.times.size // 8), 8)
        total += weight * float(np.sum(w * tr(t) ** 2))
    return total


def apply_lambda(space: HUMSpace, z: tuple, T: float,
                 mode: str = "one_endpoint",
                 trace_n: int = 4096) -> LambdaImage:
    """Forward-then-backward application of the control operator."""
    g = space.geometry
    if T <= 0.0:
        raise ValueError("the control window length T must be positive")
    t0, te = g.t0, g.t0 + T
    data = space.as_initial_data(z)
    fwd = CharacteristicSolver(g, direction="forward", data=data)

    t_s = np.linspace(t0, te, trace_n)
    traces = {}
    tr_right = fwd(g.ell2 * t_s, t_s).phi_x
    traces["right"] = ControlFunction(side="right", window=(t0, te),
                                      times=t_s, samples=tr_right)
    if mode == "two_endpoint":
        tr_left = fwd(-g.ell1 * t_s, t_s).phi_x
        traces["left"] = ControlFunction(side="left", window=(t0, te),
                                         times=t_s, samples=tr_left)
    elif mode != "one_endpoint":
        raise ValueError(f"bad mode {mode!r}")

    # backward solve: right wall carries the trace, left wall carries minus
    # the trace (that sign makes the self-pairing a sum of squares)
    bc_left = traces["left"].scaled(-1.0) if "left" in traces else None
    back = solve_backward(g, space.x, np.full(space.n, t0), t_end=te,
                          terminal=None, bc_left=bc_left,
                          bc_right=traces["right"])
    return LambdaImage(q0=back.phi_t.copy(), q1=-back.phi.copy(),
                       traces=traces,
                       trace_energy=_trace_energy(g, traces))


@dataclass(frozen=True)
class SynthesisResult:
    """Outcome of the CG minimization for one control problem."""

    mode: str
    T: float
    converged: bool
    iterations: int
    residual: float
    residual_log: list
    state: tuple = field(repr=False)            # minimizer (z0, z1)
    controls: dict = field(repr=False)          # side -> ControlFunction
    space: HUMSpace = field(repr=False, default=None)

    def control_cost(self) -> float:
        """Sum over walls of the squared L^2 control norm."""
        return sum(v.l2_norm_sq() for v in self.controls.values())


def _on_grid(space: HUMSpace, obj) -> np.ndarray:
    if callable(obj):
        return np.asarray(obj(space.x), dtype=float)
    arr = np.asarray(obj, dtype=float)
    if arr.shape != space.x.shape:
        raise ValueError(f"grid data must have shape {space.x.shape}")
    return arr.copy()


def synthesize_control(g: DomainGeometry, u0, u1, T: float, *,
                       mode: str = "one_endpoint", n: int = 512,
                       trace_n: int = 4096, tol: float = 1e-6,
                       max_iter: int = 500,
                       terminal: Optional[tuple] = None) -> SynthesisResult:
    """Boundary controls steering (u0, u1) to rest (or to a terminal target).

    Solves Lambda z = (u1, -u0) by conjugate gradients in the energy inner
    product; the returned Dirichlet controls are the wall traces of the
    minimizer (with the sign flip on the left wall).  Nonzero terminal
    targets are reduced to the null-control problem by subtracting the free
    backward evolution of the target.
    """
    space = HUMSpace.build(g, n)
    f0 = _on_grid(space, u1)
    f1 = -_on_grid(space, u0)

    if terminal is not None:
        te = g.t0 + T
        free = solve_backward(g, space.x, np.full(space.n, g.t0), t_end=te,
                              terminal=terminal)
        f0 = f0 - free.phi_t
        f1 = f1 + free.phi

    def A(z):
        img = apply_lambda(space, z, T, mode, trace_n)
        return space.riesz((img.q0, img.q1))

    b = space.riesz((f0, f1))
    b_norm = space.state_norm(b)
    zero = (np.zeros(space.n), np.zeros(space.n))
    if b_norm < 1e-300:
        ctrl = apply_lambda(space, zero, T, mode, trace_n).traces
        controls = _controls_from_traces(ctrl)
        return SynthesisResult(mode=mode, T=T, converged=True, iterations=0,
                               residual=0.0, residual_log=[], state=zero,
                               controls=controls, space=space)

    z = (np.zeros(space.n), np.zeros(space.n))
    r = (b[0].copy(), b[1].copy())
    p = (r[0].copy(), r[1].copy())
    rho = space.energy_inner(r, r)
    log = []
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        q = A(p)
        pq = space.energy_inner(p, q)
        if pq <= 0.0:
            break  # operator numerically singular along p: stall
        a = rho / pq
        z = (z[0] + a * p[0], z[1] + a * p[1])
        r = (r[0] - a * q[0], r[1] - a * q[1])
        rho_new = space.energy_inner(r, r)
        rel = math.sqrt(max(rho_new, 0.0)) / b_norm
        log.append(rel)
        if rel < tol:
            converged = True
            break
        p = (r[0] + (rho_new / rho) * p[0], r[1] + (rho_new / rho) * p[1])
        rho = rho_new

    final_img = apply_lambda(space, z, T, mode, trace_n)
    controls = _controls_from_traces(final_img.traces)
    return SynthesisResult(mode=mode, T=T, converged=converged,
                           iterations=it,
                           residual=log[-1] if log else 1.0,
                           residual_log=log, state=z, controls=controls,
                           space=space)


def _controls_from_traces(traces: dict) -> dict:
    out = {"right": traces["right"]}
    if "left" in traces:
        out["left"] = traces["left"].scaled(-1.0)
    return out


@dataclass(frozen=True)
class ControlVerification:
    """Forward check of a synthesized control."""

    energy_initial: float
    energy_terminal: float
    ratio: float
    terminal_sup: float          # max |u| and |u_t| at the final time
    degenerate: bool             # initial energy too small to divide by


def _energy_of(field_x, field_t, w) -> float:
    return 0.5 * float(np.sum(w * (field_x ** 2 + field_t ** 2)))


def verify_null_control(g: DomainGeometry, d: InitialData,
                        controls: dict, T: float, *,
                        quad_n: int = 1024,
                        terminal: Optional[tuple] = None
                        ) -> ControlVerification:
    """Drive the initial data forward with the controls, measure what is left.

    With a terminal target the residual is measured against the free
    backward extension of the target.
    """
    te = g.t0 + T
    bc_left = controls.get("left")
    bc_right = controls.get("right")

    x0, w0 = composite_nodes(*g.interval_at(g.t0), max(8, quad_n // 12), 12)
    f0 = solve_forced(g, d, x0, np.full_like(x0, g.t0),
                      bc_left=bc_left, bc_right=bc_right)
    e0 = _energy_of(f0.phi_x, f0.phi_t, w0)

    xe, we = composite_nodes(*g.interval_at(te), max(8, quad_n // 12), 12)
    fe = solve_forced(g, d, xe, np.full_like(xe, te),
                      bc_left=bc_left, bc_right=bc_right)
    phi_e, phix_e, phit_e = fe.phi, fe.phi_x, fe.phi_t
    if terminal is not None:
        free = solve_backward(g, xe, np.full_like(xe, te), t_end=te,
                              terminal=terminal)
        phi_e = phi_e - free.phi
        phix_e = phix_e - free.phi_x
        phit_e = phit_e - free.phi_t
    ee = _energy_of(phix_e, phit_e, we)

    degenerate = e0 < 1e-14
    ratio = ee / e0 if not degenerate else math.inf
    sup = max(float(np.max(np.abs(phi_e))), float(np.max(np.abs(phit_e))))
    return ControlVerification(energy_initial=e0, energy_terminal=ee,
                               ratio=ratio, terminal_sup=sup,
                               degenerate=degenerate)


def control_bound_check(g: DomainGeometry, result: SynthesisResult,
                        initial_energy: float) -> dict:
    """Compare the realized control cost with the a-priori budget.

    The direct inequality bounds the t-weighted squared trace integral by
    direct_constant * t0 * E(t0) of the minimizer state; the check reports
    both sides.
    """
    from .observability import observability_budget

    budget = observability_budget(g, result.T, result.mode)
    weighted = 0.0
    for side, v in result.controls.items():
        t, w = composite_nodes(v.window[0], v.window[1],
                               max(64, v.times.size // 8), 8)
        weight = (1.0 - g.ell2 ** 2) ** 2 if side == "right" \
            else (1.0 - g.ell1 ** 2) ** 2
        weighted += weight * float(np.sum(w * t * v(t) ** 2))
    bound = budget.direct_constant * g.t0 * initial_energy
    return {"weighted_cost": weighted, "bound": bound,
            "within_budget": weighted <= bound * (1.0 + 1e-9),
            "budget": budget}
