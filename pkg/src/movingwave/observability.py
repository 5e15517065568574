"""Boundary observability: exact trace identities, budgets, counterexamples.

Over time windows whose log-length is a multiple of the fundamental period,
the weighted boundary traces recover the invariant S exactly:

    int_{t0}^{(ab)^M t0} t phi_x(ell2 t, t)^2 dt = 4 M S / (1-ell2^2)^2,

with the mirrored statement at the left endpoint, and a two-endpoint
version over the shorter windows (t0, beta^M t0) and (t0, alpha^M t0).
Below the sharp window lengths observability fails: for any epsilon > 0
there are solutions whose traces vanish identically on all but the last
epsilon-fraction of the sharp window.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .geometry import DomainGeometry
from .extension import InitialData, antiderivative
from .quadrature import composite_nodes, oscillatory_panels, integrate
from .spectral import SpectralCoefficients, boundary_trace, mode_numbers


# ---------------------------------------------------------------------------
# exact trace identities
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TraceIdentityReport:
    """Quadrature value vs. exact right-hand side of one trace identity."""

    mode: str                     # 'one_endpoint' or 'two_endpoint'
    side: str                     # 'left', 'right' or 'both'
    M: int
    lhs: float
    rhs: float
    residual: float
    windows: dict
    parts: dict = field(default_factory=dict)


def _trace_integral(c: SpectralCoefficients, side: str, theta_max: float,
                    quad_n: int | None) -> float:
    """int t * phi_x(wall)^2 dt over (t0, t0 e^{theta_max/kappa}).

    Computed in theta = kappa log(t/t0), where the squared trace times t^2
    is a trigonometric polynomial of degree 2N in pi*theta.
    """
    g = c.geometry
    panels = oscillatory_panels(2.0 * np.pi * c.N, theta_max)
    if quad_n is not None:
        panels = max(panels, quad_n // 12)
    th, w = composite_nodes(0.0, theta_max, panels, 12)
    t = g.t0 * np.exp(th / g.kappa)
    tr = boundary_trace(c, side, t)
    return float(np.sum(w * t * t * tr ** 2) / g.kappa)


def one_endpoint_identity(c: SpectralCoefficients, side: str = "right",
                          M: int = 1, quad_n: int | None = None
                          ) -> TraceIdentityReport:
    """Single-endpoint identity over the window (t0, (alpha*beta)^M t0)."""
    if M < 1:
        raise ValueError("M must be a positive integer")
    g = c.geometry
    weight = (1.0 - g.ell2 ** 2) if side == "right" else (1.0 - g.ell1 ** 2)
    theta_max = 2.0 * M            # kappa * log((alpha beta)^M) = 2M
    lhs = _trace_integral(c, side, theta_max, quad_n)
    rhs = 4.0 * M * c.S / weight ** 2
    window = (g.t0, (g.alpha * g.beta) ** M * g.t0)
    return TraceIdentityReport(
        mode="one_endpoint", side=side, M=M, lhs=lhs, rhs=rhs,
        residual=abs(lhs - rhs), windows={side: window})


def two_endpoint_identity(c: SpectralCoefficients, M: int = 1,
                          quad_n: int | None = None,
                          windows: str = "power") -> TraceIdentityReport:
    """Two-endpoint identity with asymmetric observation windows:

        (1-ell1^2)^2 * int_{t0}^{T_L} t phi_x(-ell1 t, t)^2 dt
      + (1-ell2^2)^2 * int_{t0}^{T_R} t phi_x(ell2 t, t)^2 dt = 4 M S.

    windows='power' takes T_L = beta^M t0 and T_R = alpha^M t0.  With these
    the off-diagonal mode interactions only cancel when M = 1 or when the
    two speeds coincide; for generic geometries the M >= 2 statement is an
    identity only in the diagonal terms, and the report carries the true
    residual.  windows='periodic' takes T_L = beta t0 and
    T_R = alpha (alpha beta)^{M-1} t0, for which the interactions cancel for
    every M, making the identity exact for arbitrary coefficient vectors.
    """
    if M < 1:
        raise ValueError("M must be a positive integer")
    g = c.geometry
    if windows == "power":
        th_left = M * g.kappa * math.log(g.beta)
        th_right = M * g.kappa * math.log(g.alpha)
    elif windows == "periodic":
        th_left = g.kappa * math.log(g.beta)
        th_right = g.kappa * (math.log(g.alpha)
                              + (M - 1) * math.log(g.alpha * g.beta))
    else:
        raise ValueError(f"windows must be 'power' or 'periodic', got"
                         f" {windows!r}")
    left = _trace_integral(c, "left", th_left, quad_n)
    right = _trace_integral(c, "right", th_right, quad_n)
    lhs = (1.0 - g.ell1 ** 2) ** 2 * left + (1.0 - g.ell2 ** 2) ** 2 * right
    rhs = 4.0 * M * c.S
    return TraceIdentityReport(
        mode="two_endpoint", side="both", M=M, lhs=lhs, rhs=rhs,
        residual=abs(lhs - rhs),
        windows={"left": (g.t0, g.t0 * math.exp(th_left / g.kappa)),
                 "right": (g.t0, g.t0 * math.exp(th_right / g.kappa))},
        parts={"left": left, "right": right})


# ---------------------------------------------------------------------------
# observability budgets
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BudgetReport:
    """Feasibility and constants for observing/controlling over (t0, t0+T)."""

    mode: str
    side: str
    T: float
    T_required: float
    feasible: bool
    M: int
    inverse_constant: float       # energy <= C * weighted trace integral
    direct_constant: float        # trace integral <= K * initial energy


def observability_budget(g: DomainGeometry, T: float, mode: str,
                         side: str = "right") -> BudgetReport:
    """Sharp-time feasibility plus the explicit inequality constants."""
    if T <= 0.0:
        raise ValueError("the window length T must be positive")
    L = g.L_max
    if mode == "one_endpoint":
        T_req = g.T_obs1
        weight = (1.0 - g.ell2 ** 2) if side == "right" \
            else (1.0 - g.ell1 ** 2)
        inverse = g.alpha * g.beta * weight ** 2 / (4.0 * (1.0 - L))
        M = max(1, math.ceil(math.log1p(T / g.t0)
                             / math.log(g.alpha * g.beta)))
        direct = 4.0 * M * (1.0 + L) / weight ** 2
    elif mode == "two_endpoint":
        T_req = g.T_obs2
        side = "both"
        lmin = g.l_min
        inverse = (1.0 - lmin ** 2) ** 2 * max(g.alpha, g.beta) \
            / (4.0 * (1.0 - L))
        M = max(1, math.ceil(math.log1p(T / g.t0)
                             / math.log(min(g.alpha, g.beta))))
        direct = 4.0 * M * (1.0 + L) / (1.0 - L ** 2) ** 2
    else:
        raise ValueError(f"mode must be 'one_endpoint' or 'two_endpoint',"
                         f" got {mode!r}")
    return BudgetReport(mode=mode, side=side, T=float(T), T_required=T_req,
                        feasible=T >= T_req * (1.0 - 1e-12), M=M,
                        inverse_constant=inverse, direct_constant=direct)


# ---------------------------------------------------------------------------
# non-observability counterexamples
# ---------------------------------------------------------------------------

def _mollifier(theta, lo, hi):
    """C-infinity bump supported on (lo, hi), peak value 1."""
    theta = np.asarray(theta, dtype=float)
    out = np.zeros_like(theta)
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    v = (theta - mid) / half
    inside = np.abs(v) < 1.0
    vi = v[inside]
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - vi ** 2))
    return out


@dataclass(frozen=True)
class Counterexample:
    """Solution whose boundary traces vanish on the silent window.

    The trace profile g lives on the last epsilon-fraction of the sharp
    window and integrates to zero against dt/t; its log-periodic extension
    determines the solution completely.
    """

    geometry: DomainGeometry
    mode: str
    epsilon: float
    anchor: str                            # which wall carries g directly
    support: tuple[float, float]           # in t, inside (t0, ab*t0]
    silent_window: tuple[float, float]
    coefficients: SpectralCoefficients
    g: Callable = field(repr=False)
    tail: float = 0.0

    def g_periodic(self, t):
        """alpha*beta-log-periodic extension of the trace profile."""
        g = self.geometry
        t = np.asarray(t, dtype=float)
        period = g.alpha * g.beta
        k = np.floor(np.log(t / g.t0) / np.log(period))
        return self.g(t / period ** k)

    def predicted_trace(self, side: str, t):
        """Closed-form boundary trace implied by the profile g."""
        g = self.geometry
        t = np.asarray(t, dtype=float)
        if side == "right":
            weight = 1.0 - g.ell2 ** 2
            arg = t if self.anchor == "right" else g.beta * t
        elif side == "left":
            weight = 1.0 - g.ell1 ** 2
            arg = t if self.anchor == "left" else g.alpha * t
        else:
            raise ValueError(f"bad side {side!r}")
        return self.g_periodic(arg) / (weight * t)

    def initial_data(self) -> InitialData:
        """Closed-form initial data (right-anchored construction).

        The outgoing characteristic combination is
        G(x) = g_per((t0+x)/(1+ell2))/(t0+x); its reflection G~ about the
        right pivot splits the data into phi0_x = (G+G~)/2 and
        phi1 = (G-G~)/2.  For a left anchor the mirrored construction is
        recovered via the exact mode superposition instead.
        """
        g = self.geometry
        if self.anchor != "right":
            from .presets import from_coefficients
            return from_coefficients(g, self.coefficients)
        t0 = g.t0
        r2 = (1.0 - g.ell2) / (1.0 + g.ell2)
        pivot = g.ell2 * t0

        def G(x):
            x = np.asarray(x, dtype=float)
            return self.g_periodic((t0 + x) / (1.0 + g.ell2)) / (t0 + x)

        def G_tilde(x):
            x = np.asarray(x, dtype=float)
            out = np.empty_like(x)
            low = x <= pivot
            out[low] = (1.0 / r2) * G(-t0 + (t0 - x[low]) / r2)
            out[~low] = r2 * G(t0 - r2 * (t0 + x[~low]))
            return out

        def phi0_x(x):
            x = np.atleast_1d(np.asarray(x, dtype=float))
            return 0.5 * (G(x) + G_tilde(x))

        def phi1(x):
            x = np.atleast_1d(np.asarray(x, dtype=float))
            out = 0.5 * (G(x) - G_tilde(x))
            return out if np.ndim(x) else float(out[0])

        a, b = g.core
        phi0 = antiderivative(phi0_x, a, b, panels=4096)

        def phi0_clamped(x):
            return phi0(np.clip(np.asarray(x, dtype=float), a, b))

        return InitialData(phi0=phi0_clamped, phi1=phi1, phi0_x=phi0_x,
                           label="counterexample")


def build_counterexample(g: DomainGeometry, epsilon: float,
                         mode: str = "one_endpoint", N: int = 1024
                         ) -> Counterexample:
    """Construct the silent solution for a given epsilon in (0, 1).

    The profile is a pair of opposite-signed smooth lobes on the last
    epsilon-fraction (in log time) of the sharp window, with amplitudes
    balanced so that the mean of g against dt/t vanishes (making the n = 0
    coefficient exactly zero).
    """
    if not (0.0 < epsilon < 1.0):
        raise ValueError("epsilon must lie in (0, 1)")
    if N < 4:
        raise ValueError("N must be at least 4")
    if mode not in ("one_endpoint", "two_endpoint"):
        raise ValueError(f"bad mode {mode!r}")

    t0, kappa = g.t0, g.kappa
    if mode == "one_endpoint":
        W = g.alpha * g.beta * t0
        anchor = "right"
    else:
        W = max(g.alpha, g.beta) * t0
        anchor = "right" if g.alpha >= g.beta else "left"

    th_lo, th_hi = math.log((1.0 - epsilon) * W), math.log(W)
    th_mid = 0.5 * (th_lo + th_hi)

    def lobes(theta):
        return (_mollifier(theta, th_lo, th_mid),
                _mollifier(theta, th_mid, th_hi))

    # balance so that int g dt/t = int g(e^theta) dtheta = 0
    i1 = integrate(lambda th: lobes(th)[0], th_lo, th_mid, panels=64)
    i2 = integrate(lambda th: lobes(th)[1], th_mid, th_hi, panels=64)
    amp2 = -float(np.real(i1 / i2))

    def g_profile(t):
        t = np.asarray(t, dtype=float)
        theta = np.log(np.maximum(t, 1e-300))
        b1, b2 = lobes(theta)
        return b1 + amp2 * b2

    # Fourier coefficients g_n = (kappa/2) int g e^{-i n pi kappa theta} dtheta
    n_arr = mode_numbers(N)
    panels = oscillatory_panels(np.pi * kappa * N, th_hi - th_lo)
    th, w = composite_nodes(th_lo, th_hi, panels, 12,
                            breakpoints=(th_mid,))
    b1, b2 = lobes(th)
    profile = b1 + amp2 * b2
    g_n = 0.5 * kappa * (np.exp(-1j * np.pi * kappa * np.outer(n_arr, th))
                         @ (w * profile))
    g_tail = float(np.max(np.abs(g_n[[0, -1]])) /
                   (np.max(np.abs(g_n)) + 1e-300))

    if anchor == "right":
        phase = np.exp(-1j * np.pi * kappa * np.log(1.0 + g.ell2) * n_arr)
    else:
        phase = np.exp(-1j * np.pi * kappa * np.log(1.0 - g.ell1) * n_arr)
    c_vals = g_n * phase / (2j * np.pi * kappa * n_arr)
    coeffs = SpectralCoefficients(geometry=g, N=N, values=c_vals)

    silent = (t0, (1.0 - epsilon) * W)
    return Counterexample(geometry=g, mode=mode, epsilon=epsilon,
                          anchor=anchor, support=(math.exp(th_lo), W),
                          silent_window=silent, coefficients=coeffs,
                          g=g_profile, tail=g_tail)
