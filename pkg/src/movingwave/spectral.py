"""Series solution built on the weighted log-oscillating boundary bases.

The solution is a bilateral sum over n != 0 of modes

    c_n * exp(i*n*pi*kappa*log(t+x)) - C_n * exp(i*n*pi*kappa*log(t-x)),

with C_n = c_n * exp(i*n*pi*kappa*log((1+ell2)/(1-ell2))).  Coefficients
are recovered from the extended initial data through either of two weighted
integrals (one per characteristic family); both are computed and compared.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable

import numpy as np

from .geometry import DomainGeometry, geometry_from_json
from .extension import ExtendedData
from .quadrature import composite_nodes


def mode_numbers(N: int) -> np.ndarray:
    """Bilateral mode indices [-N..-1, 1..N]."""
    return np.concatenate([np.arange(-N, 0), np.arange(1, N + 1)])


@dataclass(frozen=True)
class SpectralCoefficients:
    """Truncated coefficient vector c_n, n in [-N..-1, 1..N].

    ``cross_residual`` is max |c_n(+) - c_n(-)| over the two recovery
    integrals; ``parseval_plus/minus`` store the weighted data integrals
    that equal sum |n c_n|^2 in the untruncated limit.
    """

    geometry: DomainGeometry
    N: int
    values: np.ndarray = field(repr=False)
    cross_residual: float | None = None
    parseval_plus: float | None = None
    parseval_minus: float | None = None

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        if vals.shape != (2 * self.N,):
            raise ValueError(
                f"expected {2 * self.N} coefficients, got shape {vals.shape}")
        object.__setattr__(self, "values", vals)

    @property
    def modes(self) -> np.ndarray:
        return mode_numbers(self.N)

    def get(self, n: int) -> complex:
        if n == 0 or abs(n) > self.N:
            raise KeyError(f"mode {n} not stored (N={self.N})")
        return complex(self.values[n + self.N if n < 0 else n + self.N - 1])

    @property
    def big_C(self) -> np.ndarray:
        """C_n = c_n * exp(i*n*pi*kappa*log((1+ell2)/(1-ell2)))."""
        g = self.geometry
        ratio = (1.0 + g.ell2) / (1.0 - g.ell2)
        return self.values * np.exp(1j * np.pi * g.kappa * np.log(ratio)
                                    * self.modes)

    @property
    def weighted_sum(self) -> float:
        """sum_n |n c_n|^2."""
        return float(np.sum(np.abs(self.modes * self.values) ** 2))

    @property
    def S(self) -> float:
        """The invariant S = 2 pi^2 kappa sum |n c_n|^2."""
        return 2.0 * np.pi ** 2 * self.geometry.kappa * self.weighted_sum

    @property
    def tail_indicator(self) -> float:
        """|N c_{+-N}|^2 relative to the full weighted sum."""
        s = self.weighted_sum
        if s == 0.0:
            return 0.0
        edge = max(abs(self.values[0]), abs(self.values[-1]))
        return (self.N * edge) ** 2 / s

    def is_real_symmetric(self, tol: float = 1e-10) -> bool:
        """True when c_{-n} = conj(c_n), i.e. the solution is real."""
        scale = np.max(np.abs(self.values)) + 1e-300
        return bool(np.max(np.abs(self.values[::-1].conj() - self.values))
                    <= tol * scale)

    @classmethod
    def from_modes(cls, g: DomainGeometry, coeffs: dict[int, complex],
                   N: int | None = None) -> "SpectralCoefficients":
        """Build from a sparse {n: c_n} dictionary (n=0 rejected)."""
        if any(n == 0 for n in coeffs):
            raise ValueError("mode n=0 is not part of the basis")
        if N is None:
            N = max(abs(n) for n in coeffs)
        vals = np.zeros(2 * N, dtype=complex)
        for n, c in coeffs.items():
            if abs(n) > N:
                raise ValueError(f"mode {n} exceeds truncation N={N}")
            vals[n + N if n < 0 else n + N - 1] = c
        out = cls(geometry=g, N=N, values=vals)
        # for exact mode data the weighted integrals equal the sum exactly
        s = out.weighted_sum
        return replace(out, parseval_plus=s, parseval_minus=s,
                       cross_residual=0.0)

    def to_json(self) -> str:
        return json.dumps({
            "geometry": self.geometry.to_dict(),
            "N": self.N,
            "real": self.values.real.tolist(),
            "imag": self.values.imag.tolist(),
            "cross_residual": self.cross_residual,
            "parseval_plus": self.parseval_plus,
            "parseval_minus": self.parseval_minus,
        }, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "SpectralCoefficients":
        obj = json.loads(text)
        geo = obj["geometry"]
        g = geometry_from_json({k: geo[k] for k in ("ell1", "ell2", "L0")})
        vals = np.asarray(obj["real"]) + 1j * np.asarray(obj["imag"])
        return cls(geometry=g, N=obj["N"], values=vals,
                   cross_residual=obj.get("cross_residual"),
                   parseval_plus=obj.get("parseval_plus"),
                   parseval_minus=obj.get("parseval_minus"))


def compute_coefficients(g: DomainGeometry, e: ExtendedData, N: int, *,
                         panels: int | None = None, order: int = 12,
                         cross_tol: float | None = None
                         ) -> SpectralCoefficients:
    """Recover c_n, |n| <= N, from the extended data.

    Both weighted integrals (one over (-ell1 t0, L2 t0) against the outgoing
    family, one over (-L1 t0, ell2 t0) against the incoming family) are
    evaluated after the substitution that turns each into a plain Fourier
    integral in s over (0, 2), using composite Gauss-Legendre panels split
    at the image of the reflection pivot.  The outgoing-family values are
    returned; the max discrepancy is stored as ``cross_residual``.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    t0, kappa = g.t0, g.kappa
    n_arr = mode_numbers(N)
    if panels is None:
        panels = max(32, N)

    # outgoing family: s = kappa*log((t0+x)/(t0*(1-ell1))), s in (0, 2),
    # pivot x = ell2*t0 at s = kappa*log(beta)
    s_p, w_p = composite_nodes(0.0, 2.0, panels, order,
                               breakpoints=(kappa * np.log(g.beta),))
    x_p = t0 * (1.0 - g.ell1) * np.exp(s_p / kappa) - t0
    f_p = (np.asarray(e.ext_phi0_x(x_p), float)
           + np.asarray(e.ext_phi1(x_p), float))
    h_p = f_p * (t0 + x_p) / kappa
    fourier_p = np.exp(-1j * np.pi * np.outer(n_arr, s_p)) @ (w_p * h_p)
    phase_p = np.exp(-1j * np.pi * kappa * np.log(t0 * (1.0 - g.ell1)) * n_arr)
    c_plus = phase_p * fourier_p / (4j * np.pi * n_arr)

    # incoming family: s = 2 - kappa*log((t0-x)/(t0*(1-ell2))), s in (0, 2),
    # pivot x = -ell1*t0 at s = 2 - kappa*log(alpha)
    s_m, w_m = composite_nodes(0.0, 2.0, panels, order,
                               breakpoints=(2.0 - kappa * np.log(g.alpha),))
    x_m = t0 - t0 * (1.0 - g.ell2) * np.exp((2.0 - s_m) / kappa)
    f_m = (np.asarray(e.ext_phi0_x(x_m), float)
           - np.asarray(e.ext_phi1(x_m), float))
    h_m = f_m * (t0 - x_m) / kappa
    fourier_m = np.exp(1j * np.pi * np.outer(n_arr, s_m)) @ (w_m * h_m)
    ratio1 = (1.0 + g.ell1) / (1.0 - g.ell1)
    phase_m = np.exp(1j * np.pi * kappa * np.log(ratio1) * n_arr) \
        * np.exp(-1j * np.pi * kappa * np.log(t0 * (1.0 - g.ell2)) * n_arr)
    c_minus = phase_m * fourier_m / (4j * np.pi * n_arr)

    residual = float(np.max(np.abs(c_plus - c_minus)))
    if cross_tol is not None:
        scale = float(np.max(np.abs(c_plus))) + 1e-300
        if residual > cross_tol * scale:
            raise ArithmeticError(
                f"coefficient recovery routes disagree: {residual:.3e}"
                f" (tol {cross_tol:.1e} x {scale:.3e})")

    par_plus = float(np.sum(w_p * h_p ** 2) / (8.0 * np.pi ** 2))
    par_minus = float(np.sum(w_m * h_m ** 2) / (8.0 * np.pi ** 2))
    return SpectralCoefficients(geometry=g, N=N, values=c_plus,
                                cross_residual=residual,
                                parseval_plus=par_plus,
                                parseval_minus=par_minus)


def parseval_sum(c: SpectralCoefficients) -> tuple[float, float]:
    """(coefficient-side, data-side) values of sum |n c_n|^2.

    The data-side value is the weighted integral of the outgoing
    characteristic combination stored at recovery time; for coefficients
    built directly from modes the two coincide by construction.
    """
    s_plus = c.weighted_sum
    s_minus = c.parseval_plus if c.parseval_plus is not None else s_plus
    return s_plus, s_minus


def _domain_check(g: DomainGeometry, x: np.ndarray, t: np.ndarray):
    tol = 1e-12 * g.t0 * (1.0 + np.max(np.abs(t)) / g.t0)
    if (t < g.t0 - tol).any():
        raise ValueError("evaluation before the initial time t0")
    if (x < -g.ell1 * t - tol).any() or (x > g.ell2 * t + tol).any():
        raise ValueError("evaluation point outside the moving interval")


def _evaluate_complex(c: SpectralCoefficients, x, t):
    g = c.geometry
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    x, t = np.broadcast_arrays(x, t)
    shape = x.shape
    x = x.ravel()
    t = t.ravel()
    _domain_check(g, x, t)

    n = c.modes
    pk = np.pi * g.kappa
    # clamp the characteristic arguments away from 0 (they are >= (1-ell)*t0)
    wp = np.maximum(t + x, 1e-300)
    wm = np.maximum(t - x, 1e-300)
    Ep = np.exp(1j * pk * np.outer(np.log(wp), n))       # (P, 2N)
    Em = np.exp(1j * pk * np.outer(np.log(wm), n))
    cn = c.values
    Cn = c.big_C

    phi = Ep @ cn - Em @ Cn
    phi_x = 1j * pk * ((Ep @ (n * cn)) / wp + (Em @ (n * Cn)) / wm)
    phi_t = 1j * pk * ((Ep @ (n * cn)) / wp - (Em @ (n * Cn)) / wm)
    return (phi.reshape(shape), phi_x.reshape(shape), phi_t.reshape(shape))


def evaluate(c: SpectralCoefficients, x, t
             ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(phi, phi_x, phi_t) of the truncated series at broadcastable x, t.

    For real-symmetric coefficients the imaginary parts are pure roundoff
    and are discarded.
    """
    phi, phi_x, phi_t = _evaluate_complex(c, x, t)
    out = (phi.real, phi_x.real, phi_t.real)
    for arr in out:
        if not np.all(np.isfinite(arr)):
            raise FloatingPointError("non-finite value in series evaluation")
    return out


def boundary_trace(c: SpectralCoefficients, side: str, t) -> np.ndarray:
    """Normal-derivative trace phi_x at a moving endpoint, vectorized in t.

    right: phi_x(ell2 t, t) = (2 pi kappa / ((1-ell2^2) t)) *
           Re sum i n c_n exp(i n pi kappa log((1+ell2) t));
    left uses exp(i n pi kappa log((1-ell1) t)) and the (1-ell1^2) weight.
    """
    g = c.geometry
    t = np.asarray(t, dtype=float)
    scalar = t.ndim == 0
    t = np.atleast_1d(t)
    if (t < g.t0 * (1.0 - 1e-12)).any():
        raise ValueError("trace requested before the initial time t0")
    n = c.modes
    pk = np.pi * g.kappa
    if side == "right":
        arg = np.log((1.0 + g.ell2) * t)
        weight = 1.0 - g.ell2 ** 2
    elif side == "left":
        arg = np.log((1.0 - g.ell1) * t)
        weight = 1.0 - g.ell1 ** 2
    else:
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    series = np.exp(1j * pk * np.outer(arg, n)) @ (1j * n * c.values)
    out = 2.0 * pk * series.real / (weight * t)
    return out[0] if scalar else out


@dataclass(frozen=True)
class WaveField:
    """Sampled solution values on a set of points (arrays share one shape)."""

    x: np.ndarray
    t: np.ndarray
    phi: np.ndarray
    phi_x: np.ndarray
    phi_t: np.ndarray
    provenance: str = "series"

    def max_difference(self, other: "WaveField") -> dict[str, float]:
        """Componentwise max-abs differences against another sampling."""
        return {
            "phi": float(np.max(np.abs(self.phi - other.phi))),
            "phi_x": float(np.max(np.abs(self.phi_x - other.phi_x))),
            "phi_t": float(np.max(np.abs(self.phi_t - other.phi_t))),
        }


def evaluate_field(c: SpectralCoefficients, x, t,
                   block: int = 65536) -> WaveField:
    """Evaluate the series on broadcastable arrays, blockwise to cap memory."""
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    x, t = np.broadcast_arrays(x, t)
    shape = x.shape
    xf, tf = x.ravel(), t.ravel()
    outs = [np.empty(xf.size) for _ in range(3)]
    for start in range(0, xf.size, block):
        sl = slice(start, start + block)
        vals = evaluate(c, xf[sl], tf[sl])
        for buf, v in zip(outs, vals):
            buf[sl] = v
    return WaveField(x=x, t=t, phi=outs[0].reshape(shape),
                     phi_x=outs[1].reshape(shape),
                     phi_t=outs[2].reshape(shape), provenance="series")


def basis_gram(g: DomainGeometry, a: float, M: int, nmax: int,
               panels: int | None = None, order: int = 12) -> np.ndarray:
    """Gram matrix of the weighted log-oscillating basis on (a, (ab)^M a).

    Basis functions sqrt(kappa/(2M)) * exp(i*pi*n*(kappa/M)*log z) under the
    inner product integral f conj(g) dz/z; the result should be the identity.
    Computed directly in the z variable as an independent check.
    """
    if a <= 0:
        raise ValueError("the window must sit inside z > 0")
    upper = (g.alpha * g.beta) ** M * a
    n = np.arange(-nmax, nmax + 1)
    if panels is None:
        panels = max(64, 8 * nmax * M)
    z, w = composite_nodes(a, upper, panels, order)
    funcs = np.sqrt(g.kappa / (2.0 * M)) * np.exp(
        1j * np.pi * (g.kappa / M) * np.outer(n, np.log(z)))
    return (funcs * (w / z)) @ funcs.conj().T
