"""Ready-made initial data profiles on the starting interval.

All presets return an InitialData whose callables accept numpy arrays and
whose spatial derivative is supplied analytically.  Profiles are written in
the unit coordinate u = (x - a)/(b - a) of the core interval (a, b).
"""
from __future__ import annotations

import csv as _csv
from typing import Callable

import numpy as np

from .geometry import DomainGeometry
from .extension import InitialData
from . import spectral


def _unit(g: DomainGeometry):
    a, b = g.core
    return a, b, b - a


def sine_bump(g: DomainGeometry, *, amplitude: float = 1.0, modes: int = 1,
              power: int = 6, velocity_amplitude: float = 0.0,
              velocity_modes: int = 1) -> InitialData:
    """phi0 = A sin(m pi u)^p with analytic derivative; optional velocity.

    Powers p >= 5 leave the derivative flat enough at both endpoints for the
    reflected extensions to stay many times differentiable, which keeps the
    coefficient tail decaying fast.
    """
    if power < 1 or modes < 1 or velocity_modes < 1:
        raise ValueError("power and mode counts must be positive integers")
    a, _, span = _unit(g)
    w = modes * np.pi / span
    wv = velocity_modes * np.pi / span

    def phi0(x):
        return amplitude * np.sin(w * (np.asarray(x) - a)) ** power

    def phi0_x(x):
        s = np.sin(w * (np.asarray(x) - a))
        return amplitude * power * s ** (power - 1) \
            * np.cos(w * (np.asarray(x) - a)) * w

    def phi1(x):
        return velocity_amplitude * np.sin(wv * (np.asarray(x) - a)) ** power

    return InitialData(phi0=phi0, phi1=phi1, phi0_x=phi0_x, label="sine_bump")


def poly_bump(g: DomainGeometry, *, amplitude: float = 1.0,
              degree: int = 4, velocity_amplitude: float = 0.0
              ) -> InitialData:
    """phi0 = A (4 u (1-u))^q, a polynomial bump normalized to peak A."""
    if degree < 1:
        raise ValueError("degree must be a positive integer")
    a, _, span = _unit(g)

    def u_of(x):
        return (np.asarray(x, dtype=float) - a) / span

    def phi0(x):
        u = u_of(x)
        return amplitude * (4.0 * u * (1.0 - u)) ** degree

    def phi0_x(x):
        u = u_of(x)
        base = 4.0 * u * (1.0 - u)
        return amplitude * degree * base ** (degree - 1) \
            * 4.0 * (1.0 - 2.0 * u) / span

    def phi1(x):
        u = u_of(x)
        return velocity_amplitude * (4.0 * u * (1.0 - u)) ** degree

    return InitialData(phi0=phi0, phi1=phi1, phi0_x=phi0_x, label="poly_bump")


def compact_bump(g: DomainGeometry, *, amplitude: float = 1.0,
                 center: float = 0.5, width: float = 0.6,
                 velocity_amplitude: float = 0.0) -> InitialData:
    """C-infinity mollifier bump A exp(1 - 1/(1 - v^2)), v = 2(u-c)/width.

    Identically zero outside |u - center| < width/2, so every reflected
    extension is smooth and the coefficients decay faster than any power.
    """
    if not (0.0 < width and 0.0 < center < 1.0):
        raise ValueError("center must lie in (0,1) and width must be positive")
    a, _, span = _unit(g)
    half = 0.5 * width

    def v_of(x):
        u = (np.asarray(x, dtype=float) - a) / span
        return (u - center) / half

    def bump(v):
        out = np.zeros_like(v)
        inside = np.abs(v) < 1.0
        vi = v[inside]
        out[inside] = np.exp(1.0 - 1.0 / (1.0 - vi ** 2))
        return out

    def bump_dv(v):
        out = np.zeros_like(v)
        inside = np.abs(v) < 1.0
        vi = v[inside]
        out[inside] = np.exp(1.0 - 1.0 / (1.0 - vi ** 2)) \
            * (-2.0 * vi / (1.0 - vi ** 2) ** 2)
        return out

    def phi0(x):
        out = amplitude * bump(np.atleast_1d(v_of(x)).astype(float))
        return out if np.ndim(x) else float(out[0])

    def phi0_x(x):
        v = np.atleast_1d(v_of(x)).astype(float)
        out = amplitude * bump_dv(v) / (half * span)
        return out if np.ndim(x) else float(out[0])

    def phi1(x):
        v = np.atleast_1d(v_of(x)).astype(float)
        out = velocity_amplitude * bump(v)
        return out if np.ndim(x) else float(out[0])

    return InitialData(phi0=phi0, phi1=phi1, phi0_x=phi0_x,
                       label="compact_bump")


def from_coefficients(g: DomainGeometry, coeffs, N: int | None = None
                      ) -> InitialData:
    """Initial data of an exact finite mode superposition at t = t0.

    ``coeffs`` is either a SpectralCoefficients or a {n: c_n} dict; the
    returned handles are the closed-form traces of the series and its first
    derivatives on the initial interval.
    """
    if isinstance(coeffs, spectral.SpectralCoefficients):
        c = coeffs
    else:
        c = spectral.SpectralCoefficients.from_modes(g, dict(coeffs), N=N)
    if not c.is_real_symmetric(tol=1e-9):
        raise ValueError("mode data must satisfy c_{-n} = conj(c_n)")
    t0 = g.t0

    def phi0(x):
        return spectral.evaluate(c, x, t0)[0]

    def phi0_x(x):
        return spectral.evaluate(c, x, t0)[1]

    def phi1(x):
        return spectral.evaluate(c, x, t0)[2]

    return InitialData(phi0=phi0, phi1=phi1, phi0_x=phi0_x,
                       label="from_coefficients")


def random_modes(g: DomainGeometry, *, n_modes: int = 3, seed: int = 0,
                 scale: float = 1.0, decay: float = 2.0) -> InitialData:
    """Random real-symmetric superposition of the first n_modes modes."""
    if n_modes < 1:
        raise ValueError("n_modes must be >= 1")
    rng = np.random.default_rng(seed)
    coeffs: dict[int, complex] = {}
    for n in range(1, n_modes + 1):
        c = (rng.standard_normal() + 1j * rng.standard_normal()) \
            * scale / n ** decay
        coeffs[n] = c
        coeffs[-n] = np.conj(c)
    return from_coefficients(g, coeffs)


def from_samples(g: DomainGeometry, x: np.ndarray, phi0_vals: np.ndarray,
                 phi1_vals: np.ndarray) -> InitialData:
    """Cubic-spline data through samples on the core interval."""
    from scipy.interpolate import CubicSpline

    x = np.asarray(x, dtype=float)
    order = np.argsort(x)
    s0 = CubicSpline(x[order], np.asarray(phi0_vals, float)[order])
    s1 = CubicSpline(x[order], np.asarray(phi1_vals, float)[order])
    return InitialData(phi0=s0, phi1=s1, phi0_x=s0.derivative(),
                       label="from_samples")


def from_csv(g: DomainGeometry, path: str) -> InitialData:
    """Load columns x, phi0, phi1 from a CSV file with a header row."""
    xs, p0, p1 = [], [], []
    with open(path, newline="") as fh:
        for row in _csv.DictReader(fh):
            xs.append(float(row["x"]))
            p0.append(float(row["phi0"]))
            p1.append(float(row["phi1"]))
    if len(xs) < 4:
        raise ValueError("need at least 4 sample rows for spline data")
    return from_samples(g, np.array(xs), np.array(p0), np.array(p1))


_REGISTRY: dict[str, Callable] = {
    "sine_bump": sine_bump,
    "poly_bump": poly_bump,
    "compact_bump": compact_bump,
    "random_modes": random_modes,
}


def make_initial_data(g: DomainGeometry, config: dict) -> InitialData:
    """Dispatch on {"preset": name, ...params} dictionaries (CLI entry)."""
    config = dict(config)
    name = config.pop("preset", None)
    if name == "from_csv":
        return from_csv(g, config["path"])
    if name == "from_coefficients":
        coeffs = {int(k): complex(v[0], v[1])
                  for k, v in config["modes_table"].items()}
        return from_coefficients(g, coeffs, N=config.get("N"))
    if name not in _REGISTRY:
        raise ValueError(f"unknown preset {name!r}; choose from "
                         f"{sorted(_REGISTRY) + ['from_csv', 'from_coefficients']}")
    return _REGISTRY[name](g, **config)
