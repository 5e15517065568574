"""Geometry of the expanding interval (-l1*t, l2*t) and its derived constants."""
from __future__ import annotations

import json
import math
import sys
from dataclasses import dataclass


@dataclass(frozen=True)
class DomainGeometry:
    """Immutable bundle of the endpoint speeds and every derived constant.

    All constants are computed once at construction so that every module
    works with bit-identical values.
    """

    ell1: float
    ell2: float
    L0: float
    t0: float
    alpha: float
    beta: float
    kappa: float
    L1: float
    L2: float
    l_min: float
    L_max: float
    T_obs1: float
    T_obs2: float

    def interval_at(self, t: float) -> tuple[float, float]:
        """Endpoints (-ell1*t, ell2*t) of the interval at time t >= t0."""
        if t < self.t0:
            raise ValueError(f"t={t} is before the initial time t0={self.t0}")
        return (-self.ell1 * t, self.ell2 * t)

    @property
    def core(self) -> tuple[float, float]:
        """The initial interval (-ell1*t0, ell2*t0)."""
        return (-self.ell1 * self.t0, self.ell2 * self.t0)

    @property
    def extended(self) -> tuple[float, float]:
        """The enlarged interval (-L1*t0, L2*t0) carrying the extensions."""
        return (-self.L1 * self.t0, self.L2 * self.t0)

    def to_dict(self) -> dict:
        return {
            "ell1": self.ell1, "ell2": self.ell2, "L0": self.L0,
            "t0": self.t0, "alpha": self.alpha, "beta": self.beta,
            "kappa": self.kappa, "L1": self.L1, "L2": self.L2,
            "l_min": self.l_min, "L_max": self.L_max,
            "T_obs1": self.T_obs1, "T_obs2": self.T_obs2,
        }


def make_geometry(ell1: float, ell2: float, L0: float) -> DomainGeometry:
    """Validate the speeds and build the constant bundle.

    Requires 0 <= ell1, ell2 < 1 (strict, no epsilon slack), ell1 + ell2 > 0
    and L0 > 0.  The two closed forms of the sharp one-endpoint time are
    cross-checked at construction.
    """
    for name, v in (("ell1", ell1), ("ell2", ell2), ("L0", L0)):
        if not math.isfinite(v):
            raise ValueError(f"{name} must be finite, got {v!r}")
    if not (0.0 <= ell1 < 1.0):
        raise ValueError(f"ell1 must lie in [0, 1), got {ell1}")
    if not (0.0 <= ell2 < 1.0):
        raise ValueError(f"ell2 must lie in [0, 1), got {ell2}")
    if ell1 + ell2 <= 0.0:
        raise ValueError("ell1 + ell2 must be positive (the interval must expand)")
    if L0 <= 0.0:
        raise ValueError(f"L0 must be positive, got {L0}")

    t0 = L0 / (ell1 + ell2)
    alpha = (1.0 + ell1) / (1.0 - ell2)
    beta = (1.0 + ell2) / (1.0 - ell1)
    kappa = 2.0 / math.log(alpha * beta)
    L1 = (1.0 - ell2) * alpha * beta - 1.0
    L2 = (1.0 - ell1) * alpha * beta - 1.0
    l_min = min(ell1, ell2)
    L_max = max(ell1, ell2)

    T_obs1 = 2.0 * L0 / ((1.0 - ell1) * (1.0 - ell2))
    T_obs1_alt = (alpha * beta - 1.0) * t0
    # alpha*beta - 1 cancels catastrophically as ell1 + ell2 -> 0, so allow
    # for the corresponding absolute rounding floor on top of 1e-12 relative
    tol = 1e-12 * T_obs1 + 64.0 * sys.float_info.epsilon * alpha * beta * t0
    if abs(T_obs1 - T_obs1_alt) > tol:
        raise AssertionError(
            f"sharp-time cross-check failed: {T_obs1} vs {T_obs1_alt}"
        )
    T_obs2 = max(L0 / (1.0 - ell1), L0 / (1.0 - ell2))

    return DomainGeometry(
        ell1=ell1, ell2=ell2, L0=L0, t0=t0,
        alpha=alpha, beta=beta, kappa=kappa, L1=L1, L2=L2,
        l_min=l_min, L_max=L_max, T_obs1=T_obs1, T_obs2=T_obs2,
    )


def geometry_from_json(obj) -> DomainGeometry:
    """Build a geometry from a dict or JSON string {"ell1":..,"ell2":..,"L0":..}."""
    if isinstance(obj, str):
        obj = json.loads(obj)
    return make_geometry(float(obj["ell1"]), float(obj["ell2"]), float(obj["L0"]))


def interval_at(g: DomainGeometry, t: float) -> tuple[float, float]:
    """Module-level alias of DomainGeometry.interval_at."""
    return g.interval_at(t)
