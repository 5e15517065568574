"""Wave equation on an interval with two linearly moving endpoints.

Exact series solutions in weighted log-oscillating bases, energy decay and
boundary observability identities, non-observability counterexamples below
the sharp time, and boundary control synthesis by duality, all cross-checked
against an exact method-of-characteristics solver.
"""

__version__ = "0.1.0"

from .geometry import DomainGeometry, make_geometry, geometry_from_json
from .extension import InitialData, ExtendedData, extend
from .spectral import (SpectralCoefficients, compute_coefficients, evaluate,
                       evaluate_field, boundary_trace, parseval_sum,
                       WaveField)
from .energy import EnergyReport, energy_report, decay_scan, decay_bounds
from .observability import (TraceIdentityReport, one_endpoint_identity,
                            two_endpoint_identity, observability_budget,
                            Counterexample, build_counterexample)
from .oracle import (CharacteristicSolver, ControlFunction, reflect,
                     solve_homogeneous, solve_forced, solve_backward)
from .hum import (HUMSpace, apply_lambda, synthesize_control,
                  verify_null_control, control_bound_check)

__all__ = [
    "DomainGeometry", "make_geometry", "geometry_from_json",
    "InitialData", "ExtendedData", "extend",
    "SpectralCoefficients", "compute_coefficients", "evaluate",
    "evaluate_field", "boundary_trace", "parseval_sum", "WaveField",
    "EnergyReport", "energy_report", "decay_scan", "decay_bounds",
    "TraceIdentityReport", "one_endpoint_identity", "two_endpoint_identity",
    "observability_budget", "Counterexample", "build_counterexample",
    "CharacteristicSolver", "ControlFunction", "reflect",
    "solve_homogeneous", "solve_forced", "solve_backward",
    "HUMSpace", "apply_lambda", "synthesize_control", "verify_null_control",
    "control_bound_check",
]
