"""Command line interface.

Every subcommand reads a JSON configuration (validated against the bundled
schema), prints a short key=value report to stdout, and can write CSV
artifacts with a JSON metadata sidecar plus optional rendered figures.

Exit codes: 0 success, 2 configuration error, 3 failed --assert check,
4 numerical failure.
"""
from __future__ import annotations

import argparse
import importlib.resources
import json
import sys

import numpy as np

from . import (artifacts, energy, geometry as geo, hum, observability as obs,
               oracle, presets, spectral)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_ASSERT = 3
EXIT_NUMERIC = 4


class AssertionFailure(Exception):
    """Raised when an --assert check does not hold."""


def _load_config(path: str) -> dict:
    import jsonschema

    with open(path) as fh:
        config = json.load(fh)
    schema = json.loads(importlib.resources.files("movingwave")
                        .joinpath("config_schema.json").read_text())
    jsonschema.validate(config, schema)
    return config


def _geometry(config: dict):
    return geo.geometry_from_json(config["geometry"])


def _initial_data(g, config: dict):
    if "initial_data" not in config:
        raise KeyError("this subcommand needs an 'initial_data' section")
    return presets.make_initial_data(g, config["initial_data"])


def _coefficients(g, config, section, default_N=64):
    d = _initial_data(g, config)
    N = config.get(section, {}).get("N", default_N)
    e = None
    from .extension import extend

    e = extend(g, d)
    return d, spectral.compute_coefficients(g, e, N)


def _report(pairs):
    for k, v in pairs:
        if isinstance(v, float):
            print(f"{k}={v:.12g}")
        else:
            print(f"{k}={v}")


def cmd_geometry(config, args):
    g = _geometry(config)
    pairs = sorted(g.to_dict().items())
    _report(pairs)
    if args.out:
        artifacts.write_csv(args.out, [k for k, _ in pairs],
                            [[v for _, v in pairs]])
        artifacts.write_metadata(artifacts.sibling(args.out, ".meta.json"),
                                 config, command="geometry")
    return []


def cmd_solve(config, args):
    g = _geometry(config)
    sec = config.get("solve", {})
    _, c = _coefficients(g, config, "solve")
    nx = sec.get("nx", 64)
    nt = sec.get("nt", 64)
    t_max = sec.get("t_max_factor", 3.0) * g.t0
    t = np.linspace(g.t0, t_max, nt)
    u = np.linspace(0.0, 1.0, nx)
    T, U = np.meshgrid(t, u, indexing="ij")
    X = -g.ell1 * T + U * (g.ell1 + g.ell2) * T
    field = spectral.evaluate_field(c, X, T)
    _report([("N", c.N), ("S", c.S),
             ("coefficient_cross_residual", c.cross_residual),
             ("tail_indicator", c.tail_indicator)])
    if args.out:
        rows = zip(X.ravel(), T.ravel(), field.phi.ravel(),
                   field.phi_x.ravel(), field.phi_t.ravel())
        artifacts.write_csv(args.out, ["x", "t", "phi", "phi_x", "phi_t"],
                            rows)
        artifacts.write_metadata(artifacts.sibling(args.out, ".meta.json"),
                                 config, command="solve", S=c.S, N=c.N)
        if args.plot:
            from . import plotting
            plotting.plot_field(field, artifacts.sibling(args.out, ".png"))
    return []


def cmd_energy_scan(config, args):
    g = _geometry(config)
    sec = config.get("energy_scan", {})
    _, c = _coefficients(g, config, "energy_scan")
    t_max = sec.get("t_max_factor", 10.0) * g.t0
    num = sec.get("num", 25)
    if sec.get("spacing", "log") == "log":
        ts = np.geomspace(g.t0, t_max, num)
    else:
        ts = np.linspace(g.t0, t_max, num)
    reports = energy.decay_scan(c, ts, quad_n=sec.get("quad_n", 256))
    worst = max(r.residual for r in reports)
    in_env = all(r.within_envelope() for r in reports)
    _report([("S", c.S), ("max_identity_residual", worst),
             ("within_envelope", in_env)])
    checks = []
    tol = sec.get("tolerance", 1e-7)
    checks.append(("energy_identity", worst <= tol * max(c.S, 1.0)))
    checks.append(("envelope", in_env))
    if args.out:
        energy.scan_to_csv(reports, args.out)
        artifacts.write_metadata(artifacts.sibling(args.out, ".meta.json"),
                                 config, command="energy-scan", S=c.S,
                                 max_identity_residual=worst,
                                 tolerance=tol)
        if args.plot:
            from . import plotting
            plotting.plot_decay(reports, artifacts.sibling(args.out, ".png"))
    return checks


def cmd_observe(config, args):
    g = _geometry(config)
    sec = config.get("observe", {})
    _, c = _coefficients(g, config, "observe")
    mode = sec.get("mode", "one_endpoint")
    side = sec.get("side", "right")
    Ms = sec.get("M_values", [1, 2, 3] if mode == "one_endpoint" else [1, 2])
    quad_n = sec.get("quad_n")
    tol = sec.get("tolerance", 1e-7)
    rows, checks, pairs = [], [], [("mode", mode), ("S", c.S)]
    for M in Ms:
        if mode == "one_endpoint":
            r = obs.one_endpoint_identity(c, side, M, quad_n)
        else:
            r = obs.two_endpoint_identity(c, M, quad_n)
        rows.append([r.mode, r.side, r.M, r.lhs, r.rhs, r.residual])
        pairs.append((f"residual_M{M}", r.residual))
        checks.append((f"identity_M{M}", r.residual <= tol * abs(r.rhs)))
    if "T" in sec:
        budget = obs.observability_budget(g, sec["T"], mode, side)
        pairs += [("feasible", budget.feasible),
                  ("T_required", budget.T_required),
                  ("inverse_constant", budget.inverse_constant),
                  ("direct_constant", budget.direct_constant)]
    _report(pairs)
    if args.out:
        artifacts.write_csv(args.out,
                            ["mode", "side", "M", "lhs", "rhs", "residual"],
                            rows)
        artifacts.write_metadata(artifacts.sibling(args.out, ".meta.json"),
                                 config, command="observe", S=c.S,
                                 tolerance=tol)
    return checks


def cmd_counterexample(config, args):
    g = _geometry(config)
    sec = config.get("counterexample", {})
    mode = sec.get("mode", "one_endpoint")
    eps = sec.get("epsilon", 0.2)
    N = sec.get("N", 1024)
    ce = obs.build_counterexample(g, eps, mode, N)
    n_s = sec.get("trace_samples", 2048)
    lo, hi = ce.silent_window
    t_sil = np.linspace(lo, hi * (1 - 1e-9), n_s)
    t_all = np.linspace(g.t0, ce.support[1], n_s)
    rows, peak, silent_max = [], 0.0, 0.0
    for side in (("right",) if mode == "one_endpoint" else ("right", "left")):
        tr_sil = spectral.boundary_trace(ce.coefficients, side, t_sil)
        tr_all = spectral.boundary_trace(ce.coefficients, side, t_all)
        peak = max(peak, float(np.max(np.abs(tr_all))))
        silent_max = max(silent_max, float(np.max(np.abs(tr_sil))))
        pred = ce.predicted_trace(side, t_all)
        for tv, a, p in zip(t_all, tr_all, pred):
            rows.append([side, tv, a, p])
    tol = sec.get("tolerance", 1e-9)
    _report([("mode", mode), ("epsilon", eps), ("anchor", ce.anchor),
             ("silent_window", f"({lo:.12g},{hi:.12g})"),
             ("trace_peak", peak), ("silent_max", silent_max),
             ("tail", ce.tail)])
    checks = [("silent_traces", silent_max <= tol * peak)]
    if args.out:
        artifacts.write_csv(args.out, ["side", "t", "trace", "predicted"],
                            rows)
        artifacts.write_metadata(artifacts.sibling(args.out, ".meta.json"),
                                 config, command="counterexample",
                                 silent_max=silent_max, trace_peak=peak,
                                 tolerance=tol)
        if args.plot:
            from . import plotting
            tr = spectral.boundary_trace(ce.coefficients, "right", t_all)
            plotting.plot_trace(t_all, tr,
                                artifacts.sibling(args.out, ".png"),
                                label="right trace",
                                windows={"silent": ce.silent_window})
    return checks


def cmd_control(config, args):
    g = _geometry(config)
    sec = config.get("control", {})
    mode = sec.get("mode", "one_endpoint")
    T = sec.get("T", sec.get("T_factor", 1.2)
                * (g.T_obs1 if mode == "one_endpoint" else g.T_obs2))
    d = _initial_data(g, config)
    result = hum.synthesize_control(
        g, d.phi0, d.phi1, T, mode=mode, n=sec.get("n", 512),
        trace_n=sec.get("trace_n", 4096), tol=sec.get("tol", 1e-6),
        max_iter=sec.get("max_iter", 500))
    check = hum.verify_null_control(g, d, result.controls, T)
    _report([("mode", mode), ("T", T), ("converged", result.converged),
             ("iterations", result.iterations),
             ("cg_residual", result.residual),
             ("energy_initial", check.energy_initial),
             ("energy_terminal", check.energy_terminal),
             ("terminal_ratio", check.ratio),
             ("control_cost", result.control_cost())])
    vtol = sec.get("verify_tolerance", 1e-4)
    checks = [("cg_converged", result.converged),
              ("terminal_energy", check.degenerate or check.ratio <= vtol)]
    if args.out:
        rows = []
        for side, v in sorted(result.controls.items()):
            for tv, s in zip(v.times, v.samples):
                rows.append([side, tv, s])
        artifacts.write_csv(args.out, ["side", "t", "control"], rows)
        artifacts.write_metadata(
            artifacts.sibling(args.out, ".meta.json"), config,
            command="control", converged=result.converged,
            iterations=result.iterations, terminal_ratio=check.ratio)
        if args.plot:
            from . import plotting
            v = result.controls["right"]
            plotting.plot_trace(v.times, v.samples,
                                artifacts.sibling(args.out, ".png"),
                                label="right control")
            if result.residual_log:
                plotting.plot_cg_history(
                    result.residual_log,
                    artifacts.sibling(args.out, ".cg.png"))
    return checks


def cmd_compare_oracle(config, args):
    g = _geometry(config)
    sec = config.get("compare_oracle", {})
    d, c = _coefficients(g, config, "compare_oracle")
    nx = sec.get("nx", 64)
    nt = sec.get("nt", 64)
    t_max = sec.get("t_max_factor", 3.0) * g.t0
    t = np.linspace(g.t0, t_max, nt)
    u = np.linspace(0.0, 1.0, nx)
    T, U = np.meshgrid(t, u, indexing="ij")
    X = -g.ell1 * T + U * (g.ell1 + g.ell2) * T
    series = spectral.evaluate_field(c, X, T)
    exact = oracle.solve_homogeneous(g, d, X, T)
    diff = series.max_difference(exact)
    tol = sec.get("tolerance", 1e-6)
    _report([("N", c.N)] + sorted(diff.items()))
    checks = [(f"oracle_match_{k}", v <= tol) for k, v in diff.items()]
    if args.out:
        rows = zip(X.ravel(), T.ravel(), series.phi.ravel(),
                   exact.phi.ravel(),
                   np.abs(series.phi - exact.phi).ravel())
        artifacts.write_csv(args.out,
                            ["x", "t", "phi_series", "phi_oracle", "diff"],
                            rows)
        artifacts.write_metadata(artifacts.sibling(args.out, ".meta.json"),
                                 config, command="compare-oracle",
                                 tolerance=tol, **diff)
    return checks


_COMMANDS = {
    "geometry": cmd_geometry,
    "solve": cmd_solve,
    "energy-scan": cmd_energy_scan,
    "observe": cmd_observe,
    "counterexample": cmd_counterexample,
    "control": cmd_control,
    "compare-oracle": cmd_compare_oracle,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="movingwave",
        description="Series solutions, observability checks and boundary "
                    "controls for the wave equation on an expanding interval")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True,
                       help="path to a JSON run configuration")
        p.add_argument("--out", help="CSV output path (metadata JSON and "
                                     "figures are written alongside)")
        p.add_argument("--plot", action="store_true",
                       help="render matplotlib figures next to the CSV")
        p.add_argument("--assert", dest="do_assert", action="store_true",
                       help="exit with status 3 if any check fails")
        p.add_argument("--threads", type=int, default=0,
                       help="cap BLAS/OpenMP threads (0 = leave unchanged)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    limiter = None
    try:
        if args.threads:
            try:
                from threadpoolctl import threadpool_limits
                limiter = threadpool_limits(limits=args.threads)
            except ImportError:
                pass
        try:
            config = _load_config(args.config)
        except Exception as exc:
            print(f"configuration error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        try:
            checks = _COMMANDS[args.command](config, args)
        except (KeyError, ValueError, TypeError, OSError) as exc:
            print(f"configuration error: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        except (ArithmeticError, RuntimeError) as exc:
            print(f"numerical failure: {exc}", file=sys.stderr)
            return EXIT_NUMERIC
        failed = [name for name, ok in checks if not ok]
        for name, ok in checks:
            print(f"check:{name}={'pass' if ok else 'FAIL'}")
        if args.do_assert and failed:
            print(f"assertion failed: {', '.join(failed)}", file=sys.stderr)
            return EXIT_ASSERT
        return EXIT_OK
    finally:
        if limiter is not None:
            limiter.unregister()


if __name__ == "__main__":
    sys.exit(main())
