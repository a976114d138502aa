"""Command-line front end: experiment configuration, execution, data export.

Exit codes: 0 success, 1 verification failure, 2 configuration error,
3 numerical failure.  Errors are reported as one JSON object per line on
stderr.  CSV files carry a header comment echoing the configuration and
print floats with 17 significant digits, so identical configs reproduce
byte-identical outputs.
"""

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from .born import born_probability, positivity_check, verify_spacelike_identity
from .config import build_experiment, load_config
from .conservation import (
    FlowCylinder,
    conservation_sweep,
    divergence_theorem_check,
    reynolds_check,
)
from .currents import (
    radial_crossing_time,
    rescale_velocity,
    rotating_observer_field,
    rotating_packet_current,
)
from .errors import ConfigError, HyperfluxError
from .expressions import COORD_NAMES
from .flows import FlowMap, causal_sweep, lightlike_crossing
from .geometry import minkowski
from .quadrature import RegionSpec
from .surfaces import disk_surface, graph_surface, half_disk_surface, plane_surface

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _fmt(x) -> str:
    return format(float(x), ".17g")


def _write_csv(path, columns, rows, config_echo=None):
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", newline="") as fh:
        if config_echo is not None:
            fh.write("# config: " + json.dumps(config_echo, sort_keys=True) + "\n")
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(v if isinstance(v, str) else _fmt(v) for v in row) + "\n")


def _write_json(path, payload):
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
        with open(path, "w") as fh:
            fh.write(text)


# ---------------------------------------------------------------------------
# example1: crossing table and causal sweep of the rotating disk
# ---------------------------------------------------------------------------

def cmd_example1(args) -> int:
    if args.omega <= 0.0:
        raise ConfigError("omega must be positive")
    if args.r_max <= 0.0:
        raise ConfigError("r-max must be positive")
    st = minkowski(3)
    field = rotating_observer_field(args.omega)
    flow = FlowMap(field, spacetime=st)
    disk = disk_surface(r_max=args.r_max, grid=(args.grid, 2 * args.grid))

    echo = {
        "command": "example1", "omega": args.omega, "r_max": args.r_max,
        "grid": args.grid, "tau_max": args.tau_max, "tau_samples": args.tau_samples,
        "seed": args.seed,
    }

    r_nodes = np.linspace(args.r_max / args.grid, args.r_max, args.grid)
    crossing_rows = []
    for r0 in r_nodes:
        tau_num = lightlike_crossing(st, flow, disk, (r0, 0.0), (1.0, 0.0),
                                     tau_max=args.tau_max)
        if tau_num is None:
            continue
        tau_ref = radial_crossing_time(args.omega, float(r0))
        crossing_rows.append((r0, tau_num, tau_ref, abs(tau_num - tau_ref)))
    _write_csv(os.path.join(args.out_dir, "crossing.csv"),
               ["r0", "tau_numeric", "tau_analytic", "abs_err"],
               crossing_rows, config_echo=echo)

    taus = np.linspace(0.0, args.tau_max, args.tau_samples)
    sweep_rows = []
    for sample in causal_sweep(st, flow, disk, taus):
        r0, theta = sample.u
        t, x, y = sample.point
        sweep_rows.append((sample.tau, r0, theta, t, x, y, str(sample.character)))
    _write_csv(os.path.join(args.out_dir, "sweep.csv"),
               ["tau", "r0", "theta", "t", "x", "y", "causal_class"],
               sweep_rows, config_echo=echo)
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify: run every verification suite against its tolerance
# ---------------------------------------------------------------------------

def _identity_cases(exp):
    """Flat plane, tilted plane, and a mildly curved graph over the current."""
    dim = exp.spacetime.dim
    grid = max(2, int(round(24 * exp.resolution)))
    flat = plane_surface(dim, t=0.0, half_width=8.0, grid=grid)

    tilted = graph_surface(dim, lambda u: 0.3 * u[..., 0], half_width=8.0,
                           grid=grid, name="tilted")

    def bump(u):
        return 0.2 * np.sin(u[..., 0]) * np.cos(u[..., 1] if u.shape[-1] > 1 else 0.0)

    curved = graph_surface(dim, bump, half_width=8.0, grid=grid, name="curved_graph")
    return [("flat_plane", flat), ("tilted_plane", tilted), ("curved_graph", curved)]


def run_verify(exp) -> dict:
    st, current = exp.spacetime, exp.current
    suites = {}

    identity = {}
    worst_rel = 0.0
    worst_pointwise = 0.0
    for name, surface in _identity_cases(exp):
        rep = verify_spacelike_identity(st, current.J, surface,
                                        refinements=exp.refinements)
        identity[name] = {"lhs": rep.lhs, "rhs": rep.rhs, "rel_diff": rep.rel_diff,
                          "max_pointwise_rel": rep.max_pointwise_rel}
        worst_rel = max(worst_rel, rep.rel_diff)
        worst_pointwise = max(worst_pointwise, rep.max_pointwise_rel)
    suites["spacelike_identity"] = {
        "cases": identity,
        "max_rel_diff": worst_rel,
        "max_pointwise_rel": worst_pointwise,
        "tolerance": 1e-8,
        "pointwise_tolerance": 1e-10,
        "pass": bool(worst_rel < 1e-8 and worst_pointwise < 1e-10),
    }

    norm = born_probability(st, current.J, exp.surface, refinements=exp.refinements)
    norm_err = abs(norm.value - 1.0)
    suites["born_normalization"] = {
        "value": norm.value, "error_estimate": norm.error_estimate,
        "abs_deviation": norm_err, "tolerance": 1e-6,
        "pass": bool(norm_err < 1e-6),
    }

    taus = np.linspace(0.0, exp.tau_max, exp.tau_samples)
    sweep = conservation_sweep(st, current, exp.surface, taus, flow=exp.flow,
                               refinements=exp.refinements)
    drifts = [float(sweep.max_drift)]
    rng = np.random.default_rng(exp.seed)
    names = COORD_NAMES[st.dim]
    for _ in range(exp.config.get("verify", {}).get("rescalings", 2)):
        amp = rng.uniform(0.1, 0.5)
        freq = rng.uniform(0.5, 1.5)
        phase = rng.uniform(0.0, 2.0 * np.pi)

        def f(points, a=amp, b=freq, c=phase):
            return 1.0 + a * np.sin(b * points[..., 1] + c)

        rescaled = rescale_velocity(current, f, rng=rng)
        rflow = FlowMap(rescaled.X, spacetime=st, analytic=False)
        rsweep = conservation_sweep(st, rescaled, exp.surface, taus, flow=rflow,
                                    refinements=exp.refinements)
        drifts.append(float(rsweep.max_drift))
    suites["conservation_sweep"] = {
        "max_drift": max(drifts), "per_flow": drifts, "tolerance": 1e-6,
        "pass": bool(max(drifts) < 1e-6),
    }

    packet = rotating_packet_current(0.7, width=1.0, center=(0.7, 0.0))
    pdisk = half_disk_surface(r_max=7.0,
                              grid=(max(2, int(round(40 * exp.resolution))),
                                    max(2, int(round(40 * exp.resolution)))))
    rtaus = np.arange(5) * 1e-2
    rep = reynolds_check(minkowski(3), packet, pdisk, rtaus, refinements=exp.refinements)
    suites["reynolds_transport"] = {
        "max_residual": rep.max_residual, "tolerance": 1e-4,
        "pass": bool(rep.max_residual < 1e-4),
    }

    cyl = FlowCylinder(base=exp.surface, flow=exp.flow, tau0=0.0, tau1=1.0,
                       n_tau=max(2, int(round(16 * exp.resolution))))
    div_rep = divergence_theorem_check(st, current.J, cyl, refinements=exp.refinements)
    suites["divergence_theorem"] = {
        "cap_difference": div_rep.cap_difference,
        "tube_flux_max": div_rep.tube_flux_max,
        "closure_residual": div_rep.closure_residual,
        "cap_tolerance": 1e-6, "tube_tolerance": 1e-10,
        "pass": bool(div_rep.cap_difference < 1e-6 and div_rep.tube_flux_max < 1e-10),
    }

    all_pass = all(s["pass"] for s in suites.values())
    return {"all_pass": all_pass, "suites": suites, "config": exp.config,
            "version": __version__}


def cmd_verify(args) -> int:
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg["seed"] = args.seed
    exp = build_experiment(cfg, resolution_override=args.resolution)
    summary = run_verify(exp)
    _write_json(args.out, summary)
    return EXIT_OK if summary["all_pass"] else EXIT_VERIFY_FAILED


# ---------------------------------------------------------------------------
# born: probability of a region
# ---------------------------------------------------------------------------

def cmd_born(args) -> int:
    cfg = load_config(args.config)
    exp = build_experiment(cfg, resolution_override=args.resolution)
    region_spec = cfg.get("region")
    if args.region is not None:
        try:
            region_spec = json.loads(args.region)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"region is not valid JSON: {exc}") from exc
    if region_spec in (None, "full"):
        region = None
    else:
        if not isinstance(region_spec, list):
            raise ConfigError("region must be a list of [lo, hi] rectangles")
        if len(region_spec) == 0:
            record = {"surface": exp.surface.name, "region": [], "value": 0.0,
                      "error_estimate": 0.0, "flags": {}}
            _write_json(args.out, record)
            return EXIT_OK
        try:
            region = RegionSpec.of(region_spec, within=exp.surface.param_box)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    result = born_probability(exp.spacetime, exp.current.J, exp.surface,
                              region=region, refinements=exp.refinements)
    pos = positivity_check(exp.spacetime, exp.current.J, exp.surface)
    record = {
        "surface": exp.surface.name,
        "region": "full" if region is None else [list(map(list, r)) for r in region.rectangles],
        "value": result.value,
        "error_estimate": result.error_estimate,
        "flags": {"tangent_nodes": len(pos.tangent_nodes),
                  "negative_nodes": len(pos.negative_nodes)},
    }
    _write_json(args.out, record)
    return EXIT_OK


# ---------------------------------------------------------------------------
# sweep: conservation table; classify: per-node causal character
# ---------------------------------------------------------------------------

def cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    exp = build_experiment(cfg, resolution_override=args.resolution)
    taus = np.linspace(0.0, exp.tau_max, exp.tau_samples)
    report = conservation_sweep(exp.spacetime, exp.current, exp.surface, taus,
                                flow=exp.flow, refinements=exp.refinements)
    rows = [
        (tau, total, err, drift)
        for tau, total, err, drift in zip(report.tau_grid, report.totals,
                                          report.error_estimates, report.drifts)
    ]
    _write_csv(os.path.join(args.out_dir, "conservation.csv"),
               ["tau", "total", "error_estimate", "residual"],
               rows, config_echo=cfg)
    return EXIT_OK


def cmd_classify(args) -> int:
    cfg = load_config(args.config)
    exp = build_experiment(cfg, resolution_override=args.resolution)
    taus = np.linspace(0.0, exp.tau_max, exp.tau_samples)
    rows = []
    for sample in causal_sweep(exp.spacetime, exp.flow, exp.surface, taus):
        rows.append(tuple([sample.tau, *sample.u, *sample.point, str(sample.character)]))
    k = exp.surface.codim_params
    ucols = [f"u{i}" for i in range(k)]
    pcols = list(COORD_NAMES[exp.spacetime.dim])
    _write_csv(os.path.join(args.out_dir, "classify.csv"),
               ["tau", *ucols, *pcols, "causal_class"],
               rows, config_echo=cfg)
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing and error mapping
# ---------------------------------------------------------------------------

def _common(sub):
    sub.add_argument("--config", default=None, help="JSON config file")
    sub.add_argument("--out-dir", default="out", help="output directory")
    sub.add_argument("--seed", type=int, default=None, help="random seed override")
    sub.add_argument("--resolution", type=float, default=None,
                     help="grid resolution multiplier")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="hyperflux",
        description="Hypersurface flux integrals and conservation checks "
                    "in Lorentzian spacetimes.",
    )
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    ex1 = sub.add_parser("example1", help="rotating-disk crossing table and causal sweep")
    ex1.add_argument("--omega", type=float, default=1.0)
    ex1.add_argument("--r-max", type=float, default=2.0)
    ex1.add_argument("--grid", type=int, default=16, help="radial node count")
    ex1.add_argument("--tau-max", type=float, default=3.0)
    ex1.add_argument("--tau-samples", type=int, default=7)
    _common(ex1)
    ex1.set_defaults(fn=cmd_example1)

    ver = sub.add_parser("verify", help="run all verification suites")
    ver.add_argument("--out", default="-", help="JSON summary path, '-' for stdout")
    _common(ver)
    ver.set_defaults(fn=cmd_verify)

    born = sub.add_parser("born", help="probability of a surface region")
    born.add_argument("--region", default=None,
                      help="JSON list of parameter sub-rectangles")
    born.add_argument("--out", default="-", help="JSON record path, '-' for stdout")
    _common(born)
    born.set_defaults(fn=cmd_born)

    sw = sub.add_parser("sweep", help="conservation sweep CSV")
    _common(sw)
    sw.set_defaults(fn=cmd_sweep)

    cl = sub.add_parser("classify", help="per-node causal classification CSV")
    _common(cl)
    cl.set_defaults(fn=cmd_classify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        sys.stderr.write(json.dumps({"error": type(exc).__name__,
                                     "message": str(exc)}) + "\n")
        return EXIT_CONFIG
    except HyperfluxError as exc:
        code = EXIT_CONFIG if _is_config_stage(exc) else EXIT_NUMERICAL
        sys.stderr.write(json.dumps({"error": type(exc).__name__,
                                     "message": str(exc)}) + "\n")
        return code


def _is_config_stage(exc: HyperfluxError) -> bool:
    from .errors import NonPositiveRescalingError, SuperluminalError
    return isinstance(exc, (SuperluminalError, NonPositiveRescalingError))


if __name__ == "__main__":
    sys.exit(main())
