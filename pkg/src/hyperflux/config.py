"""Experiment configuration: JSON dictionaries to toolkit objects.

Configs are plain dictionaries (usually loaded from a JSON file).  Every
referenced built-in must exist; anything else raises ConfigError so the
command line can exit with the config-error code instead of crashing mid
run.
"""

import json
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import currents as cur
from . import surfaces as surf
from .errors import ConfigError, HyperfluxError
from .expressions import COORD_NAMES, PARAM_NAMES, compile_point_function, compile_scalar_function
from .flows import FlowMap
from .geometry import Spacetime, SpacetimeVectorField, conformal_test_metric, minkowski


DEFAULT_CONFIG = {
    "spacetime": {"name": "minkowski", "dim": 3},
    "current": {"name": "boosted_gaussian", "velocity": [0.5, 0.0], "width": 1.0},
    "surface": {"name": "plane", "t": 0.0, "half_width": 8.0, "grid": 24},
    "flow": {"integrator": "analytic", "step": None, "tau_max": 5.0, "tau_samples": 11},
    "quadrature": {"refinements": 1, "resolution": 1.0},
    "seed": 20260808,
}


def load_config(path: Optional[str]) -> dict:
    cfg = {k: (dict(v) if isinstance(v, dict) else v) for k, v in DEFAULT_CONFIG.items()}
    if path is not None:
        try:
            with open(path) as fh:
                user = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
        if not isinstance(user, dict):
            raise ConfigError("config root must be a JSON object")
        for key, value in user.items():
            if isinstance(value, dict) and isinstance(cfg.get(key), dict):
                cfg[key].update(value)
            else:
                cfg[key] = value
    return cfg


def build_spacetime(spec: dict) -> Spacetime:
    spec = dict(spec or {})
    name = spec.pop("name", "minkowski")
    dim = int(spec.pop("dim", 3))
    try:
        if name == "minkowski":
            return minkowski(dim)
        if name == "conformal":
            return conformal_test_metric(dim, float(spec.pop("amplitude", 0.1)))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    raise ConfigError(f"unknown spacetime {name!r}")


def build_current(spec: dict, dim: int) -> cur.CurrentSpec:
    spec = dict(spec or {})
    name = spec.pop("name", "boosted_gaussian")
    rescale = spec.pop("rescale", None)
    try:
        if name == "boosted_gaussian":
            v = spec.pop("velocity", [0.0] * (dim - 1))
            c = cur.boosted_gaussian_current(np.asarray(v, dtype=float),
                                             float(spec.pop("width", 1.0)))
        elif name == "static_gaussian":
            c = cur.static_gaussian_current(float(spec.pop("width", 1.0)), dim - 1)
        elif name == "rotating_packet":
            c = cur.rotating_packet_current(float(spec.pop("omega", 1.0)),
                                            float(spec.pop("width", 1.0)),
                                            tuple(spec.pop("center", (0.5, 0.0))))
        elif name == "constant":
            c = cur.constant_current(spec.pop("components", [1.0] + [0.0] * (dim - 1)))
        elif name == "expression":
            c = _expression_current(spec, dim)
        else:
            raise ConfigError(f"unknown current {name!r}")
    except (ValueError,) as exc:
        raise ConfigError(str(exc)) from exc
    if c.dim != dim:
        raise ConfigError(f"current is {c.dim}-dimensional, chart is {dim}-dimensional")
    if rescale is not None:
        f = compile_scalar_function(rescale, COORD_NAMES[dim])
        c = cur.rescale_velocity(c, f)
    return c


def _expression_current(spec: dict, dim: int) -> cur.CurrentSpec:
    comps = spec.get("components")
    if not comps or len(comps) != dim:
        raise ConfigError(f"expression current needs {dim} component expressions")
    names = COORD_NAMES[dim]
    j_fn = compile_point_function(comps, names)

    def rho(points):
        vals = j_fn(points)
        q = vals[..., 0] ** 2 - np.sum(vals[..., 1:] ** 2, axis=-1)
        return np.sqrt(np.maximum(q, 0.0))

    def x_value(points):
        vals = j_fn(points)
        return vals / rho(points)[..., None]

    J = SpacetimeVectorField(j_fn, name="expression_current")
    X = SpacetimeVectorField(x_value, name="expression_velocity")
    box = np.asarray(spec.get("bounding_box", [[-1.0, 1.0]] * dim), dtype=float)
    return cur.CurrentSpec(J=J, rho_fn=rho, X=X,
                           divergence_free=bool(spec.get("divergence_free", False)),
                           dim=dim, bounding_box=box, name="expression")


def build_surface(spec: dict, dim: int, resolution: float = 1.0
                  ) -> surf.ParametrizedHypersurface:
    spec = dict(spec or {})
    name = spec.pop("name", "plane")
    grid = spec.pop("grid", None)

    def scaled(g):
        if isinstance(g, (list, tuple)):
            return tuple(max(2, int(round(n * resolution))) for n in g)
        return max(2, int(round(int(g) * resolution)))

    try:
        if name == "plane":
            return surf.plane_surface(dim, t=float(spec.pop("t", 0.0)),
                                      half_width=float(spec.pop("half_width", 8.0)),
                                      grid=scaled(grid if grid is not None else 24))
        if name == "disk":
            if dim != 3:
                raise ConfigError("disk surfaces live in 3-dimensional charts")
            g = grid if grid is not None else (32, 64)
            if not isinstance(g, (list, tuple)):
                g = (int(g), 2 * int(g))
            return surf.disk_surface(t=float(spec.pop("t", 0.0)),
                                     r_max=float(spec.pop("r_max", 1.0)),
                                     grid=scaled(g))
        if name == "graph":
            height = spec.pop("height", "0")
            names = PARAM_NAMES[:dim - 1]
            height_fn_vec = compile_point_function([height], names)

            def height_fn(u):
                return height_fn_vec(u)[..., 0]

            return surf.graph_surface(dim, height_fn,
                                      half_width=float(spec.pop("half_width", 8.0)),
                                      grid=scaled(grid if grid is not None else 24),
                                      name=f"graph({height})")
        if name == "expression":
            comps = spec.pop("components", None)
            box = spec.pop("box", None)
            if comps is None or box is None or len(comps) != dim:
                raise ConfigError(
                    f"expression surface needs {dim} components and a parameter box")
            params = tuple(spec.pop("params", PARAM_NAMES[:dim - 1]))
            embed = compile_point_function(comps, params)
            g = grid if grid is not None else [16] * (dim - 1)
            if not isinstance(g, (list, tuple)):
                g = [int(g)] * (dim - 1)
            return surf.ParametrizedHypersurface(embed, box, scaled(tuple(g)),
                                                 name="expression")
    except HyperfluxError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    raise ConfigError(f"unknown surface {name!r}")


def build_flow(spec: dict, current: cur.CurrentSpec, st: Spacetime) -> FlowMap:
    spec = dict(spec or {})
    integrator = spec.get("integrator", "analytic")
    if integrator not in ("analytic", "rk4"):
        raise ConfigError(f"unknown integrator {integrator!r}")
    step = spec.get("step")
    return FlowMap(current.X, spacetime=st, analytic=(integrator == "analytic"),
                   step=None if step is None else float(step))


def _attach_truncation(cfg: dict, surface: surf.ParametrizedHypersurface,
                       dim: int) -> surf.ParametrizedHypersurface:
    """Estimate the probability mass a finite box misses for Gaussian currents.

    Surfaces standing in for unbounded slices carry the estimate in their
    truncation field; integral error budgets include it.
    """
    import dataclasses

    cur_spec = cfg.get("current", {}) or {}
    surf_spec = cfg.get("surface", {}) or {}
    if cur_spec.get("name", "boosted_gaussian") not in ("boosted_gaussian",
                                                        "static_gaussian"):
        return surface
    if surf_spec.get("name", "plane") not in ("plane", "graph"):
        return surface
    width = float(cur_spec.get("width", 1.0))
    half = float(surf_spec.get("half_width", 8.0))
    tail = cur.gaussian_tail_mass(half / width, dim - 1)
    return dataclasses.replace(surface, truncation=tail)


@dataclass(frozen=True)
class Experiment:
    """Everything a verification run needs, built once from one config."""

    config: dict
    spacetime: Spacetime
    current: cur.CurrentSpec
    surface: surf.ParametrizedHypersurface
    flow: FlowMap
    refinements: int
    resolution: float
    seed: int
    tau_max: float
    tau_samples: int


def build_experiment(cfg: dict, resolution_override: Optional[float] = None) -> Experiment:
    st = build_spacetime(cfg.get("spacetime", {}))
    current = build_current(cfg.get("current", {}), st.dim)
    quad = dict(cfg.get("quadrature", {}))
    resolution = float(resolution_override if resolution_override is not None
                       else quad.get("resolution", 1.0))
    if resolution <= 0.0:
        raise ConfigError("resolution must be positive")
    surface = build_surface(cfg.get("surface", {}), st.dim, resolution)
    surface = _attach_truncation(cfg, surface, st.dim)
    flow_cfg = dict(cfg.get("flow", {}))
    flow = build_flow(flow_cfg, current, st)
    return Experiment(
        config=cfg,
        spacetime=st,
        current=current,
        surface=surface,
        flow=flow,
        refinements=int(quad.get("refinements", 1)),
        resolution=resolution,
        seed=int(cfg.get("seed", 0)),
        tau_max=float(flow_cfg.get("tau_max", 5.0)),
        tau_samples=int(flow_cfg.get("tau_samples", 11)),
    )
