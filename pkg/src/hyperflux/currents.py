"""Analytic current and velocity fields used as test inputs.

Each CurrentSpec factorizes a future-directed timelike current as
J = rho * X with rho > 0, which is what the conservation machinery needs:
surfaces are advected along X (or any positive rescaling of it) while the
flux of J through them is monitored.
"""

import math
from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np

from .errors import NonPositiveRescalingError, SuperluminalError
from .geometry import SpacetimeVectorField, constant_field


@dataclass(frozen=True)
class CurrentSpec:
    """Current J together with a factorization J = rho * X.

    divergence_free is a claim, not a computation; built-ins that claim it
    are verified against finite differences in the test suite.
    bounding_box (shape (d, 2)) declares where random invariant checks
    sample the fields.
    """

    J: SpacetimeVectorField
    rho_fn: Callable[[np.ndarray], np.ndarray]
    X: SpacetimeVectorField
    divergence_free: bool
    dim: int
    bounding_box: np.ndarray
    name: str = ""


def rotating_observer_field(omega: float) -> SpacetimeVectorField:
    """Unit-norm observer field rotating about the axis of a 3d chart.

    Spatial part (X^1, X^2) = omega * (-y, x); time component
    X^0 = sqrt(1 + omega^2 (x^2 + y^2)) makes g(X, X) = 1 exactly.
    The flow is closed-form: linear rotation in space, uniform march in t.
    """
    if omega <= 0.0:
        raise ValueError("omega must be positive")

    def value(points):
        points = np.asarray(points, dtype=float)
        x, y = points[..., 1], points[..., 2]
        r2 = x * x + y * y
        return np.stack([np.sqrt(1.0 + omega ** 2 * r2), -omega * y, omega * x], axis=-1)

    def flow(tau, points):
        points = np.asarray(points, dtype=float)
        t, x, y = points[..., 0], points[..., 1], points[..., 2]
        r2 = x * x + y * y
        c, s = math.cos(omega * tau), math.sin(omega * tau)
        return np.stack([
            t + np.sqrt(1.0 + omega ** 2 * r2) * tau,
            x * c - y * s,
            x * s + y * c,
        ], axis=-1)

    def div(points):
        return np.zeros(np.shape(points)[:-1])

    return SpacetimeVectorField(value, divergence_fn=div, flow_fn=flow,
                                name=f"rotating_observer(omega={omega:g})")


def example1_field(omega: float) -> SpacetimeVectorField:
    """Alias for rotating_observer_field, matching the example1 CLI command."""
    return rotating_observer_field(omega)


def radial_crossing_time(omega: float, r0: float) -> float:
    """Closed-form flow parameter where the pushed radial direction goes null.

    For the rotating observer field, a radial tangent of the t = 0 disk at
    radius r0 has g(V, V) = (omega^2 r0 tau)^2 / (1 + omega^2 r0^2) - 1
    after flow time tau, vanishing at sqrt(1 + omega^2 r0^2) / (omega^2 r0).
    """
    if r0 <= 0.0:
        raise ValueError("r0 must be positive")
    return math.sqrt(1.0 + omega ** 2 * r0 ** 2) / (omega ** 2 * r0)


def gaussian_normalization(width: float, n_spatial: int) -> float:
    """Normalization constant of an isotropic Gaussian on a spatial slice."""
    return (2.0 * math.pi) ** (-0.5 * n_spatial) * width ** (-n_spatial)


def gaussian_tail_mass(half_width_in_sigmas: float, n_spatial: int) -> float:
    """Upper bound on normalized Gaussian mass outside a centered box."""
    one_sided = 0.5 * math.erfc(half_width_in_sigmas / math.sqrt(2.0))
    inside = (1.0 - 2.0 * one_sided) ** n_spatial
    return 1.0 - inside


def boosted_gaussian_current(v, width: float = 1.0) -> CurrentSpec:
    """Divergence-free timelike current carried by a drifting Gaussian packet.

    J^0 = f(x - v t), J^a = v^a f with f a normalized isotropic Gaussian of
    the given width, so the continuity equation holds by the chain rule.
    Factorization: X = (1, v) / sqrt(1 - v^2) (unit norm), rho = f sqrt(1 - v^2).
    """
    v = np.atleast_1d(np.asarray(v, dtype=float))
    speed2 = float(np.dot(v, v))
    if speed2 >= 1.0:
        raise SuperluminalError(f"|v| = {math.sqrt(speed2):g} >= 1")
    if width <= 0.0:
        raise ValueError("width must be positive")
    n_spatial = len(v)
    dim = n_spatial + 1
    norm = gaussian_normalization(width, n_spatial)
    gamma = 1.0 / math.sqrt(1.0 - speed2)

    def density(points):
        points = np.asarray(points, dtype=float)
        dx = points[..., 1:] - v * points[..., 0:1]
        return norm * np.exp(-0.5 * np.sum(dx * dx, axis=-1) / width ** 2)

    def j_value(points):
        f = density(points)
        out = np.empty(np.shape(points))
        out[..., 0] = f
        out[..., 1:] = v * f[..., None]
        return out

    def j_div(points):
        return np.zeros(np.shape(points)[:-1])

    J = SpacetimeVectorField(j_value, divergence_fn=j_div,
                             name=f"boosted_gaussian(v={v.tolist()})")
    X = constant_field(np.concatenate([[gamma], gamma * v]), name="boost_velocity")

    def rho(points):
        return density(points) / gamma

    half = 8.0 * width
    bbox = np.array([[-1.0, 1.0]] + [[-half, half]] * n_spatial)
    return CurrentSpec(J=J, rho_fn=rho, X=X, divergence_free=True, dim=dim,
                       bounding_box=bbox, name=f"boosted_gaussian(|v|={math.sqrt(speed2):g})")


def static_gaussian_current(width: float = 1.0, n_spatial: int = 2) -> CurrentSpec:
    """Boosted Gaussian at zero velocity."""
    return boosted_gaussian_current(np.zeros(n_spatial), width)


def rotating_packet_current(omega: float, width: float = 1.0,
                            center=(0.5, 0.0)) -> CurrentSpec:
    """Non-conserved test current rho * X with X the rotating observer field.

    rho is a time-independent Gaussian centered off axis, so the rotation
    sweeps density around and div(rho X) = omega (b x - a y) rho / width^2
    is genuinely nonzero.  This is the inhomogeneous-transport test input.
    """
    X = rotating_observer_field(omega)
    a, b = float(center[0]), float(center[1])
    norm = gaussian_normalization(width, 2)

    def rho(points):
        points = np.asarray(points, dtype=float)
        dx = points[..., 1] - a
        dy = points[..., 2] - b
        return norm * np.exp(-0.5 * (dx * dx + dy * dy) / width ** 2)

    def j_value(points):
        return rho(points)[..., None] * X(points)

    def j_div(points):
        points = np.asarray(points, dtype=float)
        x, y = points[..., 1], points[..., 2]
        return omega * (b * x - a * y) * rho(points) / width ** 2

    J = SpacetimeVectorField(j_value, divergence_fn=j_div,
                             name=f"rotating_packet(omega={omega:g})")
    r_far = abs(math.hypot(a, b)) + 8.0 * width
    bbox = np.array([[-1.0, 1.0], [-r_far, r_far], [-r_far, r_far]])
    return CurrentSpec(J=J, rho_fn=rho, X=X, divergence_free=False, dim=3,
                       bounding_box=bbox, name=f"rotating_packet(omega={omega:g})")


def constant_current(components, bounding_box=None) -> CurrentSpec:
    """Constant timelike current; trivially divergence-free.

    Factorized with rho = sqrt(g_flat(J, J)) so X is unit-norm in the flat
    chart it is meant for.
    """
    comp = np.asarray(components, dtype=float)
    dim = len(comp)
    q = comp[0] ** 2 - float(np.dot(comp[1:], comp[1:]))
    if q <= 0.0 or comp[0] <= 0.0:
        raise ValueError("components must be future-directed timelike in the flat chart")
    rho0 = math.sqrt(q)
    J = constant_field(comp, name="constant_current")
    X = constant_field(comp / rho0, name="constant_velocity")

    def rho(points):
        return np.full(np.shape(points)[:-1], rho0)

    if bounding_box is None:
        bounding_box = np.array([[-1.0, 1.0]] * dim)
    return CurrentSpec(J=J, rho_fn=rho, X=X, divergence_free=True, dim=dim,
                       bounding_box=np.asarray(bounding_box, dtype=float),
                       name="constant_current")


def rescale_velocity(c: CurrentSpec, f_fn, n_check: int = 64,
                     rng: Optional[np.random.Generator] = None) -> CurrentSpec:
    """Replace X by f * X and rho by rho / f; the current J is untouched.

    f must be strictly positive; this is spot-checked on random samples
    from the bounding box.  The rescaled field loses any analytic flow
    (its integral curves are reparametrized), so flows fall back to RK4.
    """
    rng = rng or np.random.default_rng(0)
    box = c.bounding_box
    samples = rng.uniform(box[:, 0], box[:, 1], size=(n_check, c.dim))
    fvals = np.asarray(f_fn(samples), dtype=float)
    if np.any(fvals <= 0.0):
        raise NonPositiveRescalingError("rescaling function must be strictly positive")

    base_X = c.X

    def x_value(points):
        return np.asarray(f_fn(points), dtype=float)[..., None] * base_X(points)

    base_rho = c.rho_fn

    def rho(points):
        return np.asarray(base_rho(points), dtype=float) / np.asarray(f_fn(points), dtype=float)

    X = SpacetimeVectorField(x_value, name=f"rescaled({base_X.name})")
    return replace(c, X=X, rho_fn=rho, name=f"rescaled({c.name})")
