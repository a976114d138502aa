"""Parametrized hypersurfaces: tangent frames, pullback metric, induced volume.

A hypersurface is an embedding of a rectangular (d-1)-parameter box into
the chart.  Everything below is batched: parameter arrays have shape
(..., d-1), embedded points (..., d), tangent frames (..., d-1, d) with
rows ordered like the parameters.
"""

from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np

from .errors import DegenerateImmersionError, NotSpacelikeError
from .geometry import (
    EPS_CAUSAL,
    FD_SCALE,
    CausalCharacter,
    Spacetime,
    _metric_raw,
)
from .quadrature import (
    IntegralResult,
    RegionSpec,
    as_box,
    midpoint_integral,
    midpoint_nodes,
    refine_shape,
    richardson_pair,
)

# Relative singular-value threshold for the immersion test.
IMMERSION_RTOL = 1e-10


@dataclass(frozen=True)
class ParametrizedHypersurface:
    """Embedding u -> phi(u) of a closed parameter box into the chart.

    grid_shape is the base quadrature resolution; orientation flips the
    sign of every oriented integral; truncation is an externally estimated
    bound on probability mass outside the box (for surfaces that stand in
    for unbounded ones) and is added to integral error budgets.
    """

    embed_fn: Callable[[np.ndarray], np.ndarray]
    param_box: np.ndarray
    grid_shape: tuple
    orientation: int = 1
    jacobian_fn: Optional[Callable[[np.ndarray], np.ndarray]] = None
    name: str = ""
    truncation: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "param_box", as_box(self.param_box))
        object.__setattr__(self, "grid_shape", tuple(int(n) for n in self.grid_shape))
        if len(self.grid_shape) != len(self.param_box):
            raise ValueError("grid_shape rank must match param_box rank")
        if any(n < 2 for n in self.grid_shape):
            raise ValueError("grid_shape entries must be >= 2")
        if self.orientation not in (1, -1):
            raise ValueError("orientation must be +1 or -1")

    @property
    def codim_params(self) -> int:
        return len(self.param_box)

    def embed(self, u: np.ndarray) -> np.ndarray:
        return np.asarray(self.embed_fn(np.asarray(u, dtype=float)), dtype=float)

    def with_orientation(self, orientation: int) -> "ParametrizedHypersurface":
        return replace(self, orientation=orientation)


@dataclass(frozen=True)
class TangentFrame:
    """Embedded point and the (d-1) coordinate tangent vectors at it."""

    point: np.ndarray
    basis: np.ndarray  # shape (d-1, d)


def frames_at(h: ParametrizedHypersurface, u: np.ndarray,
              check_immersion: bool = True):
    """Embedded points and tangent frames at parameter values u (..., k).

    Returns (points, basis) with basis of shape (..., k, d); basis rows are
    central differences of the embedding (or the analytic Jacobian rows).
    """
    u = np.asarray(u, dtype=float)
    k = h.codim_params
    if u.shape[-1] != k:
        raise ValueError(f"parameter points need {k} components")
    points = h.embed(u)
    if h.jacobian_fn is not None:
        basis = np.asarray(h.jacobian_fn(u), dtype=float)
    else:
        steps = FD_SCALE * (1.0 + np.abs(u))
        eye = np.eye(k)
        offs = eye.reshape(k, *([1] * (u.ndim - 1)), k)
        plus = h.embed(u[None, ...] + steps[None, ...] * offs)
        minus = h.embed(u[None, ...] - steps[None, ...] * offs)
        diffs = (plus - minus) / (2.0 * np.moveaxis(steps, -1, 0)[..., None])
        basis = np.moveaxis(diffs, 0, -2)
    if check_immersion:
        _check_immersion(basis)
    return points, basis


def _check_immersion(basis: np.ndarray) -> None:
    sv = np.linalg.svd(basis, compute_uv=False)
    if np.any(sv[..., -1] <= IMMERSION_RTOL * sv[..., 0]):
        raise DegenerateImmersionError("tangent vectors are linearly dependent")


def tangent_frame(h: ParametrizedHypersurface, u) -> TangentFrame:
    """Tangent frame at a single parameter point."""
    point, basis = frames_at(h, np.asarray(u, dtype=float))
    return TangentFrame(point=point, basis=basis)


def pullback_metric(st: Spacetime, h: ParametrizedHypersurface, u) -> np.ndarray:
    """Riemannian candidate -g(d_i phi, d_j phi); positive definite iff spacelike."""
    points, basis = frames_at(h, u)
    return _pullback_from_frames(st, points, basis)


def _pullback_from_frames(st: Spacetime, points, basis) -> np.ndarray:
    g = _metric_raw(st, points)
    return -np.einsum("...iu,...uv,...jv->...ij", basis, g, basis)


def surface_causal_class(st: Spacetime, h: ParametrizedHypersurface, u,
                         tol: float = EPS_CAUSAL) -> CausalCharacter:
    """Causal character of the tangent space at one parameter point."""
    m = pullback_metric(st, h, u)
    return _classify_pullback(np.linalg.eigvalsh(m), tol)


def _classify_pullback(eig: np.ndarray, tol: float) -> CausalCharacter:
    smallest = eig[..., 0]
    if smallest > tol:
        return CausalCharacter.SPACELIKE
    if smallest < -tol:
        return CausalCharacter.TIMELIKE
    if eig.shape[-1] > 1 and abs(eig[..., 1]) <= tol:
        return CausalCharacter.DEGENERATE
    return CausalCharacter.LIGHTLIKE


def surface_causal_class_batch(st: Spacetime, h: ParametrizedHypersurface,
                               u: np.ndarray, tol: float = EPS_CAUSAL) -> np.ndarray:
    """Vectorized tangent-space classification; object array of CausalCharacter."""
    m = pullback_metric(st, h, u)
    eig = np.linalg.eigvalsh(m)
    smallest = eig[..., 0]
    out = np.empty(smallest.shape, dtype=object)
    out[...] = CausalCharacter.LIGHTLIKE
    out[smallest > tol] = CausalCharacter.SPACELIKE
    out[smallest < -tol] = CausalCharacter.TIMELIKE
    if eig.shape[-1] > 1:
        degen = (np.abs(smallest) <= tol) & (np.abs(eig[..., 1]) <= tol)
        out[degen] = CausalCharacter.DEGENERATE
    return out


def future_unit_normal(st: Spacetime, points: np.ndarray, basis: np.ndarray) -> np.ndarray:
    """Future-directed unit normal on a spacelike tangent space.

    Gram-Schmidt of the coordinate time axis against the tangent frame:
    solve g(T_i, T_j) c^j = g(e0, T_i), set n = e0 - c^i T_i, normalize,
    and flip to positive time component.  Raises NotSpacelikeError when
    the result fails to be timelike.
    """
    g = _metric_raw(st, points)
    d = st.dim
    e0 = np.zeros(points.shape[:-1] + (d,))
    e0[..., 0] = 1.0
    gram = np.einsum("...iu,...uv,...jv->...ij", basis, g, basis)
    rhs = np.einsum("...u,...uv,...jv->...j", e0, g, basis)
    coef = np.linalg.solve(gram, rhs[..., None])[..., 0]
    n = e0 - np.einsum("...i,...iu->...u", coef, basis)
    q = np.einsum("...uv,...u,...v->...", g, n, n)
    if np.any(q <= EPS_CAUSAL):
        raise NotSpacelikeError("no timelike normal: tangent space is not spacelike")
    n = n / np.sqrt(q)[..., None]
    return np.where((n[..., 0] < 0.0)[..., None], -n, n)


# ---------------------------------------------------------------------------
# Induced-volume integration (spacelike case)
# ---------------------------------------------------------------------------

def induced_area_density(st: Spacetime, h: ParametrizedHypersurface,
                         u: np.ndarray, tol: float = EPS_CAUSAL) -> np.ndarray:
    """sqrt det(-pullback) at parameter nodes; raises on non-spacelike nodes."""
    points, basis = frames_at(h, u)
    m = _pullback_from_frames(st, points, basis)
    eig = np.linalg.eigvalsh(m)
    if np.any(eig[..., 0] <= tol):
        bad = np.argwhere(eig[..., 0] <= tol)
        raise NotSpacelikeError(
            f"surface '{h.name}' is not spacelike at {len(bad)} of "
            f"{int(np.prod(eig[..., 0].shape))} quadrature nodes"
        )
    return np.sqrt(np.linalg.det(m))


def induced_volume_integral(st: Spacetime, h: ParametrizedHypersurface, f,
                            region: Optional[RegionSpec] = None,
                            refinements: int = 1) -> IntegralResult:
    """Integral of a scalar against the induced Riemannian volume form.

    f maps embedded points (..., d) to scalars (...,); pass f=None for the
    surface area.  Fails loudly with NotSpacelikeError if any quadrature
    node has a non-spacelike tangent space: the induced volume form does
    not exist there, so skipping nodes would silently change the measure.
    """
    if region is None:
        region = RegionSpec.full(h.param_box)

    def density(u):
        w = induced_area_density(st, h, u)
        if f is None:
            return w
        points = h.embed(u)
        return np.asarray(f(points), dtype=float) * w

    return _region_refined(density, region, h.grid_shape, refinements,
                           extra_error=h.truncation)


def _region_refined(density, region: RegionSpec, shape, refinements: int,
                    extra_error: float = 0.0) -> IntegralResult:
    """Richardson-refined midpoint quadrature summed over region rectangles."""
    total = 0.0
    err = 0.0
    neval = 0
    for rect in region.rectangles:
        if refinements < 1:
            nodes, vol = midpoint_nodes(rect, shape)
            total += midpoint_integral(density(nodes), vol)
            neval += int(np.prod(shape))
            continue
        vals = []
        for j in range(refinements + 1):
            s = refine_shape(shape, 2 ** j)
            nodes, vol = midpoint_nodes(rect, s)
            vals.append(midpoint_integral(density(nodes), vol))
            neval += int(np.prod(s))
        v, e = richardson_pair(vals[-2], vals[-1])
        total += v
        err += e
    return IntegralResult(value=total, error_estimate=err + extra_error,
                          refinements=refinements, neval=neval)


# ---------------------------------------------------------------------------
# Built-in surface constructors
# ---------------------------------------------------------------------------

# Polar boxes start at r_min = POLAR_RMIN_FACTOR * r_max: the r = 0
# coordinate degeneracy is a chart artifact, not a geometric one.
POLAR_RMIN_FACTOR = 1e-6


def plane_surface(dim: int, t: float = 0.0, half_width: float = 8.0,
                  grid: int = 24, center=None) -> ParametrizedHypersurface:
    """Constant-time box {t} x [-half_width, half_width]^(dim-1)."""
    k = dim - 1
    c = np.zeros(k) if center is None else np.asarray(center, dtype=float)

    def embed(u):
        u = np.asarray(u, dtype=float)
        out = np.empty(u.shape[:-1] + (dim,))
        out[..., 0] = t
        out[..., 1:] = u + c
        return out

    def jac(u):
        u = np.asarray(u, dtype=float)
        J = np.zeros(u.shape[:-1] + (k, dim))
        for i in range(k):
            J[..., i, 1 + i] = 1.0
        return J

    box = [[-half_width, half_width]] * k
    return ParametrizedHypersurface(embed, box, (grid,) * k, jacobian_fn=jac,
                                    name=f"plane(t={t})")


def disk_surface(t: float = 0.0, r_max: float = 1.0, grid=(32, 64),
                 r_min: Optional[float] = None) -> ParametrizedHypersurface:
    """Polar-parametrized disk in the t = const plane of a 3d chart."""
    if r_min is None:
        r_min = POLAR_RMIN_FACTOR * r_max

    def embed(u):
        u = np.asarray(u, dtype=float)
        r, th = u[..., 0], u[..., 1]
        return np.stack([np.full_like(r, t), r * np.cos(th), r * np.sin(th)], axis=-1)

    def jac(u):
        u = np.asarray(u, dtype=float)
        r, th = u[..., 0], u[..., 1]
        J = np.zeros(u.shape[:-1] + (2, 3))
        J[..., 0, 1] = np.cos(th)
        J[..., 0, 2] = np.sin(th)
        J[..., 1, 1] = -r * np.sin(th)
        J[..., 1, 2] = r * np.cos(th)
        return J

    box = [[r_min, r_max], [0.0, 2.0 * np.pi]]
    return ParametrizedHypersurface(embed, box, tuple(grid), jacobian_fn=jac,
                                    name=f"disk(r={r_max})")


def half_disk_surface(t: float = 0.0, r_max: float = 1.0, grid=(40, 40),
                      r_min: Optional[float] = None) -> ParametrizedHypersurface:
    """Upper half disk (theta in [0, pi]) in the t = const plane of a 3d chart.

    Deliberately not rotation-symmetric: advecting it under a rotation
    makes otherwise-cancelling transport source terms visible.
    """
    if r_min is None:
        r_min = POLAR_RMIN_FACTOR * r_max

    def embed(u):
        u = np.asarray(u, dtype=float)
        r, th = u[..., 0], u[..., 1]
        return np.stack([np.full_like(r, t), r * np.cos(th), r * np.sin(th)], axis=-1)

    box = [[r_min, r_max], [0.0, np.pi]]
    return ParametrizedHypersurface(embed, box, tuple(grid),
                                    name=f"half_disk(r={r_max})")


def square_disk_surface(t: float = 0.0, r_max: float = 1.0,
                        grid=(32, 32)) -> ParametrizedHypersurface:
    """The same disk through the smooth elliptical square-to-disk map.

    x = R u sqrt(1 - v^2/2), y = R v sqrt(1 - u^2/2) on [-1, 1]^2; used to
    check that integrals do not depend on the parametrization.
    """

    def embed(u):
        u = np.asarray(u, dtype=float)
        a, b = u[..., 0], u[..., 1]
        x = r_max * a * np.sqrt(1.0 - 0.5 * b * b)
        y = r_max * b * np.sqrt(1.0 - 0.5 * a * a)
        return np.stack([np.full_like(x, t), x, y], axis=-1)

    box = [[-1.0, 1.0], [-1.0, 1.0]]
    return ParametrizedHypersurface(embed, box, tuple(grid),
                                    name=f"square_disk(r={r_max})")


def graph_surface(dim: int, height_fn, half_width: float = 8.0,
                  grid: int = 24, name: str = "graph") -> ParametrizedHypersurface:
    """Graph t = s(x, ...) over a spatial box; spacelike iff |grad s| < 1."""
    k = dim - 1

    def embed(u):
        u = np.asarray(u, dtype=float)
        out = np.empty(u.shape[:-1] + (dim,))
        out[..., 0] = height_fn(u)
        out[..., 1:] = u
        return out

    box = [[-half_width, half_width]] * k
    return ParametrizedHypersurface(embed, box, (grid,) * k, name=name)
