"""Chart-based Lorentzian metric evaluation and causal classification.

Conventions used throughout the package:

  * signature (+, -, ..., -), one chart per spacetime, coordinate 0 is the
    time coordinate of every built-in chart, velocity of light = 1;
  * points are numpy arrays of shape (..., d) so every operation is
    vectorized over arbitrary leading batch axes;
  * all functions are pure; nothing here holds mutable state, so any
    number of threads may call them concurrently.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional

import numpy as np

from .errors import (
    DifferentiationError,
    NonLorentzianError,
    NotTimelikeError,
    PastDirectedError,
    SingularMetricError,
    ZeroVectorError,
)

# Classification tolerance for g(V, V) in units where c = 1.
EPS_CAUSAL = 1e-9
# |det g| below this raises SingularMetricError.
EPS_DET = 1e-12
# Scale-aware central-difference step: h = FD_SCALE * (1 + |coordinate|).
FD_SCALE = 1e-5
# Agreement tolerance between finite-difference and analytic derivatives.
TOL_FD = 1e-6


class CausalCharacter(Enum):
    SPACELIKE = "spacelike"
    TIMELIKE = "timelike"
    LIGHTLIKE = "lightlike"
    DEGENERATE = "degenerate"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Spacetime:
    """A single-chart Lorentzian spacetime.

    metric_fn maps points of shape (..., dim) to symmetric matrices of
    shape (..., dim, dim) with signature (+, -, ..., -).  domain_fn, when
    given, returns a boolean mask of points inside the chart domain;
    flows and finite differences refuse to leave it.
    """

    dim: int
    metric_fn: Callable[[np.ndarray], np.ndarray]
    name: str = ""
    domain_fn: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def point(self, *coords: float) -> np.ndarray:
        if len(coords) != self.dim:
            raise ValueError(f"expected {self.dim} coordinates, got {len(coords)}")
        return np.asarray(coords, dtype=float)

    def contains(self, points: np.ndarray) -> np.ndarray:
        if self.domain_fn is None:
            return np.ones(np.shape(points)[:-1], dtype=bool)
        return np.asarray(self.domain_fn(np.asarray(points, dtype=float)))


@dataclass(frozen=True)
class SpacetimeVectorField:
    """Contravariant vector field on a chart.

    value_fn maps (..., d) points to (..., d) components.  divergence_fn
    and flow_fn are optional analytic shortcuts; when absent, callers fall
    back to finite differences and RK4 integration respectively.
    flow_fn(tau, points) must satisfy flow_fn(0, p) = p.
    """

    value_fn: Callable[[np.ndarray], np.ndarray]
    divergence_fn: Optional[Callable[[np.ndarray], np.ndarray]] = None
    flow_fn: Optional[Callable[[float, np.ndarray], np.ndarray]] = None
    name: str = ""

    def __call__(self, points: np.ndarray) -> np.ndarray:
        return np.asarray(self.value_fn(np.asarray(points, dtype=float)), dtype=float)


def constant_field(components, name: str = "") -> SpacetimeVectorField:
    """Vector field with the same components everywhere; analytic flow is a translation."""
    comp = np.asarray(components, dtype=float)

    def value(points):
        return np.broadcast_to(comp, np.shape(points)).copy()

    def flow(tau, points):
        return np.asarray(points, dtype=float) + tau * comp

    def div(points):
        return np.zeros(np.shape(points)[:-1])

    return SpacetimeVectorField(value, divergence_fn=div, flow_fn=flow, name=name)


# ---------------------------------------------------------------------------
# Built-in charts
# ---------------------------------------------------------------------------

def minkowski(dim: int = 4) -> Spacetime:
    """Flat spacetime diag(1, -1, ..., -1) in dimension 3 or 4."""
    if dim not in (3, 4):
        raise ValueError("supported chart dimensions are 3 and 4")
    eta = np.diag([1.0] + [-1.0] * (dim - 1))

    def metric(points):
        return np.broadcast_to(eta, np.shape(points)[:-1] + (dim, dim)).copy()

    return Spacetime(dim=dim, metric_fn=metric, name=f"minkowski{dim}d")


def conformal_test_metric(dim: int = 4, amplitude: float = 0.1) -> Spacetime:
    """Curved test chart Omega^2(p) * diag(1, -1, ..., -1), Omega = 1 + amplitude*sin(x^1).

    Lorentzian for |amplitude| < 1; used to exercise every code path on a
    genuinely position-dependent metric.
    """
    if dim not in (3, 4):
        raise ValueError("supported chart dimensions are 3 and 4")
    if not abs(amplitude) < 1.0:
        raise ValueError("|amplitude| must be < 1 to keep the metric Lorentzian")
    eta = np.diag([1.0] + [-1.0] * (dim - 1))

    def metric(points):
        points = np.asarray(points, dtype=float)
        omega = 1.0 + amplitude * np.sin(points[..., 1])
        return omega[..., None, None] ** 2 * eta

    return Spacetime(dim=dim, metric_fn=metric, name=f"conformal{dim}d")


# ---------------------------------------------------------------------------
# Metric evaluation
# ---------------------------------------------------------------------------

def metric_at(st: Spacetime, points: np.ndarray) -> np.ndarray:
    """Validated metric components g_{mu nu} at one point or a batch.

    Checks symmetry, |det g| >= EPS_DET and the (+, -, ..., -) eigenvalue
    signs; raises SingularMetricError / NonLorentzianError otherwise.
    """
    points = np.asarray(points, dtype=float)
    if points.shape[-1] != st.dim:
        raise ValueError(f"points must have {st.dim} coordinates")
    g = np.asarray(st.metric_fn(points), dtype=float)
    if g.shape != points.shape[:-1] + (st.dim, st.dim):
        raise ValueError("metric_fn returned wrong shape")
    if not np.allclose(g, np.swapaxes(g, -1, -2), rtol=1e-12, atol=1e-12):
        raise NonLorentzianError(f"metric not symmetric on chart '{st.name}'")
    det = np.linalg.det(g)
    if np.any(np.abs(det) < EPS_DET):
        raise SingularMetricError(f"|det g| < {EPS_DET} on chart '{st.name}'")
    eig = np.linalg.eigvalsh(g)
    n_pos = np.sum(eig > 0.0, axis=-1)
    if np.any(n_pos != 1):
        raise NonLorentzianError(
            f"metric on chart '{st.name}' does not have exactly one positive eigenvalue"
        )
    return g


def _metric_raw(st: Spacetime, points: np.ndarray) -> np.ndarray:
    """Metric without the eigenvalue audit (hot path); det is still checked."""
    g = np.asarray(st.metric_fn(np.asarray(points, dtype=float)), dtype=float)
    det = np.linalg.det(g)
    if np.any(np.abs(det) < EPS_DET):
        raise SingularMetricError(f"|det g| < {EPS_DET} on chart '{st.name}'")
    return g


def sqrt_abs_det(st: Spacetime, points: np.ndarray) -> np.ndarray:
    """Volume-form density sqrt|det g| at points, shape (...,)."""
    g = _metric_raw(st, points)
    return np.sqrt(np.abs(np.linalg.det(g)))


def inner(st: Spacetime, points: np.ndarray, V: np.ndarray, W: np.ndarray) -> np.ndarray:
    """Lorentzian inner product g_{mu nu} V^mu W^nu at points."""
    V = np.asarray(V, dtype=float)
    W = np.asarray(W, dtype=float)
    if V.shape[-1] != st.dim or W.shape[-1] != st.dim:
        raise ValueError(f"vectors must have {st.dim} components")
    g = _metric_raw(st, points)
    return np.einsum("...uv,...u,...v->...", g, V, W)


# ---------------------------------------------------------------------------
# Finite differences
# ---------------------------------------------------------------------------

def _fd_steps(points: np.ndarray) -> np.ndarray:
    return FD_SCALE * (1.0 + np.abs(points))


def _check_domain(st: Spacetime, points: np.ndarray) -> None:
    if st.domain_fn is not None and not np.all(st.contains(points)):
        raise DifferentiationError(
            f"finite-difference stencil leaves the domain of chart '{st.name}'"
        )


def partial_scalar(st: Spacetime, f, points: np.ndarray) -> np.ndarray:
    """Central-difference partials d_mu f, shape (..., d)."""
    points = np.asarray(points, dtype=float)
    h = _fd_steps(points)
    d = st.dim
    eye = np.eye(d)
    # offsets stacked on a new leading axis: 2*d evaluations in one call
    plus = points[None, ...] + h[None, ...] * eye.reshape(d, *([1] * (points.ndim - 1)), d)
    minus = points[None, ...] - h[None, ...] * eye.reshape(d, *([1] * (points.ndim - 1)), d)
    stencil = np.concatenate([plus, minus], axis=0)
    _check_domain(st, stencil)
    vals = np.asarray(f(stencil), dtype=float)
    diffs = (vals[:d] - vals[d:]) / (2.0 * np.moveaxis(h, -1, 0))
    return np.moveaxis(diffs, 0, -1)


def gradient_field(st: Spacetime, f) -> SpacetimeVectorField:
    """Contravariant gradient (grad f)^mu = g^{mu nu} d_nu f as a vector field.

    f must accept batched points (..., d) and return scalars (...,).
    Derivatives are central differences with scale-aware steps.
    """

    def value(points):
        df = partial_scalar(st, f, points)
        g = _metric_raw(st, points)
        return np.linalg.solve(g, df[..., None])[..., 0]

    return SpacetimeVectorField(value, name="grad")


def normalize_timelike(st: Spacetime, points: np.ndarray, V: np.ndarray) -> np.ndarray:
    """Rescale a future-directed timelike V to unit Lorentzian norm.

    Raises NotTimelikeError if g(V, V) <= EPS_CAUSAL and PastDirectedError
    if any time component is non-positive (chart convention: coordinate 0
    is timelike and future means increasing coordinate 0).
    """
    V = np.asarray(V, dtype=float)
    q = inner(st, points, V, V)
    if np.any(q <= EPS_CAUSAL):
        raise NotTimelikeError("g(V, V) <= tolerance; cannot normalize")
    if np.any(V[..., 0] <= 0.0):
        raise PastDirectedError("time component must be positive in built-in charts")
    return V / np.sqrt(q)[..., None]


def divergence(st: Spacetime, F: SpacetimeVectorField, points: np.ndarray) -> np.ndarray:
    """div F = (1/sqrt|g|) d_mu (sqrt|g| F^mu).

    Uses F.divergence_fn when present, else central finite differences of
    the densitized components.
    """
    points = np.asarray(points, dtype=float)
    if F.divergence_fn is not None:
        return np.asarray(F.divergence_fn(points), dtype=float)
    return finite_difference_divergence(st, F, points)


def finite_difference_divergence(st: Spacetime, F, points: np.ndarray) -> np.ndarray:
    """Finite-difference divergence; independent of any analytic shortcut."""
    points = np.asarray(points, dtype=float)
    h = _fd_steps(points)
    d = st.dim
    eye = np.eye(d)
    plus = points[None, ...] + h[None, ...] * eye.reshape(d, *([1] * (points.ndim - 1)), d)
    minus = points[None, ...] - h[None, ...] * eye.reshape(d, *([1] * (points.ndim - 1)), d)
    stencil = np.concatenate([plus, minus], axis=0)
    _check_domain(st, stencil)
    dens = sqrt_abs_det(st, stencil)[..., None] * np.asarray(F(stencil), dtype=float)
    hmove = np.moveaxis(h, -1, 0)
    total = np.zeros(points.shape[:-1])
    for mu in range(d):
        total = total + (dens[mu, ..., mu] - dens[d + mu, ..., mu]) / (2.0 * hmove[mu])
    return total / sqrt_abs_det(st, points)


def causal_class(st: Spacetime, points: np.ndarray, V: np.ndarray,
                 tol: float = EPS_CAUSAL) -> CausalCharacter:
    """Classify a single vector as spacelike, timelike or lightlike."""
    V = np.asarray(V, dtype=float)
    if V.ndim != 1:
        raise ValueError("causal_class classifies one vector; use causal_class_batch")
    if np.all(V == 0.0):
        raise ZeroVectorError("cannot classify the zero vector")
    q = float(inner(st, points, V, V))
    if q > tol:
        return CausalCharacter.TIMELIKE
    if q < -tol:
        return CausalCharacter.SPACELIKE
    return CausalCharacter.LIGHTLIKE


def causal_class_batch(st: Spacetime, points: np.ndarray, V: np.ndarray,
                       tol: float = EPS_CAUSAL) -> np.ndarray:
    """Vectorized vector classification; returns an object array of CausalCharacter."""
    V = np.asarray(V, dtype=float)
    if np.any(np.all(V == 0.0, axis=-1)):
        raise ZeroVectorError("cannot classify the zero vector")
    q = inner(st, points, V, V)
    out = np.empty(q.shape, dtype=object)
    out[...] = CausalCharacter.LIGHTLIKE
    out[q > tol] = CausalCharacter.TIMELIKE
    out[q < -tol] = CausalCharacter.SPACELIKE
    return out
