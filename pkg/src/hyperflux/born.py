"""Probability of finding the particle in a region of a hypersurface.

The probability functional integrates the contraction of the current into
the metric volume form, pulled back to the surface.  In chart components
the integrand at a parameter point u is

    sqrt|det g| * det[ J | d_1 phi | ... | d_{d-1} phi ]

which needs no causality assumption on the surface: it stays well-defined
where the induced Riemannian volume (the spacelike-only route) degenerates.
On spacelike patches the two routes agree pointwise, and
verify_spacelike_identity measures that agreement.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .geometry import Spacetime, SpacetimeVectorField, _metric_raw, sqrt_abs_det
from .quadrature import IntegralResult, RegionSpec, midpoint_nodes
from .surfaces import (
    ParametrizedHypersurface,
    _region_refined,
    frames_at,
    future_unit_normal,
    induced_area_density,
)

# Tangency threshold is relative to the local scale
# sqrt|det g| * |J| * prod |d_i phi|.
EPS_TANGENCY = 1e-10


@dataclass(frozen=True)
class ContractedCurrentForm:
    """The current contracted into the metric volume form.

    Evaluation on (d-1) vectors is alternating and multilinear; feeding it
    a surface's tangent frame gives the probability integrand.
    """

    st: Spacetime
    J: SpacetimeVectorField

    def __call__(self, points: np.ndarray, frame: np.ndarray) -> np.ndarray:
        return contracted_form_eval(self, points, frame)


def contracted_form_eval(cf: ContractedCurrentForm, points: np.ndarray,
                         frame: np.ndarray) -> np.ndarray:
    """sqrt|det g| * det[J | V_1 | ... | V_{d-1}] at points.

    frame has shape (..., d-1, d) with rows V_i; the sign convention is the
    chart orientation (coordinate order).
    """
    points = np.asarray(points, dtype=float)
    frame = np.asarray(frame, dtype=float)
    d = cf.st.dim
    jvals = cf.J(points)
    mat = np.empty(points.shape[:-1] + (d, d))
    mat[..., :, 0] = jvals
    mat[..., :, 1:] = np.swapaxes(frame, -1, -2)
    return sqrt_abs_det(cf.st, points) * np.linalg.det(mat)


def flux_density_at(st: Spacetime, J: SpacetimeVectorField,
                    h: ParametrizedHypersurface, u: np.ndarray,
                    check_immersion: bool = True) -> np.ndarray:
    """Oriented integrand of the probability functional at parameter nodes.

    Includes the surface's orientation flag but no automatic sign fixing.
    """
    points, basis = frames_at(h, u, check_immersion=check_immersion)
    cf = ContractedCurrentForm(st, J)
    return h.orientation * contracted_form_eval(cf, points, basis)


def orientation_sign(st: Spacetime, J: SpacetimeVectorField,
                     h: ParametrizedHypersurface) -> int:
    """Sign making the integrand non-negative on a current-transversal surface.

    Anchor convention: evaluate the oriented integrand on the surface's own
    base grid and take the sign at the node of largest magnitude.  For a
    surface nowhere tangent to J the integrand has one sign, so any anchor
    gives the same answer; the max-magnitude node makes the choice robust.
    """
    nodes, _ = midpoint_nodes(h.param_box, h.grid_shape)
    w = flux_density_at(st, J, h, nodes, check_immersion=False)
    idx = np.unravel_index(np.argmax(np.abs(w)), w.shape)
    s = np.sign(w[idx])
    return int(s) if s != 0 else 1


def born_probability(st: Spacetime, J: SpacetimeVectorField,
                     h: ParametrizedHypersurface,
                     region: Optional[RegionSpec] = None,
                     refinements: int = 1) -> IntegralResult:
    """Probability assigned to a parameter region of the surface.

    No causality assumption: the integrand is the pulled-back contracted
    current form.  The overall sign is fixed once per surface by
    orientation_sign, so transversal surfaces report non-negative
    probabilities regardless of parameter ordering.
    """
    if region is None:
        region = RegionSpec.full(h.param_box)
    sign = orientation_sign(st, J, h)

    def density(u):
        return sign * flux_density_at(st, J, h, u, check_immersion=False)

    return _region_refined(density, region, h.grid_shape, refinements,
                           extra_error=h.truncation)


def mc_born_probability(st: Spacetime, J: SpacetimeVectorField,
                        h: ParametrizedHypersurface,
                        region: Optional[RegionSpec] = None,
                        n_samples: int = 100_000,
                        rng: Optional[np.random.Generator] = None):
    """Monte-Carlo estimate of born_probability with its standard error.

    Uniform stratified sampling over the region rectangles, sharing the
    orientation convention with the quadrature path but none of its nodes;
    this is the independent cross-check.
    """
    if region is None:
        region = RegionSpec.full(h.param_box)
    rng = rng or np.random.default_rng(0)
    sign = orientation_sign(st, J, h)
    vols = np.array([float(np.prod(r[:, 1] - r[:, 0])) for r in region.rectangles])
    total_vol = float(np.sum(vols))
    value = 0.0
    variance = 0.0
    for rect, vol in zip(region.rectangles, vols):
        n = max(2, int(round(n_samples * vol / total_vol)))
        u = rng.uniform(rect[:, 0], rect[:, 1], size=(n, len(rect)))
        w = sign * flux_density_at(st, J, h, u, check_immersion=False)
        value += vol * float(np.mean(w))
        variance += vol ** 2 * float(np.var(w, ddof=1)) / n
    return value, float(np.sqrt(variance))


# ---------------------------------------------------------------------------
# Spacelike-case identity and positivity diagnostics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SpacelikeIdentityReport:
    """Agreement between the normal-density route and the contracted-form route."""

    lhs: float                 # integral of g(J, n) against the induced volume
    rhs: float                 # integral of the pulled-back contracted form
    abs_diff: float
    rel_diff: float
    max_pointwise_rel: float   # worst relative integrand mismatch on the grid
    nodes: int

    @property
    def ok(self) -> bool:
        return self.rel_diff < 1e-8


def verify_spacelike_identity(st: Spacetime, J: SpacetimeVectorField,
                              h: ParametrizedHypersurface,
                              region: Optional[RegionSpec] = None,
                              refinements: int = 1,
                              pointwise_floor: float = 1e-12) -> SpacelikeIdentityReport:
    """Compare the two probability-density routes on a spacelike surface.

    LHS: g(J, n) integrated against the induced Riemannian volume, with the
    future unit normal built by Gram-Schmidt against the tangent frame.
    RHS: the contracted-form route of born_probability.  Both sides run on
    identical quadrature nodes, so the difference measures the pointwise
    identity rather than quadrature error.  Raises NotSpacelikeError if the
    surface is not spacelike on the region.
    """
    if region is None:
        region = RegionSpec.full(h.param_box)
    sign = orientation_sign(st, J, h)
    cf = ContractedCurrentForm(st, J)

    state = {"max_rel": 0.0, "nodes": 0}

    def lhs_density(u):
        points, basis = frames_at(h, u)
        area = induced_area_density(st, h, u)
        n = future_unit_normal(st, points, basis)
        g = _metric_raw(st, points)
        vals = np.einsum("...uv,...u,...v->...", g, cf.J(points), n) * area
        rhs_vals = sign * h.orientation * contracted_form_eval(cf, points, basis)
        mask = np.abs(vals) > pointwise_floor
        if np.any(mask):
            rel = np.abs(vals - rhs_vals)[mask] / np.abs(vals)[mask]
            state["max_rel"] = max(state["max_rel"], float(np.max(rel)))
        state["nodes"] += int(np.prod(vals.shape))
        return vals

    lhs = _region_refined(lhs_density, region, h.grid_shape, refinements,
                          extra_error=h.truncation)
    rhs = born_probability(st, J, h, region=region, refinements=refinements)
    abs_diff = abs(lhs.value - rhs.value)
    scale = max(abs(lhs.value), abs(rhs.value), 1e-300)
    return SpacelikeIdentityReport(
        lhs=lhs.value,
        rhs=rhs.value,
        abs_diff=abs_diff,
        rel_diff=abs_diff / scale,
        max_pointwise_rel=state["max_rel"],
        nodes=state["nodes"],
    )


def normal_flux_integral(st: Spacetime, J: SpacetimeVectorField,
                         h: ParametrizedHypersurface,
                         region: Optional[RegionSpec] = None,
                         refinements: int = 1) -> IntegralResult:
    """Integral of g(J, n) against the induced Riemannian volume.

    The spacelike-only route: raises NotSpacelikeError wherever the future
    unit normal does not exist.
    """
    if region is None:
        region = RegionSpec.full(h.param_box)

    def density(u):
        points, basis = frames_at(h, u)
        area = induced_area_density(st, h, u)
        n = future_unit_normal(st, points, basis)
        g = _metric_raw(st, points)
        return np.einsum("...uv,...u,...v->...", g, J(points), n) * area

    return _region_refined(density, region, h.grid_shape, refinements,
                           extra_error=h.truncation)


@dataclass(frozen=True)
class PositivityReport:
    """Diagnostic flags for tangency and sign of the oriented integrand."""

    n_nodes: int
    tangent_nodes: tuple       # flat node indices where |integrand| < tangency scale
    negative_nodes: tuple      # flat node indices with negative oriented integrand
    min_value: float
    max_value: float

    @property
    def transversal(self) -> bool:
        return len(self.tangent_nodes) == 0

    @property
    def nonnegative(self) -> bool:
        return len(self.negative_nodes) == 0


def positivity_check(st: Spacetime, J: SpacetimeVectorField,
                     h: ParametrizedHypersurface,
                     u_nodes: Optional[np.ndarray] = None) -> PositivityReport:
    """Flag nodes where the surface is tangent to J or the integrand negative.

    Uses the surface's own orientation flag (no automatic sign fixing), so
    flipping the orientation flips every sign; tangency detection uses the
    dimensionally consistent scale sqrt|det g| * |J| * prod|d_i phi|.
    """
    if u_nodes is None:
        u_nodes, _ = midpoint_nodes(h.param_box, h.grid_shape)
    u_flat = np.asarray(u_nodes, dtype=float).reshape(-1, h.codim_params)
    points, basis = frames_at(h, u_flat, check_immersion=False)
    cf = ContractedCurrentForm(st, J)
    w = h.orientation * contracted_form_eval(cf, points, basis)
    scale = sqrt_abs_det(st, points) * np.linalg.norm(cf.J(points), axis=-1)
    scale = scale * np.prod(np.linalg.norm(basis, axis=-1), axis=-1)
    tangent = np.nonzero(np.abs(w) < EPS_TANGENCY * scale)[0]
    negative = np.nonzero(w < 0.0)[0]
    return PositivityReport(
        n_nodes=len(u_flat),
        tangent_nodes=tuple(int(i) for i in tangent),
        negative_nodes=tuple(int(i) for i in negative),
        min_value=float(np.min(w)),
        max_value=float(np.max(w)),
    )
