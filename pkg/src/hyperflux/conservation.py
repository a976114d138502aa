"""Numerical verification of the two probability-conservation mechanisms.

Mechanism one is the divergence theorem on a flow cylinder: two spacelike
caps joined by a lateral tube tangent to the current, with vanishing
divergence forcing equal cap integrals.  Mechanism two is the transport
theorem along an advected surface,

    d/dtau  integral_{Sigma_tau} rho X . mu
        =  integral_{Sigma_tau} div(rho X)  X . mu ,

which holds with no causality assumption on the evolving surface and, for
div(rho X) = 0, conserves the total through and beyond loss of
spacelikeness.
"""

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .born import ContractedCurrentForm, contracted_form_eval, normal_flux_integral
from .currents import CurrentSpec
from .flows import FlowMap, evolve_surface
from .geometry import (
    FD_SCALE,
    Spacetime,
    SpacetimeVectorField,
    finite_difference_divergence,
)
from .quadrature import midpoint_nodes, refine_shape, richardson_pair
from .surfaces import ParametrizedHypersurface


@dataclass(frozen=True)
class ConservationReport:
    """Totals P(tau) along a flow, with drift and optional transport residuals."""

    tau_grid: np.ndarray
    totals: np.ndarray
    error_estimates: np.ndarray
    drifts: np.ndarray
    max_drift: float
    derivative_lhs: Optional[np.ndarray] = None
    source_rhs: Optional[np.ndarray] = None
    derivative_residuals: Optional[np.ndarray] = None
    max_residual: Optional[float] = None


@dataclass(frozen=True)
class FlowCylinder:
    """Region swept by a surface between two flow parameters.

    The lateral tube is the flow image of the surface boundary, hence
    tangent to the flow field by construction.
    """

    base: ParametrizedHypersurface
    flow: FlowMap
    tau0: float
    tau1: float
    n_tau: int = 16


@dataclass(frozen=True)
class DivergenceTheoremReport:
    cap_lo: float
    cap_hi: float
    cap_lo_error: float
    cap_hi_error: float
    cap_difference: float
    tube_fluxes: tuple          # signed flux per lateral face
    tube_flux_max: float        # max |face flux|
    tube_flux_sum: float        # orientation-signed sum over lateral faces
    born_cap_lo: float
    born_cap_hi: float
    closure_residual: float     # |born cap difference + signed tube sum|


# ---------------------------------------------------------------------------
# Shared advected-quadrature machinery
# ---------------------------------------------------------------------------

def _frame_stencil(h: ParametrizedHypersurface, u: np.ndarray):
    """Embedded center points plus FD-offset points for tangent frames.

    Returns (stencil_points, steps) with stencil shape (2k+1,) + s + (d,):
    slot 0 the centers, slots 1..k forward offsets, k+1..2k backward.
    """
    u = np.asarray(u, dtype=float)
    k = u.shape[-1]
    steps = FD_SCALE * (1.0 + np.abs(u))
    eye = np.eye(k)
    offs = eye.reshape(k, *([1] * (u.ndim - 1)), k)
    plus = u[None, ...] + steps[None, ...] * offs
    minus = u[None, ...] - steps[None, ...] * offs
    stencil_u = np.concatenate([u[None, ...], plus, minus], axis=0)
    return h.embed(stencil_u), steps


def _frames_from_stencil(stencil: np.ndarray, steps: np.ndarray):
    """Points and tangent frames recovered from an advected FD stencil."""
    k = (stencil.shape[0] - 1) // 2
    points = stencil[0]
    diffs = (stencil[1:1 + k] - stencil[1 + k:]) / (
        2.0 * np.moveaxis(steps, -1, 0)[..., None])
    return points, np.moveaxis(diffs, 0, -2)


def _advected_totals(st, J, h, flow, tau_grid, shape, weight_fn=None):
    """Oriented flux totals of J through the advected surface at each tau.

    The whole FD stencil is advected in one incremental pass, so an RK4
    flow integrates each trajectory exactly once for the full sweep.
    weight_fn(points), when given, multiplies the integrand (transport
    source terms use it).
    """
    nodes, vol = midpoint_nodes(h.param_box, shape)
    stencil0, steps = _frame_stencil(h, nodes)
    cf = ContractedCurrentForm(st, J)
    totals = []
    for snap in flow.snapshots(stencil0, tau_grid):
        points, basis = _frames_from_stencil(snap, steps)
        w = h.orientation * contracted_form_eval(cf, points, basis)
        if weight_fn is not None:
            w = w * weight_fn(points)
        totals.append(float(np.sum(w)) * vol)
    return np.asarray(totals)


def _refined_totals(st, J, h, flow, tau_grid, refinements, weight_fn=None):
    """Richardson-extrapolated advected totals and per-tau error estimates."""
    ladder = [
        _advected_totals(st, J, h, flow, tau_grid, refine_shape(h.grid_shape, 2 ** j),
                         weight_fn=weight_fn)
        for j in range(max(1, refinements) + 1)
    ]
    coarse, fine = ladder[-2], ladder[-1]
    values = fine + (fine - coarse) / 3.0
    errors = np.abs(fine - coarse) / 3.0 + h.truncation
    return values, errors


def conservation_sweep(st: Spacetime, current: CurrentSpec,
                       h: ParametrizedHypersurface,
                       tau_grid: Sequence[float],
                       flow: Optional[FlowMap] = None,
                       refinements: int = 1) -> ConservationReport:
    """Track the total probability while the surface is advected.

    The surface moves along current.X (or a supplied flow, e.g. a rescaled
    velocity); the monitored flux is always that of current.J.  For a
    divergence-free current the totals are constant up to quadrature and
    truncation error, whatever the causal character of the evolved
    surfaces.
    """
    taus = np.asarray(list(tau_grid), dtype=float)
    if flow is None:
        flow = FlowMap(current.X, spacetime=st)
    totals, errors = _refined_totals(st, current.J, h, flow, taus, refinements)
    sign = 1.0 if totals[0] >= 0.0 else -1.0
    totals = sign * totals
    drifts = np.abs(totals - totals[0])
    return ConservationReport(
        tau_grid=taus,
        totals=totals,
        error_estimates=errors,
        drifts=drifts,
        max_drift=float(np.max(drifts)),
    )


def three_point_derivative(ts: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Second-order derivative of sampled data: central interior, one-sided ends."""
    ts = np.asarray(ts, dtype=float)
    ys = np.asarray(ys, dtype=float)
    n = len(ts)
    if n < 3:
        raise ValueError("need at least three samples")
    out = np.empty(n)
    for i in range(n):
        j = min(max(i - 1, 0), n - 3)
        t0, t1, t2 = ts[j], ts[j + 1], ts[j + 2]
        y0, y1, y2 = ys[j], ys[j + 1], ys[j + 2]
        t = ts[i]
        out[i] = (y0 * (2 * t - t1 - t2) / ((t0 - t1) * (t0 - t2))
                  + y1 * (2 * t - t0 - t2) / ((t1 - t0) * (t1 - t2))
                  + y2 * (2 * t - t0 - t1) / ((t2 - t0) * (t2 - t1)))
    return out


def reynolds_check(st: Spacetime, current: CurrentSpec,
                   h: ParametrizedHypersurface,
                   tau_grid: Sequence[float],
                   flow: Optional[FlowMap] = None,
                   refinements: int = 1) -> ConservationReport:
    """Transport-theorem residuals along the advected surface.

    Left side: finite-difference tau-derivative of the advected totals of
    rho X.  Right side: the source integral of div(rho X) against the
    contracted velocity form on the same surfaces.  Divergence-freeness is
    not assumed; the check is of the inhomogeneous identity.
    """
    taus = np.asarray(list(tau_grid), dtype=float)
    if flow is None:
        flow = FlowMap(current.X, spacetime=st)
    totals, errors = _refined_totals(st, current.J, h, flow, taus, refinements)

    if current.J.divergence_fn is not None:
        def source_weight(points):
            return current.J.divergence_fn(points)
    else:
        def source_weight(points):
            return finite_difference_divergence(st, current.J, points)

    rhs, rhs_err = _refined_totals(st, current.X, h, flow, taus, refinements,
                                   weight_fn=source_weight)
    lhs = three_point_derivative(taus, totals)
    residuals = np.abs(lhs - rhs)
    drifts = np.abs(totals - totals[0])
    return ConservationReport(
        tau_grid=taus,
        totals=totals,
        error_estimates=errors + rhs_err,
        drifts=drifts,
        max_drift=float(np.max(drifts)),
        derivative_lhs=lhs,
        source_rhs=rhs,
        derivative_residuals=residuals,
        max_residual=float(np.max(residuals)),
    )


# ---------------------------------------------------------------------------
# Divergence theorem on a flow cylinder
# ---------------------------------------------------------------------------

def _cap_flux(st, J, surface, refinements: int = 1) -> float:
    """Oriented contracted-form flux through a cap, no sign fixing."""
    vals = []
    cf = ContractedCurrentForm(st, J)
    from .surfaces import frames_at
    for j in range(max(1, refinements) + 1):
        shape = refine_shape(surface.grid_shape, 2 ** j)
        nodes, vol = midpoint_nodes(surface.param_box, shape)
        points, basis = frames_at(surface, nodes, check_immersion=False)
        w = surface.orientation * contracted_form_eval(cf, points, basis)
        vals.append(float(np.sum(w)) * vol)
    value, _ = richardson_pair(vals[-2], vals[-1])
    return value


def _tube_face_flux(st, J, cyl: FlowCylinder, axis: int, end: int,
                    scale: int = 1) -> float:
    """Signed flux through one lateral tube face.

    The face is parametrized by (tau, remaining box parameters); its
    tau-tangent is the flow field itself, so tangency of the tube to the
    flow is exact rather than finite-differenced.  Edge tangents are
    pushed forward by differencing the advected stencil.
    """
    base = cyl.base
    box = base.param_box
    k = base.codim_params
    other_axes = [a for a in range(k) if a != axis]

    tau_n = cyl.n_tau * scale
    tau_step = (cyl.tau1 - cyl.tau0) / tau_n
    tau_nodes = cyl.tau0 + (np.arange(tau_n) + 0.5) * tau_step

    if other_axes:
        edge_box = [list(box[a]) for a in other_axes]
        edge_shape = tuple(base.grid_shape[a] * scale for a in other_axes)
        s_nodes, s_vol = midpoint_nodes(edge_box, edge_shape)
    else:
        s_nodes, s_vol = np.zeros((1, 0)), 1.0

    u = np.empty(s_nodes.shape[:-1] + (k,))
    u[..., axis] = box[axis, end]
    for slot, a in enumerate(other_axes):
        u[..., a] = s_nodes[..., slot]

    # FD stencil only in the edge parameters; tau stays shared per snapshot.
    m = len(other_axes)
    steps = FD_SCALE * (1.0 + np.abs(s_nodes)) if m else None
    pieces = [base.embed(u)[None, ...]]
    for i in range(m):
        du = np.zeros_like(u)
        du[..., other_axes[i]] = steps[..., i]
        pieces.append(base.embed(u + du)[None, ...])
    for i in range(m):
        du = np.zeros_like(u)
        du[..., other_axes[i]] = steps[..., i]
        pieces.append(base.embed(u - du)[None, ...])
    stencil0 = np.concatenate(pieces, axis=0)

    cf = ContractedCurrentForm(st, J)
    field = cyl.flow.field
    total = 0.0
    for snap in cyl.flow.snapshots(stencil0, tau_nodes):
        points = snap[0]
        frame = np.empty(points.shape[:-1] + (m + 1, points.shape[-1]))
        frame[..., 0, :] = field(points)
        for i in range(m):
            frame[..., 1 + i, :] = (snap[1 + i] - snap[1 + m + i]) / (
                2.0 * steps[..., i:i + 1])
        w = base.orientation * contracted_form_eval(cf, points, frame)
        total += float(np.sum(w)) * s_vol * tau_step
    endsign = 1.0 if end == 1 else -1.0
    return endsign * ((-1.0) ** (axis + 1)) * total


def _tube_face_flux_refined(st, J, cyl, axis, end, refinements: int = 1) -> float:
    vals = [_tube_face_flux(st, J, cyl, axis, end, scale=2 ** j)
            for j in range(max(1, refinements) + 1)]
    value, _ = richardson_pair(vals[-2], vals[-1])
    return value


def divergence_theorem_check(st: Spacetime, J: SpacetimeVectorField,
                             cyl: FlowCylinder,
                             refinements: int = 1) -> DivergenceTheoremReport:
    """Compare cap integrals and lateral flux on a flow cylinder.

    Caps are evaluated by the normal-density route (both must be
    spacelike).  As a cross-check, caps are also evaluated by the
    contracted-form route and combined with the signed lateral fluxes into
    a boundary-closure residual, which vanishes for divergence-free J up
    to quadrature error.
    """
    cap_lo_surf = evolve_surface(cyl.flow, cyl.base, cyl.tau0)
    cap_hi_surf = evolve_surface(cyl.flow, cyl.base, cyl.tau1)
    cap_lo = normal_flux_integral(st, J, cap_lo_surf, refinements=refinements)
    cap_hi = normal_flux_integral(st, J, cap_hi_surf, refinements=refinements)

    born_lo = _cap_flux(st, J, cap_lo_surf, refinements)
    born_hi = _cap_flux(st, J, cap_hi_surf, refinements)

    tube = []
    for axis in range(cyl.base.codim_params):
        for end in (0, 1):
            tube.append(_tube_face_flux_refined(st, J, cyl, axis, end, refinements))
    tube = tuple(tube)
    tube_sum = float(np.sum(tube)) if tube else 0.0
    closure = abs((born_hi - born_lo) + tube_sum)
    return DivergenceTheoremReport(
        cap_lo=cap_lo.value,
        cap_hi=cap_hi.value,
        cap_lo_error=cap_lo.error_estimate,
        cap_hi_error=cap_hi.error_estimate,
        cap_difference=abs(cap_hi.value - cap_lo.value),
        tube_fluxes=tube,
        tube_flux_max=float(np.max(np.abs(tube))) if tube else 0.0,
        tube_flux_sum=tube_sum,
        born_cap_lo=born_lo,
        born_cap_hi=born_hi,
        closure_residual=closure,
    )
