"""Flows of timelike vector fields acting on points and hypersurfaces.

Includes detection of causal-character transitions along the flow: the
machinery needed to watch an initially spacelike surface bend into the
light cone under proper-time evolution.
"""

from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from .errors import LeftChartDomainError, RootBracketError, StepSizeError
from .geometry import (
    FD_SCALE,
    CausalCharacter,
    Spacetime,
    SpacetimeVectorField,
    inner,
)
from .surfaces import ParametrizedHypersurface, surface_causal_class_batch

# Default RK4 step is scale-aware: step = RK4_STEP_SCALE * (1 + |tau_max|).
RK4_STEP_SCALE = 1e-3
# Bisection tolerance on the flow parameter for crossing detection.
TOL_ROOT = 1e-6
# Uniform bracketing samples before bisection.
N_BRACKET = 256


@dataclass(frozen=True)
class FlowMap:
    """One-parameter flow of a vector field.

    Uses the field's analytic flow_fn when present (and analytic=True),
    otherwise classical fixed-step RK4.  self_check=True compares each RK4
    step against two half-steps and raises StepSizeError when the
    discrepancy exceeds self_check_tol.
    """

    field: SpacetimeVectorField
    spacetime: Optional[Spacetime] = None
    analytic: bool = True
    step: Optional[float] = None
    self_check: bool = False
    self_check_tol: float = 1e-6

    @property
    def has_analytic(self) -> bool:
        return self.analytic and self.field.flow_fn is not None

    def step_for(self, tau_span: float) -> float:
        if self.step is not None:
            return float(self.step)
        return RK4_STEP_SCALE * (1.0 + abs(tau_span))

    def point(self, p: np.ndarray, tau: float) -> np.ndarray:
        """Transport one point (or a batch) from parameter 0 to tau."""
        p = np.asarray(p, dtype=float)
        if self.has_analytic:
            out = np.asarray(self.field.flow_fn(tau, p), dtype=float)
        else:
            out = self._rk4(p, 0.0, tau)
        self._check_domain(out)
        return out

    def transport(self, p: np.ndarray, tau0: float, tau1: float) -> np.ndarray:
        """Transport points already at parameter tau0 to parameter tau1."""
        p = np.asarray(p, dtype=float)
        if self.has_analytic:
            out = np.asarray(self.field.flow_fn(tau1 - tau0, p), dtype=float)
        else:
            out = self._rk4(p, tau0, tau1)
        self._check_domain(out)
        return out

    def snapshots(self, p: np.ndarray, taus: Sequence[float]) -> List[np.ndarray]:
        """States at each tau, integrating incrementally along a sorted grid."""
        taus = [float(t) for t in taus]
        if any(b < a for a, b in zip(taus, taus[1:])):
            raise ValueError("snapshot parameters must be non-decreasing")
        out = []
        if self.has_analytic:
            for t in taus:
                out.append(self.point(p, t))
            return out
        state = np.asarray(p, dtype=float)
        prev = 0.0
        for t in taus:
            state = self._rk4(state, prev, t)
            self._check_domain(state)
            out.append(state)
            prev = t
        return out

    # -- internals ----------------------------------------------------

    def _rk4(self, p: np.ndarray, tau0: float, tau1: float) -> np.ndarray:
        span = tau1 - tau0
        if span == 0.0:
            return np.array(p, dtype=float, copy=True)
        h_max = self.step_for(max(abs(tau0), abs(tau1)))
        n = max(1, int(np.ceil(abs(span) / h_max)))
        h = span / n
        f = self.field
        y = np.array(p, dtype=float, copy=True)
        for _ in range(n):
            y_full = _rk4_step(f, y, h)
            if self.self_check:
                y_half = _rk4_step(f, _rk4_step(f, y, 0.5 * h), 0.5 * h)
                scale = 1.0 + np.max(np.abs(y))
                if np.max(np.abs(y_full - y_half)) > self.self_check_tol * scale:
                    raise StepSizeError(
                        f"RK4 half-step check failed at step {h:g}; reduce the step"
                    )
                y = y_half
            else:
                y = y_full
        return y

    def _check_domain(self, points: np.ndarray) -> None:
        if self.spacetime is not None and not np.all(self.spacetime.contains(points)):
            raise LeftChartDomainError(
                f"flow left the domain of chart '{self.spacetime.name}'"
            )


def _rk4_step(f, y, h):
    k1 = f(y)
    k2 = f(y + 0.5 * h * k1)
    k3 = f(y + 0.5 * h * k2)
    k4 = f(y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def flow_point(fm: FlowMap, p, tau: float) -> np.ndarray:
    return fm.point(np.asarray(p, dtype=float), tau)


@dataclass(frozen=True)
class EvolvedSurface(ParametrizedHypersurface):
    """Flow image of a base surface at one flow parameter value."""

    base: Optional[ParametrizedHypersurface] = None
    flow: Optional[FlowMap] = None
    tau: float = 0.0


def evolve_surface(fm: FlowMap, h: ParametrizedHypersurface, tau: float) -> EvolvedSurface:
    """Surface with embedding Phi_tau . phi, same box, grid and orientation."""

    def embed(u):
        return fm.point(h.embed(u), tau)

    return EvolvedSurface(
        embed_fn=embed,
        param_box=h.param_box,
        grid_shape=h.grid_shape,
        orientation=h.orientation,
        name=f"{h.name}@tau={tau:g}",
        truncation=h.truncation,
        base=h,
        flow=fm,
        tau=tau,
    )


# ---------------------------------------------------------------------------
# Causal-transition detection
# ---------------------------------------------------------------------------

def _transported_norm(st: Spacetime, fm: FlowMap, h: ParametrizedHypersurface,
                      u: np.ndarray, direction: np.ndarray):
    """q(tau) = g(V(tau), V(tau)) for the pushed-forward tangent direction.

    The direction is a parameter-space vector; its pushforward at flow time
    tau is the central difference of Phi_tau . phi along it.  Returns a
    callable usable either from scratch (analytic) or on stored pair
    states (numeric path handled by the caller).
    """
    u = np.asarray(u, dtype=float)
    direction = np.asarray(direction, dtype=float)
    ds = FD_SCALE * (1.0 + float(np.max(np.abs(u))))
    pair0 = np.stack([h.embed(u + ds * direction), h.embed(u - ds * direction)])

    def q_from_states(states: np.ndarray) -> float:
        v = (states[0] - states[1]) / (2.0 * ds)
        mid = 0.5 * (states[0] + states[1])
        return float(inner(st, mid, v, v))

    return pair0, q_from_states


def lightlike_crossing(st: Spacetime, fm: FlowMap, h: ParametrizedHypersurface,
                       u, direction, tau_max: float,
                       tol_root: float = TOL_ROOT,
                       n_bracket: int = N_BRACKET) -> Optional[float]:
    """First flow parameter in (0, tau_max] where a tangent direction goes null.

    Monitors q(tau) = g(V(tau), V(tau)) on a uniform bracketing grid, then
    bisects the first sign change down to tol_root.  Returns None when q
    never changes sign (not an error).
    """
    pair0, q_of = _transported_norm(st, fm, h, u, direction)
    taus = np.linspace(0.0, tau_max, n_bracket + 1)
    states = fm.snapshots(pair0, taus)
    qs = np.array([q_of(s) for s in states])
    sign_change = np.nonzero(qs[:-1] * qs[1:] < 0.0)[0]
    if len(sign_change) == 0:
        scale = float(np.max(np.abs(qs)))
        if np.any(np.abs(qs) <= 1e-12 * max(scale, 1e-300)):
            raise RootBracketError(
                "q(tau) touches zero without a resolvable sign change"
            )
        return None
    i = int(sign_change[0])
    a, b = float(taus[i]), float(taus[i + 1])
    qa = qs[i]
    state_a = states[i]
    if qa == 0.0:
        return a
    # Bisection; numeric flows continue from the stored left-endpoint state
    # instead of re-integrating from tau = 0 each query.
    while b - a > tol_root:
        m = 0.5 * (a + b)
        if fm.has_analytic:
            qm = q_of(fm.point(pair0, m))
        else:
            state_m = fm.transport(state_a, a, m)
            qm = q_of(state_m)
        if qm == 0.0:
            return m
        if qa * qm < 0.0:
            b = m
        else:
            if not fm.has_analytic:
                state_a = state_m
            a, qa = m, qm
    return 0.5 * (a + b)


@dataclass(frozen=True)
class CausalSample:
    """One row of a causal sweep: node index, parameters, tau, point, class."""

    node: tuple
    u: tuple
    tau: float
    point: tuple
    character: CausalCharacter


def causal_sweep(st: Spacetime, fm: FlowMap, h: ParametrizedHypersurface,
                 tau_grid: Sequence[float], u_nodes: Optional[np.ndarray] = None
                 ) -> List[CausalSample]:
    """Per-node causal classification history of the evolving surface.

    u_nodes defaults to the surface's own midpoint grid.  Rows are ordered
    by tau, then node index; suitable for CSV export.
    """
    if u_nodes is None:
        from .quadrature import midpoint_nodes
        u_nodes, _ = midpoint_nodes(h.param_box, h.grid_shape)
    u_flat = np.asarray(u_nodes, dtype=float).reshape(-1, h.codim_params)
    rows: List[CausalSample] = []
    for tau in tau_grid:
        surf = evolve_surface(fm, h, float(tau))
        chars = surface_causal_class_batch(st, surf, u_flat)
        pts = surf.embed(u_flat)
        for idx in range(len(u_flat)):
            rows.append(CausalSample(
                node=(idx,),
                u=tuple(float(v) for v in u_flat[idx]),
                tau=float(tau),
                point=tuple(float(v) for v in pts[idx]),
                character=chars[idx],
            ))
    return rows
