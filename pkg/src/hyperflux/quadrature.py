"""Tensor-product midpoint quadrature with Richardson refinement.

Rectangular parameter boxes only.  The midpoint rule is second order on
smooth integrands; one grid doubling plus Richardson extrapolation gives
the returned value, and |I_fine - I_coarse| / 3 is the reported error
estimate.  Reductions use numpy's pairwise summation over arrays of fixed
layout, so results are independent of evaluation order.
"""

from dataclasses import dataclass
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class IntegralResult:
    value: float
    error_estimate: float
    refinements: int = 1
    neval: int = 0

    def __float__(self) -> float:
        return self.value


def as_box(box) -> np.ndarray:
    """Validate and return a parameter box as an array of shape (k, 2)."""
    box = np.asarray(box, dtype=float)
    if box.ndim != 2 or box.shape[1] != 2:
        raise ValueError("a box is a sequence of [lo, hi] intervals")
    if np.any(box[:, 1] <= box[:, 0]):
        raise ValueError("box intervals must satisfy lo < hi")
    return box


def midpoint_nodes(box, shape: Sequence[int]):
    """Midpoint grid over a box.

    Returns (nodes, cell_volume) with nodes of shape shape + (k,).  Nodes
    are strictly interior, so corner degeneracies of a parametrization are
    never sampled.
    """
    box = as_box(box)
    shape = tuple(int(n) for n in shape)
    if len(shape) != len(box):
        raise ValueError("grid shape rank must match box rank")
    if any(n < 1 for n in shape):
        raise ValueError("grid shape entries must be >= 1")
    axes = []
    vol = 1.0
    for (lo, hi), n in zip(box, shape):
        step = (hi - lo) / n
        axes.append(lo + (np.arange(n) + 0.5) * step)
        vol *= step
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack(mesh, axis=-1), vol


def midpoint_integral(values: np.ndarray, cell_volume: float) -> float:
    """Sum of node values times the cell volume (pairwise reduction)."""
    return float(np.sum(values, dtype=float) * cell_volume)


def richardson_pair(coarse: float, fine: float, order: int = 2):
    """Extrapolated value and error estimate from two dyadic resolutions."""
    factor = 2.0 ** order - 1.0
    correction = (fine - coarse) / factor
    return fine + correction, abs(correction)


def refine_shape(shape: Sequence[int], factor: int) -> tuple:
    return tuple(int(n) * factor for n in shape)


def refined_integral(evaluate, box, shape, refinements: int = 1,
                     order: int = 2) -> IntegralResult:
    """Richardson-refined midpoint integral.

    evaluate(nodes) must return integrand values on a node array of shape
    shape + (k,).  The ladder is shape, 2*shape, ..., 2^refinements*shape;
    the last two rungs feed the extrapolation.
    """
    if refinements < 1:
        nodes, vol = midpoint_nodes(box, shape)
        val = midpoint_integral(np.asarray(evaluate(nodes), dtype=float), vol)
        return IntegralResult(value=val, error_estimate=abs(val) * np.finfo(float).eps,
                              refinements=0, neval=int(np.prod(shape)))
    values = []
    neval = 0
    for j in range(refinements + 1):
        s = refine_shape(shape, 2 ** j)
        nodes, vol = midpoint_nodes(box, s)
        values.append(midpoint_integral(np.asarray(evaluate(nodes), dtype=float), vol))
        neval += int(np.prod(s))
    value, err = richardson_pair(values[-2], values[-1], order=order)
    return IntegralResult(value=value, error_estimate=err,
                          refinements=refinements, neval=neval)


# ---------------------------------------------------------------------------
# Regions: finite unions of parameter sub-rectangles
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RegionSpec:
    """Disjoint sub-rectangles of a surface's parameter box.

    Plays the role of the measurable sets probabilities are assigned to;
    overlaps are rejected so that additivity holds by construction.
    """

    rectangles: tuple

    @staticmethod
    def full(box) -> "RegionSpec":
        return RegionSpec(rectangles=(as_box(box),))

    @staticmethod
    def of(rectangles, within=None) -> "RegionSpec":
        rects = tuple(as_box(r) for r in rectangles)
        if within is not None:
            outer = as_box(within)
            for r in rects:
                if len(r) != len(outer):
                    raise ValueError("sub-rectangle rank must match the parameter box")
                if np.any(r[:, 0] < outer[:, 0] - 1e-12) or np.any(r[:, 1] > outer[:, 1] + 1e-12):
                    raise ValueError("sub-rectangle lies outside the parameter box")
        for i in range(len(rects)):
            for j in range(i + 1, len(rects)):
                if _overlap(rects[i], rects[j]):
                    raise ValueError("region sub-rectangles must not overlap")
        return RegionSpec(rectangles=rects)

    def __len__(self) -> int:
        return len(self.rectangles)


def _overlap(a: np.ndarray, b: np.ndarray) -> bool:
    lo = np.maximum(a[:, 0], b[:, 0])
    hi = np.minimum(a[:, 1], b[:, 1])
    return bool(np.all(hi - lo > 1e-14))
