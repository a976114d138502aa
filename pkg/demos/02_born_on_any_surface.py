#!/usr/bin/env python3
"""One probability rule for every hypersurface, spacelike or not.

Two ways to integrate a probability density over a surface:

  * the spacelike-only route: the density g(J, n) against the Riemannian
    volume of the negative pullback metric, which needs a unit normal and
    dies where the surface touches the light cone;
  * the flux route: pull back the contraction of the current J into the
    spacetime volume form.  No causality assumption at all.

On spacelike surfaces they agree pointwise; the flux route keeps working
beyond that.
"""

import dataclasses

import numpy as np

import hyperflux as hf
from hyperflux.quadrature import RegionSpec
from hyperflux.surfaces import ParametrizedHypersurface

st = hf.minkowski(3)
current = hf.boosted_gaussian_current([0.5, 0.0], width=1.0)

plane = dataclasses.replace(hf.plane_surface(3, half_width=8.0, grid=24),
                            truncation=hf.gaussian_tail_mass(8.0, 2))

print("Normalization on the t = 0 plane (drifting Gaussian packet):")
res = hf.born_probability(st, current.J, plane)
print(f"  P(full plane) = {res.value:.12f}  (error budget {res.error_estimate:.1e})")

half = RegionSpec.of([[[0.0, 8.0], [-8.0, 8.0]]], within=plane.param_box)
print(f"  P(x > 0)      = {hf.born_probability(st, current.J, plane, region=half).value:.12f}")

print("\nAgreement of the two routes on spacelike surfaces:")
for name, surf in [
    ("flat plane", plane),
    ("tilted graph", hf.graph_surface(3, lambda u: 0.3 * u[..., 0], grid=24)),
    ("curved graph", hf.graph_surface(
        3, lambda u: 0.2 * np.sin(u[..., 0]) * np.cos(u[..., 1]), grid=24)),
]:
    rep = hf.verify_spacelike_identity(st, current.J, surf)
    print(f"  {name:13s}: relative difference {rep.rel_diff:.2e}, "
          f"worst pointwise {rep.max_pointwise_rel:.2e}")


def timelike_patch():
    def embed(u):
        u = np.asarray(u, dtype=float)
        return np.stack([1.5 * u[..., 0], u[..., 0], u[..., 1]], axis=-1)

    return ParametrizedHypersurface(embed, [[0.0, 1.0], [0.0, 1.0]], (8, 8),
                                    name="timelike patch")


patch = timelike_patch()
print("\nA timelike patch (t = 1.5 x):")
print("  tangent-space class:",
      hf.surface_causal_class(st, patch, (0.5, 0.5)).value)
try:
    hf.induced_volume_integral(st, patch, None)
except hf.NotSpacelikeError as exc:
    print("  spacelike-only route:", type(exc).__name__, "-", exc)
J = hf.constant_field([1.0, 0.2, 0.0])
res = hf.born_probability(st, J, patch)
print(f"  flux route:           P = {res.value:.12f}  (exactly 0.7 for this "
      "constant current: the 3x3 determinant is 0.7 at every node)")

print("\nTangency diagnostics on a folded surface (t = u, x = u(1-u)):")


def fold(u):
    u = np.asarray(u, dtype=float)
    a = u[..., 0]
    return np.stack([a, a * (1.0 - a), u[..., 1]], axis=-1)


folded = ParametrizedHypersurface(fold, [[0.0, 1.0], [0.0, 1.0]], (11, 3))
rep = hf.positivity_check(st, hf.constant_field([1.0, 0.0, 0.0]), folded)
print(f"  {len(rep.tangent_nodes)} of {rep.n_nodes} nodes tangent to J "
      "(the fold line u = 1/2), so strict positivity fails there.")
