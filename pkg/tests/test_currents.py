"""Built-in current families and their factorization invariants."""

import numpy as np
import pytest

import hyperflux as hf
from hyperflux.geometry import TOL_FD, finite_difference_divergence


def sample_box(spec, rng, n):
    box = spec.bounding_box
    return rng.uniform(box[:, 0], box[:, 1], size=(n, spec.dim))


def test_rotating_field_values():
    X = hf.rotating_observer_field(1.0)
    assert np.allclose(X(np.array([0.7, 1.0, 0.0])), [np.sqrt(2.0), 0.0, 1.0])
    assert np.allclose(X(np.array([0.0, 0.0, 0.0])), [1.0, 0.0, 0.0])
    assert np.allclose(hf.example1_field(1.0)(np.array([0.7, 1.0, 0.0])),
                       [np.sqrt(2.0), 0.0, 1.0])


def test_rotating_field_unit_norm(mink3, rng):
    X = hf.rotating_observer_field(1.7)
    pts = rng.uniform(-4, 4, size=(100, 3))
    q = hf.inner(mink3, pts, X(pts), X(pts))
    assert np.allclose(q, 1.0, atol=1e-12)


def test_rotating_field_rejects_nonpositive_omega():
    with pytest.raises(ValueError):
        hf.rotating_observer_field(0.0)


def test_rotating_flow_matches_rk4(mink3, rng):
    # cross-module oracle: closed-form flow vs independent RK4 integration
    X = hf.rotating_observer_field(0.9)
    pts = rng.uniform(-2, 2, size=(12, 3))
    analytic = hf.FlowMap(X, spacetime=mink3).point(pts, 1.3)
    numeric = hf.FlowMap(X, spacetime=mink3, analytic=False, step=1e-3).point(pts, 1.3)
    assert np.max(np.abs(analytic - numeric)) < 1e-10


def test_crossing_time_formula():
    assert hf.radial_crossing_time(1.0, 1.0) == pytest.approx(np.sqrt(2.0))
    assert hf.radial_crossing_time(0.5, 2.0) == pytest.approx(2.0 * np.sqrt(2.0))
    with pytest.raises(ValueError):
        hf.radial_crossing_time(1.0, 0.0)


def test_boosted_gaussian_static_components(rng):
    spec = hf.static_gaussian_current(1.0, 3)
    pts = rng.uniform(-2, 2, size=(20, 4))
    j = spec.J(pts)
    assert np.allclose(j[..., 1:], 0.0)
    assert np.all(j[..., 0] > 0.0)


def test_boosted_gaussian_divergence_free(mink3, rng):
    # chain rule: d_t f + v . grad f = 0 for f of argument x - v t
    spec = hf.boosted_gaussian_current([0.5, 0.0], 1.0)
    pts = sample_box(spec, rng, 50)
    div = finite_difference_divergence(mink3, spec.J, pts)
    assert np.max(np.abs(div)) < TOL_FD


def test_boosted_gaussian_timelike_norm(mink3, rng):
    v = np.array([0.5, 0.0])
    spec = hf.boosted_gaussian_current(v, 1.0)
    pts = sample_box(spec, rng, 50)
    f = spec.J(pts)[..., 0]
    q = hf.inner(mink3, pts, spec.J(pts), spec.J(pts))
    assert np.allclose(q, f ** 2 * (1.0 - v @ v), rtol=1e-12)
    assert np.all(q > 0.0)


def test_boosted_gaussian_rejects_superluminal():
    with pytest.raises(hf.SuperluminalError):
        hf.boosted_gaussian_current([1.0, 0.0], 1.0)
    with pytest.raises(hf.SuperluminalError):
        hf.boosted_gaussian_current([0.8, 0.7], 1.0)


def test_rescale_identity_is_noop(rng):
    spec = hf.boosted_gaussian_current([0.3, 0.0], 1.0)
    same = hf.rescale_velocity(spec, lambda p: np.ones(np.shape(p)[:-1]))
    pts = sample_box(spec, rng, 20)
    assert np.array_equal(same.J(pts), spec.J(pts))
    assert np.allclose(same.X(pts), spec.X(pts), rtol=0, atol=0)
    assert np.allclose(same.rho_fn(pts), spec.rho_fn(pts), rtol=0, atol=0)


def test_rescale_by_two_swaps_factor(rng):
    spec = hf.boosted_gaussian_current([0.3, 0.0], 1.0)
    double = hf.rescale_velocity(spec, lambda p: np.full(np.shape(p)[:-1], 2.0))
    pts = sample_box(spec, rng, 20)
    assert np.allclose(double.X(pts), 2.0 * spec.X(pts), rtol=0, atol=0)
    assert np.allclose(double.rho_fn(pts), 0.5 * spec.rho_fn(pts), rtol=0, atol=0)
    assert np.array_equal(double.J(pts), spec.J(pts))


def test_rescale_preserves_current_pointwise(rng):
    spec = hf.boosted_gaussian_current([0.2, 0.4], 0.8)
    resc = hf.rescale_velocity(spec, lambda p: 1.0 + 0.5 * np.sin(p[..., 1]))
    pts = sample_box(spec, rng, 50)
    recomposed = resc.rho_fn(pts)[..., None] * resc.X(pts)
    assert np.allclose(recomposed, spec.J(pts), rtol=1e-14, atol=1e-18)


def test_rescale_rejects_nonpositive():
    spec = hf.boosted_gaussian_current([0.3, 0.0], 1.0)
    with pytest.raises(hf.NonPositiveRescalingError):
        hf.rescale_velocity(spec, lambda p: np.sin(p[..., 1]))


def test_rotating_packet_divergence_formula(mink3, rng):
    # analytic source term cross-checked against finite differences
    spec = hf.rotating_packet_current(0.9, 1.0, (0.6, 0.2))
    pts = sample_box(spec, rng, 50)
    assert np.max(np.abs(spec.J.divergence_fn(pts)
                         - finite_difference_divergence(mink3, spec.J, pts))) < TOL_FD
    # genuinely non-conserved
    assert np.max(np.abs(spec.J.divergence_fn(pts))) > 1e-4


def test_constant_current_requires_timelike():
    with pytest.raises(ValueError):
        hf.constant_current([1.0, 1.0, 0.0])
    with pytest.raises(ValueError):
        hf.constant_current([-1.0, 0.0, 0.0])


@pytest.mark.parametrize("make", [
    lambda: hf.static_gaussian_current(1.0, 2),
    lambda: hf.boosted_gaussian_current([0.5, 0.0], 1.0),
    lambda: hf.boosted_gaussian_current([0.2, -0.3], 0.7),
    lambda: hf.rotating_packet_current(0.8, 1.0, (0.5, 0.0)),
    lambda: hf.constant_current([2.0, 0.5, 0.0]),
])
def test_current_spec_invariants(make, rng):
    # J = rho X, future-directed timelike, claimed divergence honored
    spec = make()
    st = hf.minkowski(spec.dim)
    pts = sample_box(spec, rng, 1000)
    j = spec.J(pts)
    recomposed = spec.rho_fn(pts)[..., None] * spec.X(pts)
    scale = np.max(np.abs(j))
    assert np.max(np.abs(recomposed - j)) < 1e-13 * scale
    q = hf.inner(st, pts, j, j)
    assert np.all(q > 0.0)
    assert np.all(j[..., 0] > 0.0)
    if spec.divergence_free:
        sub = pts[:100]
        assert np.max(np.abs(finite_difference_divergence(st, spec.J, sub))) < TOL_FD


def test_gaussian_tail_mass_bounds():
    assert hf.gaussian_tail_mass(8.0, 2) < 1e-12
    assert hf.gaussian_tail_mass(1.0, 2) > 0.3
