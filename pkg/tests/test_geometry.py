"""Metric evaluation, index gymnastics, divergence, causal classification."""

import numpy as np
import pytest
import sympy

import hyperflux as hf
from hyperflux.geometry import EPS_CAUSAL, TOL_FD, finite_difference_divergence


def test_minkowski_metric_values(mink3, mink4):
    assert np.array_equal(hf.metric_at(mink4, mink4.point(0, 0, 0, 0)),
                          np.diag([1.0, -1.0, -1.0, -1.0]))
    assert np.array_equal(hf.metric_at(mink3, mink3.point(3.0, -1.0, 2.0)),
                          np.diag([1.0, -1.0, -1.0]))


def test_conformal_metric_is_flat_at_origin(conf4):
    g = hf.metric_at(conf4, conf4.point(0, 0, 0, 0))
    assert np.allclose(g, np.diag([1.0, -1.0, -1.0, -1.0]))


def test_metric_rejects_wrong_signature():
    bad = hf.Spacetime(dim=3, metric_fn=lambda p: np.broadcast_to(
        np.diag([1.0, 1.0, -1.0]), np.shape(p)[:-1] + (3, 3)).copy(), name="bad")
    with pytest.raises(hf.NonLorentzianError):
        hf.metric_at(bad, bad.point(0, 0, 0))


def test_metric_rejects_singular():
    bad = hf.Spacetime(dim=3, metric_fn=lambda p: np.broadcast_to(
        np.diag([1.0, 0.0, -1.0]), np.shape(p)[:-1] + (3, 3)).copy(), name="singular")
    with pytest.raises(hf.SingularMetricError):
        hf.metric_at(bad, bad.point(0, 0, 0))


def test_metric_rejects_asymmetric():
    mat = np.array([[1.0, 0.5, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, -1.0]])
    bad = hf.Spacetime(dim=3, metric_fn=lambda p: np.broadcast_to(
        mat, np.shape(p)[:-1] + (3, 3)).copy(), name="asym")
    with pytest.raises(hf.NonLorentzianError):
        hf.metric_at(bad, bad.point(0, 0, 0))


def test_signature_stable_on_grids(mink3, mink4, conf3, conf4):
    # eigenvalue signs are (+, -, ..., -) at every grid point of every chart
    for st in (mink3, mink4, conf3, conf4):
        axes = [np.linspace(-5, 5, 7)] * st.dim
        pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
        g = hf.metric_at(st, pts)
        eig = np.linalg.eigvalsh(g)
        assert np.all(np.sum(eig > 0, axis=-1) == 1)
        assert np.all(np.sum(eig < 0, axis=-1) == st.dim - 1)


def test_inner_examples(mink3, mink4):
    p4 = mink4.point(0, 0, 0, 0)
    p3 = mink3.point(0, 0, 0)
    assert hf.inner(mink4, p4, [1, 0, 0, 0], [1, 0, 0, 0]) == 1.0
    assert hf.inner(mink3, p3, [1, 1, 0], [1, 1, 0]) == 0.0
    assert hf.inner(mink3, p3, [np.sqrt(2), 1, 0], [0, 0, 1]) == 0.0


def test_inner_symmetric_at_random_points(conf4, rng):
    pts = rng.uniform(-3, 3, size=(50, 4))
    V = rng.normal(size=(50, 4))
    W = rng.normal(size=(50, 4))
    vw = hf.inner(conf4, pts, V, W)
    wv = hf.inner(conf4, pts, W, V)
    scale = np.abs(vw) + np.sum(V * V, axis=-1) + np.sum(W * W, axis=-1)
    assert np.all(np.abs(vw - wv) <= 1e-14 * scale)


def test_gradient_of_time_coordinate(mink4):
    grad = hf.gradient_field(mink4, lambda p: p[..., 0])
    assert np.allclose(grad(mink4.point(0.3, 1.0, -2.0, 0.5)), [1, 0, 0, 0],
                       atol=1e-10)


def test_gradient_of_spatial_coordinate_flips_sign(mink4):
    grad = hf.gradient_field(mink4, lambda p: p[..., 1])
    assert np.allclose(grad(mink4.point(0, 0, 0, 0)), [0, -1, 0, 0], atol=1e-10)


def test_gradient_conformal_inverse_metric(conf4):
    # At x = pi/2 the conformal factor is 1.1, so (grad t)^0 = 1/1.21.
    # Oracle: independent finite differences of f against the inverse metric.
    p = conf4.point(0.0, np.pi / 2, 0.0, 0.0)
    grad = hf.gradient_field(conf4, lambda q: q[..., 0])
    got = grad(p)
    assert np.allclose(got, [1.0 / 1.21, 0.0, 0.0, 0.0], atol=1e-9)

    eps = 1e-6
    df = np.zeros(4)
    for mu in range(4):
        dp = np.zeros(4)
        dp[mu] = eps
        df[mu] = ((p + dp)[0] - (p - dp)[0]) / (2 * eps)
    ginv = np.linalg.inv(hf.metric_at(conf4, p))
    assert np.allclose(got, ginv @ df, atol=1e-8)


def test_gradient_raises_outside_domain():
    st = hf.Spacetime(
        dim=3,
        metric_fn=hf.minkowski(3).metric_fn,
        name="bounded",
        domain_fn=lambda p: np.max(np.abs(p), axis=-1) < 1.0,
    )
    grad = hf.gradient_field(st, lambda p: p[..., 0])
    with pytest.raises(hf.DifferentiationError):
        grad(st.point(0.0, 0.9999999, 0.0))


def test_normalize_timelike_examples(mink4, mink3):
    assert np.allclose(
        hf.normalize_timelike(mink4, mink4.point(0, 0, 0, 0), [2, 0, 0, 0]),
        [1, 0, 0, 0])
    v = np.array([np.sqrt(2), 1, 0])
    p3 = mink3.point(0, 0, 0)
    assert np.allclose(hf.normalize_timelike(mink3, p3, v), v)
    assert np.allclose(hf.normalize_timelike(mink3, p3, 2 * v), v)


def test_normalize_timelike_idempotent(mink3, rng):
    p = mink3.point(0, 0, 0)
    for _ in range(20):
        sp = rng.normal(size=2)
        v = np.array([np.sqrt(1.0 + sp @ sp) * rng.uniform(1, 3), *sp])
        once = hf.normalize_timelike(mink3, p, v)
        twice = hf.normalize_timelike(mink3, p, once)
        assert np.allclose(once, twice, rtol=0, atol=1e-15)


def test_normalize_timelike_errors(mink3):
    p = mink3.point(0, 0, 0)
    with pytest.raises(hf.NotTimelikeError):
        hf.normalize_timelike(mink3, p, [1, 1, 0])
    with pytest.raises(hf.PastDirectedError):
        hf.normalize_timelike(mink3, p, [-2, 0, 0])


def test_divergence_constant_field_is_zero(mink4):
    F = hf.constant_field([1.0, 0.2, -0.3, 0.7])
    pts = np.array([[0.0, 1.0, 2.0, -1.0], [3.0, -2.0, 0.1, 0.4]])
    assert np.allclose(finite_difference_divergence(mink4, F, pts), 0.0, atol=1e-9)


def test_divergence_rotating_field_symbolic_oracle(mink3, rng):
    # Independent oracle: symbolic divergence of the rotating observer field.
    t, x, y = sympy.symbols("t x y")
    omega = sympy.Rational(7, 10)
    comps = [sympy.sqrt(1 + omega ** 2 * (x ** 2 + y ** 2)), -omega * y, omega * x]
    sym_div = sum(sympy.diff(c, v) for c, v in zip(comps, (t, x, y)))
    assert sympy.simplify(sym_div) == 0

    F = hf.rotating_observer_field(0.7)
    pts = rng.uniform(-3, 3, size=(30, 3))
    assert np.allclose(finite_difference_divergence(mink3, F, pts), 0.0, atol=TOL_FD)


def test_divergence_linear_field_is_dimension(mink4):
    F = hf.SpacetimeVectorField(lambda p: np.array(p, dtype=float, copy=True))
    p = mink4.point(0.2, 1.0, -0.5, 2.0)
    assert np.allclose(hf.divergence(mink4, F, p), 4.0, atol=1e-8)


def test_divergence_uses_analytic_shortcut(mink3):
    marker = hf.SpacetimeVectorField(
        lambda p: np.zeros(np.shape(p)),
        divergence_fn=lambda p: np.full(np.shape(p)[:-1], 42.0),
    )
    assert hf.divergence(mink3, marker, mink3.point(0, 0, 0)) == 42.0


def test_divergence_curved_chart_oracle(conf3):
    # div F = (1/Omega^3) d_mu(Omega^3 F^mu) for constant F in the conformal
    # chart.  Symbolic oracle frozen by hand: 3 * Omega_x / Omega at x = 0
    # is 0.3 for F = (0, 1, 0).
    t, x, y = sympy.symbols("t x y")
    omega_expr = 1 + sympy.Rational(1, 10) * sympy.sin(x)
    dens = omega_expr ** 3
    sym_div = sympy.diff(dens * 1, x) / dens  # F = (0, 1, 0)
    at_origin = float(sym_div.subs(x, 0))
    assert at_origin == pytest.approx(0.3)

    F = hf.constant_field([0.0, 1.0, 0.0])
    got = finite_difference_divergence(conf3, F, conf3.point(0.0, 0.0, 0.0))
    assert got == pytest.approx(0.3, abs=TOL_FD)


def test_analytic_divergence_matches_fd_for_builtin_fields(mink3, rng):
    fields = [
        hf.rotating_observer_field(1.3),
        hf.boosted_gaussian_current([0.4, -0.2], 1.0).J,
        hf.rotating_packet_current(0.9, 1.0, (0.6, 0.2)).J,
    ]
    pts = rng.uniform(-2, 2, size=(40, 3))
    for F in fields:
        fd = finite_difference_divergence(mink3, F, pts)
        analytic = F.divergence_fn(pts)
        assert np.max(np.abs(fd - analytic)) < TOL_FD


def test_causal_class_examples(mink4):
    p = mink4.point(0, 0, 0, 0)
    assert hf.causal_class(mink4, p, [1, 0, 0, 0]) is hf.CausalCharacter.TIMELIKE
    assert hf.causal_class(mink4, p, [1, 1, 0, 0]) is hf.CausalCharacter.LIGHTLIKE
    assert hf.causal_class(mink4, p, [0, 1, 0, 0]) is hf.CausalCharacter.SPACELIKE


def test_causal_class_zero_vector_raises(mink4):
    with pytest.raises(hf.ZeroVectorError):
        hf.causal_class(mink4, mink4.point(0, 0, 0, 0), [0, 0, 0, 0])


def test_causal_class_near_cone_reports_lightlike(mink4):
    p = mink4.point(0, 0, 0, 0)
    v = [1.0, 1.0 + 1e-12, 0.0, 0.0]
    assert hf.causal_class(mink4, p, v) is hf.CausalCharacter.LIGHTLIKE
    assert EPS_CAUSAL == 1e-9


def test_vector_field_flow_identity_at_zero(rng):
    fields = [
        hf.rotating_observer_field(0.8),
        hf.boosted_gaussian_current([0.3, 0.1], 1.0).X,
        hf.constant_field([1.0, 0.0, 0.0]),
    ]
    pts = rng.uniform(-2, 2, size=(10, 3))
    for F in fields:
        assert np.allclose(F.flow_fn(0.0, pts), pts, rtol=0, atol=0)
