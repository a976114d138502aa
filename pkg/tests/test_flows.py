"""Flow maps, surface evolution, causal-transition detection."""

import numpy as np
import pytest

import hyperflux as hf
from hyperflux.currents import radial_crossing_time
from hyperflux.quadrature import midpoint_nodes
from hyperflux.surfaces import ParametrizedHypersurface, frames_at


def rotating_flow(st, omega=1.0, **kw):
    return hf.FlowMap(hf.rotating_observer_field(omega), spacetime=st, **kw)


def test_flow_point_closed_form(mink3):
    # closed-form flow of the rotating field at a quarter turn
    fm = rotating_flow(mink3, 1.0)
    got = fm.point(np.array([0.0, 1.0, 0.0]), np.pi / 2)
    assert np.allclose(got, [np.sqrt(2.0) * np.pi / 2, 0.0, 1.0], atol=1e-12)
    assert got[0] == pytest.approx(2.221441, abs=1e-6)


def test_flow_tau_zero_is_identity(mink3, rng):
    pts = rng.uniform(-2, 2, size=(15, 3))
    for fm in (rotating_flow(mink3), rotating_flow(mink3, analytic=False)):
        assert np.allclose(fm.point(pts, 0.0), pts, rtol=0, atol=0)


def test_constant_field_translates(mink3):
    fm = hf.FlowMap(hf.constant_field([1.0, 0.0, 0.0]), spacetime=mink3)
    assert np.allclose(fm.point(np.array([0.0, 0.3, -0.7]), 3.0), [3.0, 0.3, -0.7])


def test_rk4_matches_analytic_fourth_order(mink3, rng):
    # halving the step shrinks the flow error ~16x
    pts = rng.uniform(-1.5, 1.5, size=(8, 3))
    exact = rotating_flow(mink3, 1.0).point(pts, 2.0)
    errs = []
    for step in (0.02, 0.01):
        num = rotating_flow(mink3, 1.0, analytic=False, step=step).point(pts, 2.0)
        errs.append(np.max(np.abs(num - exact)))
    ratio = errs[0] / errs[1]
    assert 12.0 < ratio < 20.0


def test_group_property(mink3, rng):
    pts = rng.uniform(-1, 1, size=(10, 3))
    for fm, tol in ((rotating_flow(mink3, 0.9), 1e-12),
                    (rotating_flow(mink3, 0.9, analytic=False), 1e-9)):
        via = fm.transport(fm.point(pts, 0.7), 0.7, 1.8)
        direct = fm.point(pts, 1.8)
        assert np.max(np.abs(via - direct)) < tol


def test_left_chart_domain(mink3):
    st = hf.Spacetime(dim=3, metric_fn=mink3.metric_fn, name="bounded",
                      domain_fn=lambda p: np.abs(p[..., 0]) < 1.0)
    fm = hf.FlowMap(hf.constant_field([1.0, 0.0, 0.0]), spacetime=st)
    with pytest.raises(hf.LeftChartDomainError):
        fm.point(np.array([0.0, 0.0, 0.0]), 2.0)


def test_step_size_self_check(mink3):
    fm = rotating_flow(mink3, 5.0, analytic=False, step=1.0, self_check=True,
                       self_check_tol=1e-9)
    with pytest.raises(hf.StepSizeError):
        fm.point(np.array([0.0, 1.0, 0.0]), 2.0)


def test_evolved_surface_time_lift(mink3):
    # the t coordinate of the evolved disk is sqrt(1 + w^2 r0^2) * tau
    omega, tau = 1.0, 0.8
    disk = hf.disk_surface(r_max=1.0, grid=(8, 8))
    ev = hf.evolve_surface(rotating_flow(mink3, omega), disk, tau)
    nodes, _ = midpoint_nodes(disk.param_box, (6, 6))
    pts = ev.embed(nodes)
    r0 = nodes[..., 0]
    assert np.allclose(pts[..., 0], np.sqrt(1.0 + omega ** 2 * r0 ** 2) * tau,
                       atol=1e-12)
    assert ev.tau == tau and ev.base is disk


def test_evolve_tau_zero_is_base(mink3):
    disk = hf.disk_surface(r_max=1.0, grid=(6, 6))
    ev = hf.evolve_surface(rotating_flow(mink3), disk, 0.0)
    nodes, _ = midpoint_nodes(disk.param_box, (5, 5))
    assert np.allclose(ev.embed(nodes), disk.embed(nodes), atol=1e-15)


def test_evolution_preserves_immersion(mink3):
    disk = hf.disk_surface(r_max=2.0, grid=(8, 12))
    ev = hf.evolve_surface(rotating_flow(mink3), disk, 2.5)
    nodes, _ = midpoint_nodes(ev.param_box, ev.grid_shape)
    frames_at(ev, nodes, check_immersion=True)  # raises if rank drops


def test_constant_flow_keeps_causal_class(mink3):
    disk = hf.disk_surface(r_max=1.0, grid=(6, 8))
    fm = hf.FlowMap(hf.constant_field([1.0, 0.0, 0.0]), spacetime=mink3)
    ev = hf.evolve_surface(fm, disk, 3.0)
    nodes, _ = midpoint_nodes(disk.param_box, disk.grid_shape)
    chars = hf.surface_causal_class_batch(mink3, ev, nodes.reshape(-1, 2))
    assert all(c is hf.CausalCharacter.SPACELIKE for c in chars)


def test_crossing_closed_form_cases(mink3):
    disk = hf.disk_surface(r_max=2.5, grid=(8, 8))
    fm1 = rotating_flow(mink3, 1.0)
    tau = hf.lightlike_crossing(mink3, fm1, disk, (1.0, 0.0), (1.0, 0.0), tau_max=3.0)
    assert tau == pytest.approx(np.sqrt(2.0), abs=1e-6)

    fm05 = rotating_flow(mink3, 0.5)
    tau = hf.lightlike_crossing(mink3, fm05, disk, (2.0, 0.0), (1.0, 0.0), tau_max=5.0)
    assert tau == pytest.approx(2.0 * np.sqrt(2.0), abs=1e-6)


def test_crossing_none_for_rigid_translation(mink3):
    disk = hf.disk_surface(r_max=1.0, grid=(6, 6))
    fm = hf.FlowMap(hf.constant_field([1.0, 0.0, 0.0]), spacetime=mink3)
    assert hf.lightlike_crossing(mink3, fm, disk, (0.5, 0.0), (1.0, 0.0),
                                 tau_max=5.0) is None


def test_crossing_random_pairs_match_closed_form(mink3, rng):
    # 20 random (omega, r0) pairs against the closed form
    omegas = rng.uniform(0.1, 2.0, 20)
    r0s = rng.uniform(0.1, 5.0, 20)
    for omega, r0 in zip(omegas, r0s):
        fm = rotating_flow(mink3, float(omega))
        disk = hf.disk_surface(r_max=r0 + 1.0, grid=(6, 6))
        ref = radial_crossing_time(float(omega), float(r0))
        tau = hf.lightlike_crossing(mink3, fm, disk, (float(r0), 0.0), (1.0, 0.0),
                                    tau_max=1.25 * ref + 0.5)
        assert tau == pytest.approx(ref, abs=1e-6)


def test_timelike_after_crossing(mink3):
    # beyond the crossing the tangent space turns timelike and stays so
    omega, r0 = 1.0, 1.5
    disk = hf.disk_surface(r_max=r0, grid=(8, 8))
    fm = rotating_flow(mink3, omega)
    tstar = radial_crossing_time(omega, r0)
    node = (r0 - 1e-3, 0.1)
    for tau in np.linspace(1.02 * tstar, 3.0 * tstar, 6):
        ev = hf.evolve_surface(fm, disk, float(tau))
        assert hf.surface_causal_class(mink3, ev, node) is hf.CausalCharacter.TIMELIKE


def test_crossing_strictly_decreasing_in_radius():
    # dense evaluation of the closed form over r0 in (0, 10]
    r = np.linspace(0.05, 10.0, 400)
    taus = [radial_crossing_time(1.0, float(x)) for x in r]
    assert np.all(np.diff(taus) < 0.0)
    assert taus[-1] > 1.0  # infimum 1/omega never attained


def test_root_bracket_error_on_identically_null_direction(mink3):
    # a direction that is null for all tau cannot be bracketed
    def embed(u):
        u = np.asarray(u, dtype=float)
        return np.stack([u[..., 0], u[..., 0], u[..., 1]], axis=-1)

    null_surf = ParametrizedHypersurface(embed, [[0, 1], [0, 1]], (4, 4))
    fm = hf.FlowMap(hf.constant_field([1.0, 0.0, 0.0]), spacetime=mink3)
    with pytest.raises(hf.RootBracketError):
        hf.lightlike_crossing(mink3, fm, null_surf, (0.5, 0.5), (1.0, 0.0),
                              tau_max=1.0)


def test_causal_sweep_table(mink3):
    omega = 1.0
    disk = hf.disk_surface(r_max=2.0, grid=(4, 4))
    fm = rotating_flow(mink3, omega)
    taus = [0.0, 0.7, 1.3, 2.6]
    rows = hf.causal_sweep(mink3, fm, disk, taus)
    assert len(rows) == len(taus) * 16
    at0 = [r for r in rows if r.tau == 0.0]
    assert all(r.character is hf.CausalCharacter.SPACELIKE for r in at0)

    # each node flips exactly at the closed-form crossing time
    for row in rows:
        r0 = row.u[0]
        tstar = radial_crossing_time(omega, r0)
        expect_spacelike = row.tau < tstar
        got_spacelike = row.character is hf.CausalCharacter.SPACELIKE
        assert got_spacelike == expect_spacelike


def test_snapshots_match_direct_transport(mink3, rng):
    pts = rng.uniform(-1, 1, size=(6, 3))
    fm = rotating_flow(mink3, 1.2, analytic=False)
    taus = [0.0, 0.4, 1.1, 1.7]
    snaps = fm.snapshots(pts, taus)
    for tau, snap in zip(taus, snaps):
        assert np.allclose(snap, fm.point(pts, tau), atol=1e-9)
