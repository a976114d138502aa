"""Frame and conservation-plot rendering from the documented CSV schemas."""

import math

import numpy as np

import render_conservation
import render_frames


def analytic_crossing(omega, r0):
    return math.sqrt(1.0 + omega ** 2 * r0 ** 2) / (omega ** 2 * r0)


def test_one_frame_per_tau(example1_csv, tmp_path):
    frames = render_frames.read_sweep(example1_csv)
    taus = [f["tau"] for f in frames]
    assert len(taus) == 9
    written = render_frames.render_frames(example1_csv, tmp_path / "frames")
    assert len(written) == len(taus)
    for path in written:
        assert path.endswith(".png")
        assert (tmp_path / "frames").joinpath(path.split("/")[-1]).stat().st_size > 0
    # filenames key frames by tau with fixed formatting, in order
    names = [p.split("/")[-1] for p in written]
    assert names == sorted(names)


def test_initial_frame_all_spacelike(example1_csv):
    frames = render_frames.read_sweep(example1_csv)
    first = frames[0]
    assert first["tau"] == 0.0
    assert not render_frames.nonspacelike_mask(first).any()


def test_outer_ring_flag_appears_at_analytic_crossing(example1_csv):
    # the first flagged tau is the grid tau nearest the closed-form
    # crossing time of the disk rim
    frames = render_frames.read_sweep(example1_csv)
    taus = np.array([f["tau"] for f in frames])
    first_flag = render_frames.first_nonspacelike_tau(frames, outer_only=True)
    assert first_flag is not None
    tstar = analytic_crossing(1.0, 2.0)
    nearest = taus[np.argmin(np.abs(taus - tstar))]
    assert first_flag == nearest


def test_flagging_starts_on_outer_ring(example1_csv):
    frames = render_frames.read_sweep(example1_csv)
    first_any = render_frames.first_nonspacelike_tau(frames, outer_only=False)
    first_outer = render_frames.first_nonspacelike_tau(frames, outer_only=True)
    assert first_any == first_outer


def test_empty_csv_warns_and_exits_zero(tmp_path, capsys):
    empty = tmp_path / "empty.csv"
    empty.write_text("tau,r0,theta,t,x,y,causal_class\n")
    code = render_frames.main([str(empty), str(tmp_path / "frames")])
    assert code == 0
    captured = capsys.readouterr()
    assert "warning" in captured.err
    assert not (tmp_path / "frames").exists()


def test_schema_mismatch_fails(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("a,b,c\n1,2,3\n")
    assert render_frames.main([str(bad), str(tmp_path / "frames")]) == 2
    bad2 = tmp_path / "bad2.csv"
    bad2.write_text("tau,r0,theta,t,x,y,causal_class\n0,1,0,0,1,0,purple\n")
    assert render_frames.main([str(bad2), str(tmp_path / "frames")]) == 2


def test_conservation_plot_flat_within_band(conservation_csv, tmp_path):
    out = tmp_path / "conservation.png"
    code = render_conservation.main([str(conservation_csv), str(out)])
    assert code == 0
    assert out.stat().st_size > 0
    table = render_conservation.read_conservation(conservation_csv)
    assert render_conservation.flat_within_band(table)


def test_conservation_single_row(tmp_path):
    single = tmp_path / "single.csv"
    single.write_text("tau,total,error_estimate,residual\n0,1,1e-9,0\n")
    out = tmp_path / "single.png"
    assert render_conservation.main([str(single), str(out)]) == 0
    assert out.stat().st_size > 0


def test_conservation_missing_columns(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("tau,total\n0,1\n")
    assert render_conservation.main([str(bad), str(tmp_path / "x.png")]) == 2


def test_render_is_deterministic(example1_csv, tmp_path):
    a = render_frames.render_frames(example1_csv, tmp_path / "a")
    b = render_frames.render_frames(example1_csv, tmp_path / "b")
    for pa, pb in zip(a, b):
        assert open(pa, "rb").read() == open(pb, "rb").read()
