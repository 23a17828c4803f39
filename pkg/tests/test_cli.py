"""Command-line surface: formats, exit codes, determinism."""

import json

import pytest

from chflow.cli import main

PEAKON = {"peaks": [{"x": 0.0, "p": 1.0, "h": 0.0}]}


def _write(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(json.dumps(obj) if not isinstance(obj, str) else obj)
    return str(path)


def test_direct_unit_peakon(tmp_path, capsys):
    pair_file = _write(tmp_path, "pair.json", PEAKON)
    out = tmp_path / "spec.json"
    assert main(["direct", pair_file, "-o", str(out)]) == 0
    data = json.loads(out.read_text())
    assert data["eigenvalues"] == [0.5]
    assert data["kappa"] == [0]
    assert data["wronskian"] == [1, -2]
    report = capsys.readouterr().err
    assert "trace" in report and "parseval" in report


def test_direct_empty_pair(tmp_path):
    pair_file = _write(tmp_path, "pair.json", {"peaks": []})
    out = tmp_path / "spec.json"
    assert main(["direct", pair_file, "-o", str(out)]) == 0
    data = json.loads(out.read_text())
    assert data["eigenvalues"] == []
    assert data["wronskian"] == [1]


def test_direct_malformed_json_exits_2(tmp_path):
    bad = _write(tmp_path, "bad.json", "{nope")
    assert main(["direct", bad]) == 2


def test_inverse_kappa_and_norming(tmp_path):
    spec = _write(tmp_path, "s.json", {"eigenvalues": [0.5], "kappa": [0.0]})
    out = tmp_path / "pair.json"
    assert main(["inverse", spec, "-o", str(out)]) == 0
    peak = json.loads(out.read_text())["peaks"][0]
    assert peak["p"] == pytest.approx(1.0)
    assert peak["x"] == pytest.approx(0.0)

    norm = _write(tmp_path, "n.json", {"eigenvalues": [0.5], "norming": [2.0],
                                       "side": "right"})
    assert main(["inverse", norm, "-o", str(out)]) == 0
    peak = json.loads(out.read_text())["peaks"][0]
    assert peak["p"] == pytest.approx(1.0)


def test_inverse_pure_atom(tmp_path):
    spec = _write(tmp_path, "s.json",
                  {"eigenvalues": [-1.0, 1.0], "kappa": [0.0, 0.0]})
    out = tmp_path / "pair.json"
    assert main(["inverse", spec, "-o", str(out)]) == 0
    peak = json.loads(out.read_text())["peaks"][0]
    assert peak["h"] == pytest.approx(1.0)
    assert peak["p"] == pytest.approx(0.0, abs=1e-12)


def test_inverse_duplicate_exits_2(tmp_path):
    spec = _write(tmp_path, "s.json",
                  {"eigenvalues": [0.5, 0.5], "kappa": [0.0, 0.0]})
    assert main(["inverse", spec]) == 2


def test_inverse_bad_norming_exits_3(tmp_path):
    spec = _write(tmp_path, "s.json",
                  {"eigenvalues": [0.5], "norming": [-2.0], "side": "left"})
    assert main(["inverse", spec]) == 3


def test_evolve_peak_tracks_time(tmp_path, capsys):
    pair_file = _write(tmp_path, "pair.json", PEAKON)
    out = tmp_path / "snap.csv"
    atoms = tmp_path / "atoms.json"
    assert main(["evolve", pair_file, "--times", "0,2,3", "--grid=-5,5,101",
                 "-o", str(out), "--atoms-output", str(atoms)]) == 0
    rows = [r.split(",") for r in out.read_text().strip().split("\n")[1:]]
    for t in (0.0, 1.0, 2.0):
        sub = [(float(x), float(u)) for tt, x, u in rows if float(tt) == t]
        peak_x = max(sub, key=lambda s: s[1])[0]
        assert abs(peak_x - t) < 0.06       # grid resolution
    side = json.loads(atoms.read_text())
    assert [s["t"] for s in side] == [0.0, 1.0, 2.0]
    assert "conserved drifts" in capsys.readouterr().err


def test_evolve_zero_pair(tmp_path):
    pair_file = _write(tmp_path, "pair.json", {"peaks": []})
    out = tmp_path / "snap.csv"
    assert main(["evolve", pair_file, "--at", "0.5", "--grid=-1,1,5",
                 "-o", str(out)]) == 0
    rows = out.read_text().strip().split("\n")[1:]
    assert all(float(r.split(",")[2]) == 0.0 for r in rows)


def test_evolve_requires_times(tmp_path):
    pair_file = _write(tmp_path, "pair.json", PEAKON)
    assert main(["evolve", pair_file]) == 2


def test_check_passes_unit_peakon(tmp_path, capsys):
    pair_file = _write(tmp_path, "pair.json", PEAKON)
    assert main(["check", pair_file, "--tol", "1e-9"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["passed"] is True
    assert report["definiteness"]["label"] == "positive"
    assert max(report["trace_residuals"]) < 1e-10


def test_check_zero_pair(tmp_path, capsys):
    pair_file = _write(tmp_path, "pair.json", {"peaks": []})
    assert main(["check", pair_file]) == 0
    assert json.loads(capsys.readouterr().out)["passed"] is True


def test_check_invalid_pair_exits_2(tmp_path):
    pair_file = _write(tmp_path, "pair.json",
                       {"peaks": [{"x": 0.0, "p": 1.0, "h": -1.0}]})
    assert main(["check", pair_file]) == 2


def test_unknown_flag_exits_2(tmp_path):
    pair_file = _write(tmp_path, "pair.json", PEAKON)
    assert main(["direct", pair_file, "--frobnicate"]) == 2


def test_outputs_are_deterministic(tmp_path):
    pair_file = _write(tmp_path, "pair.json",
                       {"peaks": [{"x": -0.5, "p": 0.8, "h": 0.25},
                                  {"x": 0.75, "p": -0.4, "h": 0.0}]})
    out1, out2 = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["direct", pair_file, "-o", str(out1)]) == 0
    assert main(["direct", pair_file, "-o", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
