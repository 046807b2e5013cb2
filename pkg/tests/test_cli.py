from __future__ import annotations

import json
import subprocess
import sys

import numpy as np
import pytest

from eight4body import io as fio
from eight4body.choreography import PRINTED
from eight4body.cli import main, parse_rows
from eight4body.table1 import row


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_verify_eight_default(capsys):
    code, out, _ = run(capsys, "verify-eight")
    assert code == 0
    assert "closure" in out and out.strip().endswith("PASS")


def test_verify_eight_json_matches_text(capsys):
    code, out, _ = run(capsys, "verify-eight", "--json", "--refine")
    assert code == 0
    payload = json.loads(out)
    assert payload["closure"] < 1e-6 and payload["refined_closure"] < 1e-9
    _, text, _ = run(capsys, "verify-eight")
    assert f"{payload['closure']:.3e}" in text


def test_verify_eight_corrupted_override(capsys, tmp_path, monkeypatch):
    data = PRINTED.to_json()
    data["velocities"][2][1] += 1e-3
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(data))
    code, out, _ = run(capsys, "verify-eight", "--constants", str(path))
    assert code == 1 and "FAIL closure" in out
    monkeypatch.setenv("CHOREO_CONSTANTS", str(path))
    code, _, _ = run(capsys, "verify-eight")
    assert code == 1


def test_table1_single_row(capsys, tmp_path):
    rec = tmp_path / "r.jsonl"
    out = tmp_path / "t.txt"
    code, text, _ = run(capsys, "table1", "--rows", "15", "--records", str(rec), "--out", str(out),
                        "--jobs", "1", "--plot")
    assert code == 0
    assert "1/1" in text and "matches" in text
    (obj,) = fio.read_records(rec)
    assert obj["index"] == 15 and obj["T_over_Tbar"] == 120
    assert abs(obj["x4"] - row(15).x4) < 1e-6 and max(obj["res_y"], obj["res_vx"]) < 1e-8
    assert (tmp_path / "r.png").stat().st_size > 0


def test_table1_failing_row_exit_code(capsys):
    code, text, _ = run(capsys, "table1", "--rows", "3", "--jobs", "1", "--no-closure")
    assert code == 1 and "0/1" in text


def test_usage_errors(capsys):
    for argv in (["table1", "--rows", "99"], ["table1", "--rows", "x"], ["orbit", "--x40", "1"],
                 ["trace", "--p", "0", "--x40", "1", "--vy40-guess", "1"], ["bogus"], ["verify-eight", "--nope"],
                 ["kepler-seed", "--m", "10"]):
        with pytest.raises(SystemExit) as info:
            code = main(argv)
            raise SystemExit(code)
        assert info.value.code == 64, argv
        capsys.readouterr()


def test_parse_rows():
    assert parse_rows("1-3,9,3") == [1, 2, 3, 9]


def test_trace_zero_points(capsys, tmp_path):
    out = tmp_path / "c.csv"
    code, _, _ = run(capsys, "trace", "--family", "cy", "--p", "10", "--x40", "3.33", "--vy40-guess", "1.0",
                     "--max-points", "0", "--out", str(out))
    assert code == 0
    assert out.read_text() == "family,p,x40,vy40,T0,res1,res2\n"


def test_trace_cy_contains_row15(capsys, tmp_path):
    out = tmp_path / "c.csv"
    code, _, _ = run(capsys, "trace", "--family", "cy", "--p", "10", "--x40", "3.33", "--vy40-guess", "1.0",
                     "--max-points", "4", "--direction", "0", "--out", str(out), "--plot")
    assert code == 0
    pts = fio.read_curves(out)[("cy", 10)]
    r = row(15)
    order = np.argsort(pts[:, 0])
    vy = np.interp(r.x4, pts[order, 0], pts[order, 1])
    assert abs(vy - r.vy4) < 1e-6
    assert (tmp_path / "c.png").exists()


def test_trace_intersection_reported(capsys, tmp_path):
    code, out, _ = run(capsys, "trace", "--family", "cy", "--family", "cvx", "--p", "10", "--x40", "3.30",
                       "--vy40-guess", "1.0", "--max-points", "8", "--out", str(tmp_path / "c.csv"))
    assert code == 0
    line = [s for s in out.splitlines() if s.startswith("# point")]
    assert len(line) == 1
    x = float(line[0].split("x40=")[1].split()[0])
    assert abs(x - row(15).x4) < 1e-8


def test_trace_seed_failure_exit_code(capsys):
    code, _, err = run(capsys, "trace", "--family", "cvx", "--p", "10", "--x40", "3.0", "--vy40-guess", "50",
                       "--max-points", "3")
    assert code == 3 and "no convergence" in err


def test_orbit_row9(capsys, tmp_path):
    r = row(9)
    out = tmp_path / "o.csv"
    code, text, _ = run(capsys, "orbit", "--x40", repr(r.x4), "--vy40", repr(r.vy4), "--m", "4",
                        "--sample-step", "1", "--out", str(out))
    assert code == 0 and "T=48 Tbar" in text
    header, data = fio.read_trajectory(out)
    assert len(header) == 17
    assert data[-1, 0] == pytest.approx(48 * PRINTED.T_bar, rel=1e-8)
    u = fio.table_to_vectors(data)
    assert np.max(np.abs(u[-1, [6, 7, 14, 15]] - u[0, [6, 7, 14, 15]])) < 1e-6


def test_orbit_large_sample_step_keeps_endpoints(capsys, tmp_path):
    r = row(2)
    out = tmp_path / "o.csv"
    code, _, _ = run(capsys, "orbit", "--x40", repr(r.x4), "--vy40", repr(r.vy4), "--m", "3",
                     "--sample-step", "1000", "--out", str(out))
    assert code == 0
    _, data = fio.read_trajectory(out)
    assert len(data) == 2 and data[0, 0] == 0.0


def test_orbit_collision_exit_code(capsys):
    code, _, err = run(capsys, "orbit", "--x40", "1.081017086500", "--vy40", "0.5", "--m", "1")
    assert code == 4 and "collision" in err


def test_kepler_seed(capsys):
    code, out, _ = run(capsys, "kepler-seed", "--m", "10", "--x4", "3.328354859295013")
    assert code == 0 and "refined" not in out
    code, out, _ = run(capsys, "kepler-seed", "--m", "10", "--x4", "3.328354859295013", "--refine")
    assert code == 0
    x = float(out.split("refined x40=")[1].split()[0])
    assert abs(x - row(15).x4) < 1e-6


def test_kepler_seed_domain(capsys):
    code, _, err = run(capsys, "kepler-seed", "--m", "1", "--x4", "50")
    assert code == 5 and "domain" in err
    code, _, _ = run(capsys, "kepler-seed", "--m", "1", "--e", "1.5")
    assert code == 5


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "eight4body", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and "eight4body" in res.stdout
