from __future__ import annotations

import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eight4body import io as fio
from eight4body.choreography import RESTRICTED_CONFIG
from eight4body.integrator import integrate
from eight4body.porbits import ContinuationCurve, refine_periodic
from eight4body.table1 import row


def test_records_round_trip_and_reverify(tmp_path, shooter):
    recs = []
    for idx in (2, 15):
        r = row(idx)
        recs.append(refine_periodic(r.x4, r.vy4, r.T0_over_Tbar // 2, shooter=shooter, index=idx))
    path = tmp_path / "r.jsonl"
    assert fio.write_records(path, recs) == 2
    lines = path.read_text().splitlines()
    assert list(json.loads(lines[0])) == list(fio.RECORD_FIELDS)
    back = fio.read_records(path)
    for rec, obj in zip(recs, back):
        assert obj["x4"] == rec.x4 and obj["vy4"] == rec.vy4
        again = refine_periodic(obj["x4"], obj["vy4"], obj["T0_over_Tbar"] // 2, shooter=shooter)
        assert again.iterations == 0
        assert abs(again.res_y - obj["res_y"]) < 1e-9 and abs(again.res_vx - obj["res_vx"]) < 1e-9
        assert abs(again.res_closure - obj["res_closure"]) < 1e-9


def test_records_reject_foreign_fields(tmp_path):
    path = tmp_path / "bad.jsonl"
    path.write_text(json.dumps({"index": 1}) + "\n")
    with pytest.raises(ValueError):
        fio.read_records(path)


def test_curve_round_trip(tmp_path):
    c = ContinuationCurve("cy", 10, [np.array([3.3, 1.0, 10.5]), np.array([3.31, 0.99, 10.5])],
                          [np.array([1e-12, 2e-3]), np.array([-3e-12, 1e-3])], [0.0, 0.01])
    r = ContinuationCurve("cr", None, [np.array([2.5, 1.1, 6.3])], [np.array([0.0, 0.0])], [0.0])
    path = tmp_path / "c.csv"
    assert fio.write_curves(path, [c, r]) == 3
    assert path.read_text().splitlines()[0] == "family,p,x40,vy40,T0,res1,res2"
    back = fio.read_curves(path)
    np.testing.assert_array_equal(back[("cy", 10)][:, :3], c.array)
    np.testing.assert_array_equal(back[("cy", 10)][:, 3:], np.array(c.residuals))
    assert ("cr", None) in back


def test_empty_curve_file_has_header(tmp_path):
    path = tmp_path / "e.csv"
    assert fio.write_curves(path, [ContinuationCurve("cy", 10)]) == 0
    assert path.read_text() == "family,p,x40,vy40,T0,res1,res2\n"
    assert fio.read_curves(path) == {}


@settings(max_examples=100, deadline=None)
@given(t1=st.floats(1e-3, 100.0), step=st.floats(1e-3, 200.0))
def test_sample_times_include_endpoints(t1, step):
    ts = fio.sample_times(0.0, t1, step)
    assert ts[0] == 0.0 and ts[-1] == t1
    assert np.all(np.diff(ts) > 0)
    assert np.all(np.diff(ts)[:-1] == pytest.approx(step))
    full = math.floor(t1 / step + 1e-9)
    lands_on_end = abs(full * step - t1) <= 1e-12 * max(1.0, t1)
    assert len(ts) == full + (1 if lands_on_end else 2)


def test_trajectory_round_trip(tmp_path, shooter):
    r = row(2)
    s0 = shooter.initial(r.x4, r.vy4)
    tr = integrate(RESTRICTED_CONFIG, s0, 12 * shooter.T_bar)
    path = tmp_path / "t.csv"
    table = fio.write_trajectory(path, tr, 0.5)
    header, data = fio.read_trajectory(path)
    assert header[:5] == ["t", "x1", "y1", "vx1", "vy1"] and header[-1] == "vy4"
    np.testing.assert_array_equal(data, table)
    u = fio.table_to_vectors(data)
    np.testing.assert_array_equal(u[0], s0.vector)
    np.testing.assert_allclose(u[-1], tr.final_state.vector, rtol=0, atol=1e-15)
    with pytest.raises(ValueError):
        fio.sample_times(0.0, 1.0, 0.0)
