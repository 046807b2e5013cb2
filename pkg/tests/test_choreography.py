from __future__ import annotations

import json

import numpy as np
import pytest

from eight4body.choreography import (
    ENV_OVERRIDE,
    PRINTED,
    PRINTED_PERIOD,
    RESTRICTED_CONFIG,
    EightConstants,
    closure_residual,
    default_constants,
    eight_initial_state,
    label_from_residuals,
    load_constants,
    primary_configuration_label,
    refine_constants,
    refined_constants,
    restricted_initial_state,
    verify_choreography,
)
from eight4body.errors import AmbiguousLabel, CollisionProximity
from eight4body.symmetry import FixedPointParams, SymmetryDescriptor, fixed_point_embed, is_fixed


def test_printed_values():
    np.testing.assert_array_equal(PRINTED.positions[0], [-0.54050854325, 0.3452633140])
    np.testing.assert_array_equal(PRINTED.positions[2], [1.081017086500, 0.0])
    np.testing.assert_array_equal(PRINTED.velocities[2], [0.0, 0.46720952570])
    assert PRINTED.period == 6.32591398
    assert PRINTED.T_bar == PRINTED.period / 12


def test_centre_of_mass_and_momentum():
    for c in (PRINTED, refined_constants()):
        assert np.max(np.abs(c.positions.sum(axis=0))) < 1e-9
        assert np.max(np.abs(c.velocities.sum(axis=0))) < 1e-9


def test_initial_state_isosceles():
    s = eight_initial_state()
    assert s.positions[2, 1] == 0.0 and s.velocities[2, 0] == 0.0
    assert is_fixed(SymmetryDescriptor(1, 1), s, tol=0.0)


def test_restricted_state_matches_embedding():
    s = restricted_initial_state(0.392064354827005, -2.088580677571261)
    assert s.n_bodies == 4
    assert is_fixed(SymmetryDescriptor(1, 2), s, tol=0.0)
    p = FixedPointParams(PRINTED.positions[:1], PRINTED.velocities[:1],
                         [PRINTED.positions[2, 0], 0.392064354827005],
                         [PRINTED.velocities[2, 1], -2.088580677571261])
    np.testing.assert_array_equal(fixed_point_embed(SymmetryDescriptor(1, 2), p).vector, s.vector)
    assert RESTRICTED_CONFIG.massless.tolist() == [False, False, False, True]


def test_particle_on_primary_rejected():
    with pytest.raises(CollisionProximity):
        restricted_initial_state(1.081017086500, 0.3)


def test_verify_printed():
    rep = verify_choreography()
    assert rep.passed, rep.failures
    assert rep.closure < 1e-6
    assert rep.shift_residual < 1e-5
    assert rep.isosceles[1] < 1e-6
    assert all(r < 1e-6 for r in rep.isosceles.values())
    payload = rep.to_json()
    assert payload["closure"] == rep.closure and payload["passed"]


def test_verify_corrupted_constants_fail():
    bad = EightConstants(PRINTED.positions + [[0.0, 0.0], [0.0, 0.0], [1e-3, 0.0]], PRINTED.velocities,
                         PRINTED.period, source="corrupted")
    rep = verify_choreography(constants=bad)
    assert not rep.passed
    assert any("closure" in f for f in rep.failures)


def test_refined_constants():
    rep = refine_constants(PRINTED)
    assert rep.closure_printed < 1e-6
    assert rep.closure_refined < 1e-9
    assert abs(rep.period_refined - PRINTED_PERIOD) < 1e-7
    assert np.max(np.abs(rep.parameter_change)) < 1e-7
    assert rep.constants.positions[0, 0] == PRINTED.positions[0, 0]
    assert closure_residual(rep.constants) < 1e-9


def test_primary_labels():
    labels = [primary_configuration_label(m) for m in range(7)]
    assert labels[0] == 1
    assert labels[3] == labels[0] and labels[6] == labels[0]
    assert labels[:3] == [1, 2, 3]
    assert labels[1:4] == [primary_configuration_label(m, PRINTED) for m in range(1, 4)]
    with pytest.raises(ValueError):
        primary_configuration_label(-1)


def test_label_separation():
    assert label_from_residuals(np.array([0.5, 1e-9, 0.7])) == 2
    with pytest.raises(AmbiguousLabel):
        label_from_residuals(np.array([1e-9, 2e-9, 0.5]))


def test_constants_file_round_trip(tmp_path, monkeypatch):
    path = tmp_path / "c.json"
    path.write_text(json.dumps(refined_constants().to_json()))
    c = load_constants(path)
    np.testing.assert_array_equal(c.positions, refined_constants().positions)
    assert c.period == refined_constants().period
    monkeypatch.setenv(ENV_OVERRIDE, str(path))
    assert default_constants().source == str(path)
    monkeypatch.delenv(ENV_OVERRIDE)
    assert default_constants() is refined_constants()
    path.write_text(json.dumps({"positions": []}))
    with pytest.raises(ValueError):
        load_constants(path)
