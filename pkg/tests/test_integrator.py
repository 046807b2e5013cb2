from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eight4body.choreography import EIGHT_CONFIG, PRINTED, eight_initial_state
from eight4body.dynamics import State, SystemConfig, total_energy
from eight4body.errors import CollisionProximity, NoSignChange
from eight4body.integrator import IntegratorSettings, find_event, flow, integrate, propagate
from eight4body.symmetry import SymmetryDescriptor, fixed_point_residual
from oracles import circular_kepler, kepler_order_sweep

KEPLER = SystemConfig((1.0, 0.0))


def kepler_state(t=0.0):
    r, v = circular_kepler(t)
    return State(t, [[0.0, 0.0], r], [[0.0, 0.0], v])


def test_circular_kepler_one_period():
    tr = integrate(KEPLER, kepler_state(), 2 * math.pi)
    assert tr.success
    assert np.max(np.abs(tr.final_state.positions - kepler_state().positions)) < 1e-9


@settings(max_examples=30, deadline=None)
@given(t=st.floats(0.0, 2 * math.pi))
def test_dense_output_matches_analytic(t):
    tr = integrate(KEPLER, kepler_state(), 2 * math.pi)
    r, v = circular_kepler(t)
    s = tr(t)
    assert np.max(np.abs(s.positions[1] - r)) < 1e-10
    assert np.max(np.abs(s.velocities[1] - v)) < 1e-10


def test_dense_output_at_step_endpoints():
    tr = integrate(EIGHT_CONFIG, eight_initial_state(), PRINTED.period)
    for i in range(tr.n_steps):
        assert np.max(np.abs(tr.vector_at(tr.ts[i]) - tr.ys[i])) <= 1e-13
        assert np.max(np.abs(tr.vector_at(tr.ts[i + 1]) - tr.ys[i + 1])) <= 1e-13


def test_observed_order():
    order, errs, hs, ns = kepler_order_sweep()
    assert np.all(np.diff(errs) < 0) and np.all(np.diff(ns) > 0)
    assert abs(order - 8) <= 0.5


def test_error_tracks_tolerance():
    _, errs, _, _ = kepler_order_sweep((1e-8, 1e-10, 1e-12))
    ratios = errs[:-1] / errs[1:]
    assert np.all((ratios > 30) & (ratios < 300))


def test_eight_closure_printed_period():
    u0 = eight_initial_state()
    assert np.max(np.abs(flow(EIGHT_CONFIG, u0, PRINTED.period).vector - u0.vector)) < 1e-6


def test_forward_then_backward():
    u0 = eight_initial_state()
    u1 = flow(EIGHT_CONFIG, u0, 3.0)
    back = flow(EIGHT_CONFIG, u1, -3.0)
    assert back.t == pytest.approx(0.0, abs=1e-15)
    assert np.max(np.abs(back.vector - u0.vector)) < 1e-10


def test_flow_zero_and_semigroup():
    u0 = eight_initial_state()
    np.testing.assert_array_equal(flow(EIGHT_CONFIG, u0, 0.0).vector, u0.vector)
    a, b = 1.3, 2.1
    two = flow(EIGHT_CONFIG, flow(EIGHT_CONFIG, u0, a), b)
    one = flow(EIGHT_CONFIG, u0, a + b)
    assert np.max(np.abs(two.vector - one.vector)) < 1e-9


def test_two_tbar_isosceles_again():
    s = flow(EIGHT_CONFIG, eight_initial_state(), 2 * PRINTED.T_bar)
    res = [np.max(np.abs(fixed_point_residual(SymmetryDescriptor(1, 1, perm_index=j), s)))
           for j in (1, 2, 3)]
    assert min(res) < 1e-6


def test_energy_drift_ten_periods():
    u0 = eight_initial_state()
    tr = integrate(EIGHT_CONFIG, u0, 10 * PRINTED.period)
    e0 = total_energy(EIGHT_CONFIG, u0)
    drift = max(abs(total_energy(EIGHT_CONFIG, State.from_vector(y)) - e0) for y in tr.ys)
    assert drift <= 1e-8 * abs(e0)


def test_backward_trajectory_evaluation():
    tr = integrate(KEPLER, kepler_state(), -1.0)
    assert tr.t_end == -1.0
    r, _ = circular_kepler(-0.4)
    assert np.max(np.abs(tr(-0.4).positions[1] - r)) < 1e-10
    with pytest.raises(ValueError):
        tr(0.5)


def test_collision_aborts_with_partial_trajectory():
    cfg = SystemConfig((1.0, 1.0))
    s0 = State(0.0, [[-0.5, 0.0], [0.5, 0.0]], np.zeros((2, 2)))
    with pytest.raises(CollisionProximity) as info:
        integrate(cfg, s0, 10.0)
    part = info.value.trajectory
    assert part is not None and not part.success and part.t_end < 10.0
    tr = integrate(cfg, s0, 10.0, raise_on_failure=False)
    assert tr.status == "collision"
    with pytest.raises(CollisionProximity):
        propagate(cfg, s0.vector, 0.0, 10.0)


def test_settings_validation():
    with pytest.raises(ValueError):
        IntegratorSettings(rel_tol=0.0)
    with pytest.raises(ValueError):
        IntegratorSettings(max_step=-1.0)


def test_max_step_respected():
    tr = integrate(KEPLER, kepler_state(), 2.0, IntegratorSettings(max_step=0.1))
    assert np.max(np.diff(tr.ts)) <= 0.1 + 1e-15


def test_event_sine_root():
    tr = integrate(KEPLER, kepler_state(), 2 * math.pi)
    t = find_event(tr, lambda s: s.positions[1, 1], 3.0)
    assert t == pytest.approx(math.pi, abs=1e-11)
    assert abs(tr(t).positions[1, 1]) < 1e-11


def test_event_without_sign_change():
    tr = integrate(KEPLER, kepler_state(), 2.0)
    with pytest.raises(NoSignChange):
        find_event(tr, lambda s: 2.0 + s.positions[1, 0], 1.0)
