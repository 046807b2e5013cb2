"""Independent reference computations used by the tests."""

from __future__ import annotations

import math

import numpy as np


def direct_accelerations(masses, positions, G=1.0):
    """Plain double loop over pairs."""
    N = len(masses)
    acc = [[0.0, 0.0] for _ in range(N)]
    for i in range(N):
        for j in range(N):
            if i != j and masses[j] != 0.0:
                dx = positions[j][0] - positions[i][0]
                dy = positions[j][1] - positions[i][1]
                r3 = math.hypot(dx, dy) ** 3
                acc[i][0] += G * masses[j] * dx / r3
                acc[i][1] += G * masses[j] * dy / r3
    return np.array(acc)


def direct_energy(masses, positions, velocities, G=1.0):
    e = 0.0
    for i, m in enumerate(masses):
        e += 0.5 * m * (velocities[i][0] ** 2 + velocities[i][1] ** 2)
        for j in range(i + 1, len(masses)):
            if m and masses[j]:
                e -= G * m * masses[j] / math.dist(positions[i], positions[j])
    return e


def circular_kepler(t, radius=1.0, mu=1.0):
    """Relative position and velocity on a circular two-body orbit started at (radius, 0)."""
    w = math.sqrt(mu / radius**3)
    c, s = math.cos(w * t), math.sin(w * t)
    return np.array([radius * c, radius * s]), np.array([-radius * w * s, radius * w * c])


def phi_matrix(n, k, theta):
    """Dense 4N x 4N matrix of the reversing symmetry, built from its definition."""
    N = 2 * n + k
    c, s = math.cos(theta), math.sin(theta)
    R = np.array([[c, -s], [s, c]])
    Kp = np.diag([1.0, -1.0])
    Kv = np.diag([-1.0, 1.0])
    perm = list(range(N))
    for i in range(n):
        perm[2 * i], perm[2 * i + 1] = 2 * i + 1, 2 * i
    A = np.zeros((4 * N, 4 * N))
    for i in range(N):
        src = perm[i]
        A[2 * i : 2 * i + 2, 2 * src : 2 * src + 2] = R @ Kp
        A[2 * N + 2 * i : 2 * N + 2 * i + 2, 2 * N + 2 * src : 2 * N + 2 * src + 2] = R @ Kv
    return A


def kepler_order_sweep(tols=tuple(10.0 ** -np.arange(6, 13))):
    """Error after one circular period versus median accepted step, per tolerance.

    Returns ``(order, errors, median_steps, step_counts)`` where ``order`` is
    the least-squares slope of log(error) against log(median step).
    """
    from eight4body.dynamics import State, SystemConfig
    from eight4body.integrator import IntegratorSettings, integrate

    cfg = SystemConfig((1.0, 0.0))
    r0, v0 = circular_kepler(0.0)
    s0 = State(0.0, [[0.0, 0.0], r0], [[0.0, 0.0], v0])
    errs, hs, ns = [], [], []
    for tol in tols:
        tr = integrate(cfg, s0, 2 * math.pi, IntegratorSettings(tol, tol))
        errs.append(float(np.max(np.abs(tr.final_state.vector - s0.vector))))
        hs.append(float(np.median(np.diff(tr.ts))))
        ns.append(tr.n_steps)
    order = float(np.polyfit(np.log(hs), np.log(errs), 1)[0])
    return order, np.array(errs), np.array(hs), np.array(ns)
