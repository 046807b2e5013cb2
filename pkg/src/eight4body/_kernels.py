"""Compiled inner loops: the gravitational field and the DOP853 stepper.

Everything here works on flat float64 vectors ``u = (r_1..r_N, v_1..v_N)``
and returns status codes instead of raising, so it can run under numba.
"""

from __future__ import annotations

import numpy as np
from numba import njit
from scipy.integrate._ivp import dop853_coefficients as _dop

STATUS_OK = 0
STATUS_COLLISION = 1
STATUS_UNDERFLOW = 2

N_STAGES = _dop.N_STAGES
N_STAGES_EXT = _dop.N_STAGES_EXTENDED
INTERP_POWER = _dop.INTERPOLATOR_POWER

A = np.ascontiguousarray(_dop.A, dtype=np.float64)
B = np.ascontiguousarray(_dop.B, dtype=np.float64)
C = np.ascontiguousarray(_dop.C, dtype=np.float64)
E3 = np.ascontiguousarray(_dop.E3, dtype=np.float64)
E5 = np.ascontiguousarray(_dop.E5, dtype=np.float64)
D = np.ascontiguousarray(_dop.D, dtype=np.float64)

SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 10.0
ERROR_EXPONENT = -1.0 / 8.0


@njit(cache=True)
def accel_into(u, masses, G, out):
    """Write the velocity-block derivative of ``u`` into ``out[2N:]``.

    Returns the minimum distance over pairs with at least one massive body.
    """
    n = masses.shape[0]
    off = 2 * n
    for i in range(n):
        out[off + 2 * i] = 0.0
        out[off + 2 * i + 1] = 0.0
    dmin = np.inf
    for i in range(n):
        xi = u[2 * i]
        yi = u[2 * i + 1]
        mi = masses[i]
        for j in range(i + 1, n):
            mj = masses[j]
            if mi == 0.0 and mj == 0.0:
                continue
            dx = u[2 * j] - xi
            dy = u[2 * j + 1] - yi
            r2 = dx * dx + dy * dy
            r = np.sqrt(r2)
            if r < dmin:
                dmin = r
            if r2 == 0.0:
                # coincident bodies: the caller sees dmin = 0 and aborts
                continue
            inv3 = G / (r2 * r)
            if mj != 0.0:
                out[off + 2 * i] += mj * dx * inv3
                out[off + 2 * i + 1] += mj * dy * inv3
            if mi != 0.0:
                out[off + 2 * j] -= mi * dx * inv3
                out[off + 2 * j + 1] -= mi * dy * inv3
    return dmin


@njit(cache=True)
def rhs_into(u, masses, G, out):
    n = masses.shape[0]
    for i in range(2 * n):
        out[i] = u[2 * n + i]
    return accel_into(u, masses, G, out)


@njit(cache=True)
def _rms_scaled(v, scale):
    s = 0.0
    for i in range(v.shape[0]):
        q = v[i] / scale[i]
        s += q * q
    return s


@njit(cache=True)
def _initial_step(y0, f0, t_span, masses, G, rtol, atol, max_step, direction):
    dim = y0.shape[0]
    scale = atol + np.abs(y0) * rtol
    d0 = np.sqrt(_rms_scaled(y0, scale) / dim)
    d1 = np.sqrt(_rms_scaled(f0, scale) / dim)
    if d0 < 1e-5 or d1 < 1e-5:
        h0 = 1e-6
    else:
        h0 = 0.01 * d0 / d1
    h0 = min(h0, t_span)
    y1 = y0 + h0 * direction * f0
    f1 = np.empty(dim)
    rhs_into(y1, masses, G, f1)
    d2 = np.sqrt(_rms_scaled(f1 - f0, scale) / dim) / h0
    if d1 <= 1e-15 and d2 <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1.0 / 8.0)
    return min(100.0 * h0, h1, t_span, max_step)


@njit(cache=True)
def _attempt(y, f, h, masses, G, K, ynew, delta_coll):
    """One DOP853 trial step. Fills ``K[0..12]`` and ``ynew``.

    Returns (min distance seen over the stages, collided flag).
    """
    dim = y.shape[0]
    tmp = np.empty(dim)
    for i in range(dim):
        K[0, i] = f[i]
    dmin = np.inf
    for s in range(1, N_STAGES):
        for i in range(dim):
            acc = 0.0
            for q in range(s):
                acc += A[s, q] * K[q, i]
            tmp[i] = y[i] + h * acc
        d = rhs_into(tmp, masses, G, K[s])
        if d < dmin:
            dmin = d
        if d < delta_coll:
            return dmin, True
    for i in range(dim):
        acc = 0.0
        for q in range(N_STAGES):
            acc += B[q] * K[q, i]
        ynew[i] = y[i] + h * acc
    d = rhs_into(ynew, masses, G, K[N_STAGES])
    if d < dmin:
        dmin = d
    return dmin, d < delta_coll


@njit(cache=True)
def _error_norm(K, h, y, ynew, rtol, atol):
    dim = y.shape[0]
    e5 = 0.0
    e3 = 0.0
    for i in range(dim):
        sc = atol + max(abs(y[i]), abs(ynew[i])) * rtol
        a5 = 0.0
        a3 = 0.0
        for q in range(N_STAGES + 1):
            a5 += E5[q] * K[q, i]
            a3 += E3[q] * K[q, i]
        a5 /= sc
        a3 /= sc
        e5 += a5 * a5
        e3 += a3 * a3
    if e5 == 0.0 and e3 == 0.0:
        return 0.0
    return abs(h) * e5 / np.sqrt((e5 + 0.01 * e3) * dim)


@njit(cache=True)
def _dense_coeffs(t_old, y_old, y_new, f_new, h, masses, G, K, F):
    """Extra stages and the 7 interpolant rows for the last accepted step."""
    dim = y_old.shape[0]
    tmp = np.empty(dim)
    for s in range(N_STAGES + 1, N_STAGES_EXT):
        for i in range(dim):
            acc = 0.0
            for q in range(s):
                acc += A[s, q] * K[q, i]
            tmp[i] = y_old[i] + h * acc
        rhs_into(tmp, masses, G, K[s])
    for i in range(dim):
        dy = y_new[i] - y_old[i]
        F[0, i] = dy
        F[1, i] = h * K[0, i] - dy
        F[2, i] = 2.0 * dy - h * (f_new[i] + K[0, i])
        for r in range(INTERP_POWER - 3):
            acc = 0.0
            for q in range(N_STAGES_EXT):
                acc += D[r, q] * K[q, i]
            F[3 + r, i] = h * acc


@njit(cache=True)
def integrate_kernel(y0, t0, t1, masses, G, rtol, atol, max_step, delta_coll, store, first_step):
    """Adaptive DOP853 from ``t0`` to ``t1`` (either direction).

    Returns ``(status, t, y, min_dist, n_accepted, n_rejected, nfev, ts, ys, Fs)``;
    the last three are filled only when ``store`` is true.
    """
    dim = y0.shape[0]
    direction = 1.0 if t1 >= t0 else -1.0
    t_span = abs(t1 - t0)
    y = y0.copy()
    f = np.empty(dim)
    dmin = rhs_into(y, masses, G, f)
    nfev = 1

    cap = 256 if store else 1
    ts = np.empty(cap)
    ys = np.empty((cap, dim))
    Fs = np.empty((cap, INTERP_POWER, dim))
    ts[0] = t0
    ys[0, :] = y
    n_acc = 0
    n_rej = 0

    if dmin < delta_coll:
        return STATUS_COLLISION, t0, y, dmin, n_acc, n_rej, nfev, ts[:1], ys[:1], Fs[:0]
    if t_span == 0.0:
        return STATUS_OK, t0, y, dmin, n_acc, n_rej, nfev, ts[:1], ys[:1], Fs[:0]

    if first_step > 0.0:
        h_abs = min(first_step, t_span, max_step)
    else:
        h_abs = _initial_step(y, f, t_span, masses, G, rtol, atol, max_step, direction)
        nfev += 1

    K = np.empty((N_STAGES_EXT, dim))
    ynew = np.empty(dim)
    t = t0
    min_step_span = 1e-14 * t_span
    status = STATUS_OK
    while direction * (t1 - t) > 0.0:
        min_step = max(10.0 * abs(np.nextafter(t, direction * np.inf) - t), min_step_span)
        if h_abs > max_step:
            h_abs = max_step
        rejected = False
        while True:
            if h_abs < min_step:
                status = STATUS_UNDERFLOW
                break
            h = h_abs * direction
            t_new = t + h
            if direction * (t_new - t1) > 0.0:
                t_new = t1
            h = t_new - t
            h_abs = abs(h)
            dstep, collided = _attempt(y, f, h, masses, G, K, ynew, delta_coll)
            nfev += N_STAGES
            if collided:
                # shrink and retry: a large trial step may probe a spurious close pass
                if h_abs <= 16.0 * min_step:
                    status = STATUS_COLLISION
                    if dstep < dmin:
                        dmin = dstep
                    break
                h_abs *= 0.25
                rejected = True
                n_rej += 1
                continue
            err = _error_norm(K, h, y, ynew, rtol, atol)
            if err < 1.0:
                if err == 0.0:
                    factor = MAX_FACTOR
                else:
                    factor = min(MAX_FACTOR, SAFETY * err ** ERROR_EXPONENT)
                if rejected:
                    factor = min(1.0, factor)
                if dstep < dmin:
                    dmin = dstep
                break
            h_abs *= max(MIN_FACTOR, SAFETY * err ** ERROR_EXPONENT)
            rejected = True
            n_rej += 1
        if status != STATUS_OK:
            break
        if store:
            if n_acc + 1 >= cap:
                cap2 = cap * 2
                ts2 = np.empty(cap2)
                ys2 = np.empty((cap2, dim))
                Fs2 = np.empty((cap2, INTERP_POWER, dim))
                ts2[:cap] = ts
                ys2[:cap] = ys
                Fs2[:cap] = Fs
                ts = ts2
                ys = ys2
                Fs = Fs2
                cap = cap2
            _dense_coeffs(t, y, ynew, K[N_STAGES], h, masses, G, K, Fs[n_acc])
            nfev += N_STAGES_EXT - N_STAGES - 1
        for i in range(dim):
            f[i] = K[N_STAGES, i]
            y[i] = ynew[i]
        t = t_new
        n_acc += 1
        if store:
            ts[n_acc] = t
            ys[n_acc, :] = y
        h_abs *= factor
    m = n_acc + 1 if store else 1
    if not store:
        ts[0] = t
        ys[0, :] = y
    return status, t, y, dmin, n_acc, n_rej, nfev, ts[:m], ys[:m], Fs[: (n_acc if store else 0)]


@njit(cache=True)
def dense_eval(t_old, h, y_old, F, t):
    x = (t - t_old) / h
    dim = y_old.shape[0]
    y = np.zeros(dim)
    p = F.shape[0]
    for idx in range(p):
        r = p - 1 - idx
        for i in range(dim):
            y[i] += F[r, i]
        if idx % 2 == 0:
            for i in range(dim):
                y[i] *= x
        else:
            for i in range(dim):
                y[i] *= 1.0 - x
    for i in range(dim):
        y[i] += y_old[i]
    return y
