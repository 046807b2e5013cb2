"""Adaptive DOP853 integration of the N-body field with dense output.

The stepping loop is compiled (see ``_kernels``); this module wraps it in
``Trajectory`` objects and adds event location on the interpolant.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import _kernels
from .dynamics import DELTA_COLL, State, SystemConfig
from .errors import CollisionProximity, DimensionMismatch, NoSignChange, StepSizeUnderflow

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class IntegratorSettings:
    rel_tol: float = 1e-12
    abs_tol: float = 1e-12
    max_step: float = math.inf
    method_order: int = 8

    def __post_init__(self) -> None:
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("tolerances must be positive")
        if not self.max_step > 0:
            raise ValueError("max_step must be positive")


DEFAULT_SETTINGS = IntegratorSettings()


class Trajectory:
    """Accepted steps of one integration plus their degree-7 interpolants.

    Calling the trajectory at a time inside its span returns a ``State``.
    ``status`` is ``"ok"``, ``"collision"`` or ``"underflow"``; a failed
    integration keeps the steps accepted before the failure.
    """

    def __init__(self, config: SystemConfig, ts, ys, coeffs, status: str = "ok",
                 min_distance: float = math.inf, n_rejected: int = 0, nfev: int = 0):
        self.config = config
        self.ts = np.asarray(ts)
        self.ys = np.asarray(ys)
        self.coeffs = np.asarray(coeffs)
        self.status = status
        self.min_distance = min_distance
        self.n_rejected = n_rejected
        self.nfev = nfev
        self._forward = self.ts[-1] >= self.ts[0]

    @property
    def success(self) -> bool:
        return self.status == "ok"

    @property
    def t_start(self) -> float:
        return float(self.ts[0])

    @property
    def t_end(self) -> float:
        return float(self.ts[-1])

    @property
    def n_steps(self) -> int:
        return len(self.ts) - 1

    @property
    def final_state(self) -> State:
        return State.from_vector(self.ys[-1], self.t_end)

    def _segment(self, t: float) -> int:
        lo, hi = sorted((self.t_start, self.t_end))
        if not (lo - 1e-12 * max(1.0, abs(hi)) <= t <= hi + 1e-12 * max(1.0, abs(hi))):
            raise ValueError(f"t={t} outside trajectory span [{lo}, {hi}]")
        if self._forward:
            i = int(np.searchsorted(self.ts, t, side="right")) - 1
        else:
            i = int(np.searchsorted(-self.ts, -t, side="right")) - 1
        return min(max(i, 0), self.n_steps - 1)

    def vector_at(self, t: float) -> np.ndarray:
        if self.n_steps == 0:
            return self.ys[0].copy()
        i = self._segment(t)
        h = self.ts[i + 1] - self.ts[i]
        return _kernels.dense_eval(self.ts[i], h, self.ys[i], self.coeffs[i], float(t))

    def __call__(self, t: float) -> State:
        return State.from_vector(self.vector_at(t), t)

    def sample(self, times) -> np.ndarray:
        """Phase vectors at ``times``, shape ``(len(times), 4N)``."""
        return np.array([self.vector_at(t) for t in np.atleast_1d(times)])


_STATUS = {
    _kernels.STATUS_OK: "ok",
    _kernels.STATUS_COLLISION: "collision",
    _kernels.STATUS_UNDERFLOW: "underflow",
}

#: A step-size underflow while two bodies are closer than this is a collision.
UNDERFLOW_COLLISION_DISTANCE = 1e-4


def _status(code: int, dmin: float) -> str:
    status = _STATUS[code]
    if status == "underflow" and dmin < UNDERFLOW_COLLISION_DISTANCE:
        return "collision"
    return status


def _raise_for(status: str, t: float, dmin: float, traj: Trajectory | None = None):
    if status == "collision":
        err = CollisionProximity(f"collision guard tripped near t={t:.6g} (distance {dmin:.3e})", dmin, t)
    else:
        err = StepSizeUnderflow(f"step size underflow near t={t:.6g}")
    err.trajectory = traj
    raise err


def integrate(config: SystemConfig, s0: State, t_end: float,
              settings: IntegratorSettings = DEFAULT_SETTINGS, *,
              raise_on_failure: bool = True) -> Trajectory:
    """Integrate from ``s0.t`` to ``t_end`` keeping dense output.

    On collision or step underflow the partial trajectory is attached to the
    raised exception as ``.trajectory``, or returned with a failure status
    when ``raise_on_failure`` is false.
    """
    if s0.n_bodies != config.n_bodies:
        raise DimensionMismatch("state and config disagree on N")
    res = _kernels.integrate_kernel(
        s0.vector, s0.t, float(t_end), config.mass_array, config.G,
        settings.rel_tol, settings.abs_tol, settings.max_step, DELTA_COLL, True, 0.0,
    )
    code, t, _, dmin, _, n_rej, nfev, ts, ys, coeffs = res
    status = _status(code, dmin)
    traj = Trajectory(config, ts, ys, coeffs, status, dmin, n_rej, nfev)
    if status != "ok" and raise_on_failure:
        _raise_for(status, t, dmin, traj)
    return traj


def propagate(config: SystemConfig, u0: np.ndarray, t0: float, t1: float,
              settings: IntegratorSettings = DEFAULT_SETTINGS) -> tuple[np.ndarray, float]:
    """Endpoint-only integration on raw phase vectors.

    Returns ``(u(t1), min pairwise distance seen)``. This is the hot path of
    every shooting problem, so nothing is stored along the way.
    """
    res = _kernels.integrate_kernel(
        np.ascontiguousarray(u0, dtype=np.float64), float(t0), float(t1), config.mass_array,
        config.G, settings.rel_tol, settings.abs_tol, settings.max_step, DELTA_COLL, False, 0.0,
    )
    code, t, y, dmin = res[0], res[1], res[2], res[3]
    if code != _kernels.STATUS_OK:
        _raise_for(_status(code, dmin), t, dmin)
    return y, dmin


def flow(config: SystemConfig, s0: State, T: float,
         settings: IntegratorSettings = DEFAULT_SETTINGS) -> State:
    """State reached after time ``T`` (negative ``T`` integrates backward)."""
    if T == 0:
        return s0.replace()
    y, _ = propagate(config, s0.vector, s0.t, s0.t + T, settings)
    return State.from_vector(y, s0.t + T)


def find_event(traj: Trajectory, event: Callable[[State], float], t_guess: float,
               tol: float = 1e-11, max_segments: int = 64) -> float:
    """Root of ``event(traj(t))`` closest to ``t_guess``.

    Steps outward from the segment containing ``t_guess`` until a sign
    change is bracketed, then runs Newton safeguarded by bisection.
    """
    g = lambda t: float(event(traj(t)))  # noqa: E731
    ts = traj.ts
    i0 = traj._segment(t_guess)
    bracket = None
    for off in range(max_segments):
        for i in {i0 - off, i0 + off}:
            if 0 <= i < traj.n_steps:
                a, b = float(ts[i]), float(ts[i + 1])
                ga, gb = g(a), g(b)
                if ga == 0.0:
                    return a
                if gb == 0.0:
                    return b
                if ga * gb < 0:
                    bracket = (a, b, ga)
                    break
        if bracket:
            break
    if bracket is None:
        raise NoSignChange(f"event has no sign change within {max_segments} steps of t={t_guess}")
    a, b, ga = bracket
    t = 0.5 * (a + b)
    for _ in range(100):
        gt = g(t)
        if abs(gt) < tol:
            return t
        if (gt < 0) == (ga < 0):
            a, ga = t, gt
        else:
            b = t
        dt = 1e-7 * max(abs(b - a), 1e-12)
        slope = (g(t + dt) - g(t - dt)) / (2 * dt)
        t_new = t - gt / slope if slope != 0 else 0.5 * (a + b)
        if not (min(a, b) < t_new < max(a, b)):
            t_new = 0.5 * (a + b)
        if abs(t_new - t) < 1e-16 * max(1.0, abs(t)):
            return t_new
        t = t_new
    logger.warning("find_event stopped after 100 iterations with |g| = %.3e", abs(g(t)))
    return t
