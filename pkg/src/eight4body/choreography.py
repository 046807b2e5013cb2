"""Figure-eight primaries and the restricted four-body initial states.

Units: ``G = 1``, unit masses, period ``T = 12 * Tbar``. Isosceles
configurations recur every ``2 * Tbar``.
"""

from __future__ import annotations

import functools
import json
import logging
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dynamics import DELTA_COLL, State, SystemConfig
from .errors import AmbiguousLabel, CollisionProximity
from .integrator import DEFAULT_SETTINGS, IntegratorSettings, integrate, propagate
from .symmetry import FixedPointParams, SymmetryDescriptor, fixed_point_embed, fixed_point_residual

logger = logging.getLogger(__name__)

PRINTED_PERIOD = 6.32591398
ENV_OVERRIDE = "CHOREO_CONSTANTS"

EIGHT_CONFIG = SystemConfig((1.0, 1.0, 1.0), n=1, k=1)
RESTRICTED_CONFIG = SystemConfig((1.0, 1.0, 1.0, 0.0), n=1, k=2)


@dataclass(frozen=True, eq=False)
class EightConstants:
    positions: np.ndarray
    velocities: np.ndarray
    period: float
    source: str = "printed"

    def __post_init__(self) -> None:
        pos = np.array(self.positions, dtype=float).reshape(3, 2)
        vel = np.array(self.velocities, dtype=float).reshape(3, 2)
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "velocities", vel)
        object.__setattr__(self, "period", float(self.period))

    @property
    def T_bar(self) -> float:
        return self.period / 12.0

    def to_json(self) -> dict:
        return {
            "positions": self.positions.tolist(),
            "velocities": self.velocities.tolist(),
            "period": self.period,
        }


PRINTED = EightConstants(
    positions=[(-0.54050854325, 0.3452633140), (-0.54050854325, -0.3452633140), (1.081017086500, 0.0)],
    velocities=[(1.0971223818, -0.23360476285), (-1.0971223818, -0.23360476285), (0.0, 0.46720952570)],
    period=PRINTED_PERIOD,
)


def load_constants(path: str | os.PathLike) -> EightConstants:
    """Read a ``{"positions", "velocities", "period"}`` override file."""
    data = json.loads(Path(path).read_text())
    missing = {"positions", "velocities", "period"} - data.keys()
    if missing:
        raise ValueError(f"constants file {path} lacks {sorted(missing)}")
    return EightConstants(data["positions"], data["velocities"], data["period"], source=str(path))


def eight_initial_state(constants: EightConstants = PRINTED) -> State:
    return State(0.0, constants.positions, constants.velocities)


def restricted_initial_state(x40: float, vy40: float, constants: EightConstants = PRINTED) -> State:
    """Primaries at the initial isosceles configuration, massless body 4 at
    ``(x40, 0)`` with velocity ``(0, vy40)``; the state lies in Fix(Phi_{0,1})."""
    c = constants
    params = FixedPointParams(
        pair_positions=c.positions[:1],
        pair_velocities=c.velocities[:1],
        free_x=[c.positions[2, 0], x40],
        free_vy=[c.velocities[2, 1], vy40],
    )
    s = fixed_point_embed(SymmetryDescriptor(1, 2), params)
    d = np.hypot(*(s.positions[:3] - s.positions[3]).T).min()
    if d <= DELTA_COLL:
        raise CollisionProximity(f"test particle at x40={x40} sits on a primary", float(d), 0.0)
    if not np.allclose(s.positions[:3], c.positions, rtol=0, atol=0) or not np.allclose(
        s.velocities[:3], c.velocities, rtol=0, atol=0
    ):
        raise ValueError("choreography constants are not in Fix(Phi_{0,1})")
    return s


# --- refinement ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RefinementReport:
    constants: EightConstants
    period_printed: float
    period_refined: float
    parameter_change: np.ndarray
    closure_printed: float
    closure_refined: float
    iterations: int


def _symmetric_eight(x1: float, y1: float, vx1: float, vy1: float) -> np.ndarray:
    # centre of mass and total momentum pinned at zero
    return np.array([x1, y1, x1, -y1, -2 * x1, 0.0, vx1, vy1, -vx1, vy1, 0.0, -2 * vy1])


def refine_constants(constants: EightConstants = PRINTED,
                     settings: IntegratorSettings = DEFAULT_SETTINGS,
                     tol: float = 1e-13, max_iter: int = 8) -> RefinementReport:
    """Tighten the printed data to a symmetric periodic orbit.

    Keeps ``x_1`` and solves for ``(y_1, vx_1, vy_1, T/2)`` such that the
    state at ``T/2`` is back in Fix(Phi_{0,1}) (``x_1 = x_2``,
    ``vy_1 = vy_2``, ``y_3 = 0``, ``vx_3 = 0``). The other coordinates
    follow from the symmetry and zero momentum.
    """
    x1 = constants.positions[0, 0]

    def g(q):
        u = _symmetric_eight(x1, *q[:3])
        e, _ = propagate(EIGHT_CONFIG, u, 0.0, q[3], settings)
        return np.array([e[0] - e[2], e[7] - e[9], e[5], e[10]])

    q0 = np.array([constants.positions[0, 1], *constants.velocities[0], constants.period / 2])
    q = q0.copy()
    it = 0
    r = g(q)
    while np.max(np.abs(r)) > tol and it < max_iter:
        J = np.empty((4, 4))
        for i in range(4):
            h = 1e-7 * max(1.0, abs(q[i]))
            dq = np.zeros(4)
            dq[i] = h
            J[:, i] = (g(q + dq) - g(q - dq)) / (2 * h)
        q_new = q - np.linalg.solve(J, r)
        r_new = g(q_new)
        it += 1
        if np.max(np.abs(r_new)) >= np.max(np.abs(r)):
            break
        q, r = q_new, r_new
    u = _symmetric_eight(x1, *q[:3])
    refined = EightConstants(u[:6], u[6:], 2 * q[3], source=f"refined from {constants.source}")
    return RefinementReport(
        constants=refined,
        period_printed=constants.period,
        period_refined=refined.period,
        parameter_change=q - q0,
        closure_printed=closure_residual(constants, settings=settings),
        closure_refined=closure_residual(refined, settings=settings),
        iterations=it,
    )


@functools.lru_cache(maxsize=None)
def refined_constants() -> EightConstants:
    """Refinement of the printed constants, computed once per process."""
    rep = refine_constants(PRINTED)
    logger.info("refined choreography period %.15f (printed %.8f)", rep.period_refined, rep.period_printed)
    return rep.constants


def default_constants() -> EightConstants:
    """Constants used when none are passed explicitly.

    ``$CHOREO_CONSTANTS`` names an override file used verbatim; otherwise
    the refined version of the printed data.
    """
    path = os.environ.get(ENV_OVERRIDE)
    if path:
        return load_constants(path)
    return refined_constants()


# --- verification -------------------------------------------------------------------------


def closure_residual(constants: EightConstants = PRINTED, period: float | None = None,
                     settings: IntegratorSettings = DEFAULT_SETTINGS) -> float:
    T = constants.period if period is None else period
    u0 = eight_initial_state(constants).vector
    u1, _ = propagate(EIGHT_CONFIG, u0, 0.0, T, settings)
    return float(np.max(np.abs(u1 - u0)))


def _fix_residuals(s: State) -> np.ndarray:
    return np.array([
        np.max(np.abs(fixed_point_residual(SymmetryDescriptor(1, s.n_bodies - 2, perm_index=j), s)))
        for j in (1, 2, 3)
    ])


def label_from_residuals(res: np.ndarray, separation: float = 1e-6) -> int:
    """Index ``j`` (1-based) of the smallest residual; ambiguous ties raise."""
    order = np.argsort(res)
    if res[order[1]] - res[order[0]] < separation:
        raise AmbiguousLabel(f"Fix residuals {res} do not single out one configuration")
    return int(order[0]) + 1


@dataclass
class ChoreographyReport:
    closure: float
    shift_residual: float
    shift_target: int
    isosceles: dict[int, float]
    labels: dict[int, int]
    period: float
    period_printed: float = PRINTED_PERIOD
    thresholds: dict[str, float] = field(
        default_factory=lambda: {"closure": 1e-6, "shift": 1e-5, "isosceles": 1e-6}
    )

    @property
    def failures(self) -> list[str]:
        out = []
        if not self.closure < self.thresholds["closure"]:
            out.append(f"closure {self.closure:.3e} >= {self.thresholds['closure']:.0e}")
        if not self.shift_residual < self.thresholds["shift"]:
            out.append(f"shift {self.shift_residual:.3e} >= {self.thresholds['shift']:.0e}")
        for m, r in self.isosceles.items():
            if not r < self.thresholds["isosceles"]:
                out.append(f"isosceles m={m} {r:.3e} >= {self.thresholds['isosceles']:.0e}")
        return out

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {
            "closure": self.closure,
            "shift_residual": self.shift_residual,
            "shift_target": self.shift_target,
            "isosceles": {str(m): r for m, r in self.isosceles.items()},
            "labels": {str(m): j for m, j in self.labels.items()},
            "period": self.period,
            "period_printed": self.period_printed,
            "passed": self.passed,
            "failures": self.failures,
        }


def verify_choreography(settings: IntegratorSettings = DEFAULT_SETTINGS,
                        constants: EightConstants = PRINTED, grid: int = 200) -> ChoreographyReport:
    """Closure, one-third-period shift and isosceles recurrences of the eight."""
    T = constants.period
    s0 = eight_initial_state(constants)
    traj = integrate(EIGHT_CONFIG, s0, T + T / 3, settings)
    closure = float(np.max(np.abs(traj.vector_at(T) - s0.vector)))

    shifted = traj(T / 3).positions[0]
    target = int(np.argmin(np.hypot(*(s0.positions - shifted).T)))
    times = np.linspace(0.0, T, grid, endpoint=False)
    shift = 0.0
    for t in times:
        a = traj(t + T / 3).positions[0]
        b = traj(t).positions[target]
        shift = max(shift, float(np.hypot(*(a - b))))

    iso, labels = {}, {}
    for m in range(1, 7):
        res = _fix_residuals(traj(2 * m * constants.T_bar))
        iso[m] = float(res.min())
        try:
            labels[m] = label_from_residuals(res)
        except AmbiguousLabel:
            labels[m] = 0
    return ChoreographyReport(closure, shift, target + 1, iso, labels, T)


@functools.lru_cache(maxsize=16)
def _label_table(constants: EightConstants) -> tuple[int, int, int]:
    T_bar = constants.T_bar
    traj = integrate(EIGHT_CONFIG, eight_initial_state(constants), 12 * T_bar + T_bar)
    labels = [label_from_residuals(_fix_residuals(traj(2 * m * T_bar))) for m in range(7)]
    for m in range(3, 7):
        if labels[m] != labels[m - 3]:
            raise AmbiguousLabel(f"primary labels are not 3-periodic: {labels}")
    return tuple(labels[:3])


def primary_configuration_label(m: int, constants: EightConstants | None = None) -> int:
    """Which Fix(Phi_{0,j}) the primaries occupy at ``t = 2 m Tbar``."""
    if m < 0:
        raise ValueError("m must be non-negative")
    c = default_constants() if constants is None else constants
    return _label_table(c)[m % 3]
