"""Planar N-body gravitational field.

State vectors follow the ordering ``u = (r_1, ..., r_N, v_1, ..., v_N)``;
bodies are numbered from 1 in docs and file formats, from 0 in arrays.
Bodies with mass exactly 0 are test particles: they feel the field but
are never a source of it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import CollisionProximity, DimensionMismatch

#: Hard proximity guard (length units).
DELTA_COLL = 1e-8


@dataclass(frozen=True)
class SystemConfig:
    """Masses, pairing structure and gravitational constant.

    ``n`` equal-mass pairs occupy bodies ``1..2n``; the remaining ``k``
    bodies are unrestricted. Zero masses are allowed only at the tail.
    """

    masses: tuple[float, ...]
    n: int = 0
    k: int | None = None
    G: float = 1.0
    mass_array: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        masses = tuple(float(m) for m in self.masses)
        object.__setattr__(self, "masses", masses)
        k = len(masses) - 2 * self.n if self.k is None else self.k
        object.__setattr__(self, "k", k)
        if self.n < 0 or k < 0 or 2 * self.n + k != len(masses):
            raise DimensionMismatch(f"N = {len(masses)} does not equal 2n + k with n={self.n}, k={k}")
        if self.G <= 0:
            raise ValueError("G must be positive")
        arr = np.array(masses, dtype=np.float64)
        if np.any(arr < 0) or not np.all(np.isfinite(arr)):
            raise ValueError("masses must be finite and non-negative")
        massless = arr == 0.0
        if massless.any():
            first = int(np.argmax(massless))
            if not massless[first:].all():
                raise ValueError("massless bodies must come after all massive ones")
        object.__setattr__(self, "mass_array", arr)

    @property
    def n_bodies(self) -> int:
        return len(self.masses)

    @property
    def massless(self) -> np.ndarray:
        return self.mass_array == 0.0

    def is_paired(self) -> bool:
        m = self.mass_array
        return all(m[2 * i] == m[2 * i + 1] for i in range(self.n))


@dataclass(frozen=True)
class State:
    """Time plus ``(N, 2)`` position and velocity arrays."""

    t: float
    positions: np.ndarray
    velocities: np.ndarray

    def __post_init__(self) -> None:
        pos = np.array(self.positions, dtype=np.float64).reshape(-1, 2)
        vel = np.array(self.velocities, dtype=np.float64).reshape(-1, 2)
        if pos.shape != vel.shape:
            raise DimensionMismatch(f"positions {pos.shape} vs velocities {vel.shape}")
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "velocities", vel)
        object.__setattr__(self, "t", float(self.t))

    @classmethod
    def from_vector(cls, u: np.ndarray, t: float = 0.0) -> State:
        u = np.asarray(u, dtype=np.float64)
        if u.ndim != 1 or u.size % 4:
            raise DimensionMismatch(f"phase vector of length {u.size} is not 4N")
        half = u.size // 2
        return cls(t, u[:half].reshape(-1, 2), u[half:].reshape(-1, 2))

    @property
    def vector(self) -> np.ndarray:
        return np.concatenate([self.positions.ravel(), self.velocities.ravel()])

    @property
    def n_bodies(self) -> int:
        return self.positions.shape[0]

    def replace(self, **changes) -> State:
        data = {"t": self.t, "positions": self.positions, "velocities": self.velocities}
        data.update(changes)
        return State(**data)


def _check(config: SystemConfig, s: State) -> None:
    if s.n_bodies != config.n_bodies:
        raise DimensionMismatch(f"state has {s.n_bodies} bodies, config has {config.n_bodies}")


def min_pairwise_distance(s: State, config: SystemConfig | None = None) -> float:
    """Smallest separation over pairs that involve at least one massive body.

    Without a ``config`` every pair counts.
    """
    r = s.positions
    diff = r[:, None, :] - r[None, :, :]
    dist = np.hypot(diff[..., 0], diff[..., 1])
    iu = np.triu_indices(s.n_bodies, k=1)
    keep = np.ones(iu[0].size, dtype=bool)
    if config is not None:
        _check(config, s)
        ml = config.massless
        keep = ~(ml[iu[0]] & ml[iu[1]])
    d = dist[iu][keep]
    return float(d.min()) if d.size else float("inf")


def accelerations(config: SystemConfig, s: State) -> np.ndarray:
    """Gravitational acceleration of every body, shape ``(N, 2)``."""
    _check(config, s)
    u = s.vector
    out = np.empty_like(u)
    dmin = _kernels.accel_into(u, config.mass_array, config.G, out)
    if dmin <= DELTA_COLL:
        raise CollisionProximity(f"bodies within {dmin:.3e} of each other", dmin, s.t)
    return out[u.size // 2 :].reshape(-1, 2)


def vector_field(config: SystemConfig, s: State) -> State:
    """Time derivative of ``s`` packaged as a State (its ``t`` field is dt/dt = 1)."""
    acc = accelerations(config, s)
    return State(1.0, s.velocities.copy(), acc)


def total_energy(config: SystemConfig, s: State) -> float:
    """Kinetic plus potential energy of the massive bodies."""
    _check(config, s)
    if min_pairwise_distance(s, config) <= DELTA_COLL:
        raise CollisionProximity("energy undefined at collision")
    m = config.mass_array
    kinetic = 0.5 * float(np.sum(m * np.sum(s.velocities**2, axis=1)))
    potential = 0.0
    idx = np.flatnonzero(m > 0)
    for a, i in enumerate(idx):
        for j in idx[a + 1 :]:
            potential -= config.G * m[i] * m[j] / float(np.hypot(*(s.positions[i] - s.positions[j])))
    return kinetic + potential
