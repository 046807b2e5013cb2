"""Reversing symmetries of the paired-mass planar N-body problem.

``Phi_theta = P o G_theta o K`` acts on phase space by

* ``K``: reflect positions across the x-axis, ``(x, y, vx, vy) -> (x, -y, -vx, vy)``;
* ``G_theta``: rotate every position and velocity by ``theta``;
* ``P``: swap bodies ``2i-1`` and ``2i`` of every equal-mass pair.

For three equal masses followed by free bodies (the restricted problem
driven by the eight), ``perm_index`` ``j`` conjugates the map with the
cyclic relabeling ``1 -> 3 -> 2 -> 1`` applied ``j - 1`` times.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import State, SystemConfig
from .errors import DimensionMismatch, InvalidIndex

#: Relabeling 1 -> 3 -> 2 -> 1 as a 0-based lookup: body ``i`` is read from ``SIGMA[i]``.
SIGMA = (2, 0, 1)

#: Fixed-point membership tolerance (infinity norm).
FIX_TOL = 1e-9


@dataclass(frozen=True)
class SymmetryDescriptor:
    n: int
    k: int
    theta: float = 0.0
    perm_index: int = 1

    def __post_init__(self) -> None:
        if self.n < 0 or self.k < 0 or 2 * self.n + self.k == 0:
            raise DimensionMismatch(f"invalid pairing structure n={self.n}, k={self.k}")
        if self.perm_index not in (1, 2, 3):
            raise InvalidIndex(f"perm_index must be 1, 2 or 3, got {self.perm_index}")
        if self.perm_index != 1 and not (self.n == 1 and self.k >= 1):
            raise InvalidIndex("cyclic relabeling needs one pair followed by at least one free body")

    @property
    def n_bodies(self) -> int:
        return 2 * self.n + self.k

    def relabeling(self) -> np.ndarray:
        """Index array ``s`` such that the relabeled body ``i`` is body ``s[i]``."""
        idx = np.arange(self.n_bodies)
        for _ in range(self.perm_index - 1):
            idx[:3] = idx[list(SIGMA)]
        return idx

    def check_config(self, config: SystemConfig) -> None:
        if config.n_bodies != self.n_bodies:
            raise DimensionMismatch("descriptor and config disagree on N")
        m = config.mass_array
        if not config.is_paired() or (config.n, config.k) != (self.n, self.k):
            raise ValueError("config does not satisfy the pairing constraint of the descriptor")
        if self.perm_index != 1 and not (m[0] == m[1] == m[2]):
            raise ValueError("cyclic relabeling requires three equal masses")

    @classmethod
    def for_config(cls, config: SystemConfig, theta: float = 0.0, perm_index: int = 1) -> SymmetryDescriptor:
        return cls(config.n, config.k, theta, perm_index)


def _rot(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def _pair_swap(n: int, N: int) -> np.ndarray:
    idx = np.arange(N)
    idx[0 : 2 * n : 2] += 1
    idx[1 : 2 * n : 2] -= 1
    return idx


def reflect(s: State) -> State:
    """The map K on every body."""
    return s.replace(positions=s.positions * (1.0, -1.0), velocities=s.velocities * (-1.0, 1.0))


def rotate_state(alpha: float, s: State) -> State:
    """Rotate every position and velocity by ``alpha``."""
    R = _rot(alpha)
    return s.replace(positions=s.positions @ R.T, velocities=s.velocities @ R.T)


def swap_pairs(n: int, s: State) -> State:
    """The map P: exchange bodies ``2i-1`` and ``2i`` for ``i = 1..n``."""
    idx = _pair_swap(n, s.n_bodies)
    return s.replace(positions=s.positions[idx], velocities=s.velocities[idx])


def relabel(desc: SymmetryDescriptor, s: State, inverse: bool = False) -> State:
    idx = desc.relabeling()
    if inverse:
        idx = np.argsort(idx)
    return s.replace(positions=s.positions[idx], velocities=s.velocities[idx])


def _check(desc: SymmetryDescriptor, s: State) -> None:
    if s.n_bodies != desc.n_bodies:
        raise DimensionMismatch(f"state has {s.n_bodies} bodies, descriptor expects {desc.n_bodies}")


def apply_phi(desc: SymmetryDescriptor, s: State) -> State:
    """Image of ``s`` under the descriptor's reversing symmetry (``t`` untouched)."""
    _check(desc, s)
    w = relabel(desc, s)
    w = swap_pairs(desc.n, rotate_state(desc.theta, reflect(w)))
    return relabel(desc, w, inverse=True)


def fixed_point_residual(desc: SymmetryDescriptor, s: State) -> np.ndarray:
    """``apply_phi(desc, s) - s`` as a flat phase vector."""
    return apply_phi(desc, s).vector - s.vector


def is_fixed(desc: SymmetryDescriptor, s: State, tol: float = FIX_TOL) -> bool:
    return float(np.max(np.abs(fixed_point_residual(desc, s)))) <= tol


@dataclass(frozen=True)
class FixedPointParams:
    """Free coordinates of a point of Fix(Phi_0).

    Per pair: position and velocity of the odd-numbered body. Per free body:
    its x-coordinate and y-velocity.
    """

    pair_positions: np.ndarray
    pair_velocities: np.ndarray
    free_x: np.ndarray
    free_vy: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "pair_positions", np.asarray(self.pair_positions, float).reshape(-1, 2))
        object.__setattr__(self, "pair_velocities", np.asarray(self.pair_velocities, float).reshape(-1, 2))
        object.__setattr__(self, "free_x", np.atleast_1d(np.asarray(self.free_x, float)))
        object.__setattr__(self, "free_vy", np.atleast_1d(np.asarray(self.free_vy, float)))
        if self.pair_positions.shape != self.pair_velocities.shape or self.free_x.shape != self.free_vy.shape:
            raise DimensionMismatch("inconsistent parameter blocks")

    @classmethod
    def zeros(cls, n: int, k: int) -> FixedPointParams:
        return cls(np.zeros((n, 2)), np.zeros((n, 2)), np.zeros(k), np.zeros(k))

    def as_vector(self) -> np.ndarray:
        pairs = np.hstack([self.pair_positions, self.pair_velocities]).ravel()
        free = np.column_stack([self.free_x, self.free_vy]).ravel()
        return np.concatenate([pairs, free])

    @classmethod
    def from_vector(cls, p, n: int, k: int) -> FixedPointParams:
        p = np.asarray(p, dtype=float)
        if p.size != 4 * n + 2 * k:
            raise DimensionMismatch(f"expected {4 * n + 2 * k} parameters, got {p.size}")
        pairs = p[: 4 * n].reshape(n, 4)
        free = p[4 * n :].reshape(k, 2)
        return cls(pairs[:, :2], pairs[:, 2:], free[:, 0], free[:, 1])


def fixed_point_embed(desc: SymmetryDescriptor, params: FixedPointParams, t: float = 0.0) -> State:
    """Build the state of Fix(Phi_{0,j}) with the given free coordinates.

    Rotated fixed sets are reached with ``rotate_state``: a point of
    Fix(Phi_theta) rotated by alpha lies in Fix(Phi_{2 alpha + theta}).
    """
    if desc.theta != 0.0:
        raise ValueError("fixed_point_embed works on theta = 0; rotate the result afterwards")
    n, k = desc.n, desc.k
    if params.pair_positions.shape[0] != n or params.free_x.shape[0] != k:
        raise DimensionMismatch("parameters do not match the descriptor")
    pos = np.zeros((2 * n + k, 2))
    vel = np.zeros((2 * n + k, 2))
    pos[0 : 2 * n : 2] = params.pair_positions
    pos[1 : 2 * n : 2] = params.pair_positions * (1.0, -1.0)
    vel[0 : 2 * n : 2] = params.pair_velocities
    vel[1 : 2 * n : 2] = params.pair_velocities * (-1.0, 1.0)
    pos[2 * n :, 0] = params.free_x
    vel[2 * n :, 1] = params.free_vy
    return relabel(desc, State(t, pos, vel), inverse=True)


def classify_period(j_start: int, j_end: int, T0: float) -> tuple[int, float]:
    """Multiplicity ``M`` and full period ``T = 2 M T0`` of an orbit launched
    from Fix(Phi_{0,1}) that reaches Fix(Phi_{0,j_end}) at ``T0``.

    ``Phi_{0,1} o Phi_{0,1}`` is the identity, while ``Phi_{0,j} o Phi_{0,1}``
    for ``j = 2, 3`` is a 3-cycle of the primaries.
    """
    if j_start != 1:
        raise InvalidIndex("orbits are launched from Fix(Phi_{0,1})")
    if j_end not in (1, 2, 3):
        raise InvalidIndex(f"j_end must be 1, 2 or 3, got {j_end}")
    M = 1 if j_end == 1 else 3
    return M, 2 * M * T0
