"""Readers and writers for orbit records, curves and sampled trajectories."""

from __future__ import annotations

import csv
import json
import math
import os
from pathlib import Path
from typing import Iterable, TextIO

import numpy as np

from .integrator import Trajectory
from .porbits import ContinuationCurve, OrbitRecord

RECORD_FIELDS = ("index", "T0_over_Tbar", "T_over_Tbar", "x4", "vy4", "j_end", "M",
                 "res_y", "res_vx", "res_closure")
CURVE_HEADER = ("family", "p", "x40", "vy40", "T0", "res1", "res2")

PathLike = str | os.PathLike


def write_records(path: PathLike, records: Iterable[OrbitRecord]) -> int:
    """Write one JSON object per line; returns the number written."""
    n = 0
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec.to_json()) + "\n")
            n += 1
    return n


def read_records(path: PathLike) -> list[dict]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            obj = json.loads(line)
            if tuple(obj) != RECORD_FIELDS:
                raise ValueError(f"{path}:{lineno}: unexpected fields {sorted(obj)}")
            if obj["res_closure"] is None:
                obj["res_closure"] = math.nan
            out.append(obj)
    return out


def dump_curves(fh: TextIO, curves: Iterable[ContinuationCurve]) -> int:
    """Write the curve CSV (header always present) to an open text stream."""
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CURVE_HEADER)
    n = 0
    for curve in curves:
        for fam, p, x, v, t0, r1, r2 in curve.rows():
            w.writerow([fam, "" if p is None else p, repr(float(x)), repr(float(v)),
                        repr(float(t0)), repr(float(r1)), repr(float(r2))])
            n += 1
    return n


def write_curves(path: PathLike, curves: Iterable[ContinuationCurve]) -> int:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        return dump_curves(fh, curves)


def read_curves(path: PathLike) -> dict[tuple[str, int | None], np.ndarray]:
    """Group curve rows by ``(family, p)``; values have columns x40, vy40, T0, res1, res2."""
    groups: dict[tuple[str, int | None], list[list[float]]] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if tuple(header or ()) != CURVE_HEADER:
            raise ValueError(f"{path}: bad curve header {header}")
        for row in reader:
            key = (row[0], int(row[1]) if row[1] else None)
            groups.setdefault(key, []).append([float(c) for c in row[2:]])
    return {k: np.array(v) for k, v in groups.items()}


def sample_times(t0: float, t1: float, step: float) -> np.ndarray:
    """Grid ``t0, t0 + step, ...`` that always ends exactly at ``t1``."""
    if not step > 0.0:
        raise ValueError(f"sampling step must be positive, got {step}")
    span = t1 - t0
    n = int(math.floor(abs(span) / step + 1e-9))
    ts = t0 + math.copysign(step, span) * np.arange(n + 1)
    if abs(ts[-1] - t1) > 1e-12 * max(1.0, abs(t1)):
        ts = np.append(ts, t1)
    else:
        ts[-1] = t1
    return ts


def trajectory_header(n_bodies: int) -> list[str]:
    cols = ["t"]
    for i in range(1, n_bodies + 1):
        cols += [f"x{i}", f"y{i}", f"vx{i}", f"vy{i}"]
    return cols


def trajectory_table(traj: Trajectory, step: float) -> np.ndarray:
    """Rows ``t, x1, y1, vx1, vy1, ...`` sampled every ``step`` from start to end."""
    N = traj.config.n_bodies
    ts = sample_times(traj.t_start, traj.t_end, step)
    ys = traj.sample(ts)
    pos = ys[:, : 2 * N].reshape(-1, N, 2)
    vel = ys[:, 2 * N:].reshape(-1, N, 2)
    return np.concatenate([ts[:, None], np.concatenate([pos, vel], axis=2).reshape(len(ts), 4 * N)], axis=1)


def dump_trajectory(fh: TextIO, table: np.ndarray) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(trajectory_header((table.shape[1] - 1) // 4))
    for row in table:
        w.writerow([repr(float(c)) for c in row])


def write_trajectory(path: PathLike, traj: Trajectory, step: float) -> np.ndarray:
    """Sample ``traj`` on a fixed grid and write it as CSV; returns the table."""
    table = trajectory_table(traj, step)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        dump_trajectory(fh, table)
    return table


def read_trajectory(path: PathLike) -> tuple[list[str], np.ndarray]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        data = np.array([[float(c) for c in row] for row in reader]).reshape(-1, len(header))
    return header, data


def table_to_vectors(table: np.ndarray) -> np.ndarray:
    """Convert trajectory-CSV rows back to flat phase vectors."""
    N = (table.shape[1] - 1) // 4
    per_body = table[:, 1:].reshape(-1, N, 4)
    return np.concatenate([per_body[:, :, :2].reshape(-1, 2 * N), per_body[:, :, 2:].reshape(-1, 2 * N)], axis=1)


def ensure_parent(path: PathLike) -> Path:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    return p
