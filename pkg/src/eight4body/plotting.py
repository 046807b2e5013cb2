"""Static figures written next to the CSV/JSON outputs.

Uses the non-interactive Agg backend; every function takes an output
path and returns it.
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Iterable, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .porbits import ContinuationCurve, OrbitRecord  # noqa: E402
from .table1 import TABLE1  # noqa: E402

logger = logging.getLogger(__name__)

_STYLE = {
    "figure.figsize": (6.0, 4.5),
    "figure.dpi": 120,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "font.size": 9,
    "savefig.bbox": "tight",
}
_COLOURS = {"cy": "tab:blue", "cvx": "tab:red", "cr": "tab:green"}


def _save(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path)
    plt.close(fig)
    logger.info("wrote %s", path)
    return path


def plot_curves(curves: Sequence[ContinuationCurve], path, *,
                marks: Iterable[tuple[float, float]] = (), t_bar: float | None = None) -> Path:
    """Curves in the ``(x40, vy40)`` plane; ``marks`` are drawn as dots."""
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        seen = set()
        for c in curves:
            if not len(c):
                continue
            a = c.array
            label = c.family if c.p is None else f"{c.family} (p={c.p})"
            ax.plot(a[:, 0], a[:, 1], "-", lw=1.0, color=_COLOURS.get(c.family),
                    label=None if label in seen else label)
            seen.add(label)
        for x, v in marks:
            ax.plot(x, v, "ko", ms=4)
        ax.set_xlabel(r"$x_{4}(0)$")
        ax.set_ylabel(r"$v_{y4}(0)$")
        if seen:
            ax.legend(loc="best", frameon=False)
        return _save(fig, path)


def plot_orbit(table: np.ndarray, path, *, title: str | None = None) -> Path:
    """Planar paths of all bodies from a trajectory table (``t`` then 4 columns per body)."""
    n = (table.shape[1] - 1) // 4
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        for i in range(n):
            x = table[:, 1 + 4 * i]
            y = table[:, 2 + 4 * i]
            primary = i < n - 1
            ax.plot(x, y, lw=0.6 if primary else 1.0, color="0.5" if primary else "tab:blue",
                    label="primaries" if i == 0 else (None if primary else f"body {i + 1}"))
            ax.plot(x[0], y[0], "o", ms=3, color="k")
        ax.set_aspect("equal", adjustable="datalim")
        ax.set_xlabel("x")
        ax.set_ylabel("y")
        ax.legend(loc="best", frameon=False)
        if title:
            ax.set_title(title)
        return _save(fig, path)


def plot_table_comparison(records: Sequence[OrbitRecord], path) -> Path:
    """Newton correction per row against the printed initial conditions."""
    ok = [r for r in records if r.status == "ok"]
    with plt.rc_context(_STYLE):
        fig, (ax1, ax2) = plt.subplots(2, 1, sharex=True, figsize=(6.0, 5.0))
        if ok:
            idx = np.array([r.index for r in ok])
            corr = np.array([r.correction for r in ok])
            res = np.array([max(r.res_y, r.res_vx) for r in ok])
            floor = 1e-18
            ax1.semilogy(idx, np.maximum(corr[:, 0], floor), "o", ms=3, label=r"$|\Delta x_4|$")
            ax1.semilogy(idx, np.maximum(corr[:, 1], floor), "s", ms=3, label=r"$|\Delta v_{y4}|$")
            ax1.axhline(1e-6, color="k", lw=0.6, ls="--")
            ax1.legend(frameon=False)
            ax2.semilogy(idx, np.maximum(res, floor), "o", ms=3, color="tab:purple")
            ax2.axhline(1e-8, color="k", lw=0.6, ls="--")
        bad = [r.index for r in records if r.status != "ok"]
        for i in bad:
            ax1.axvline(i, color="tab:red", lw=0.6)
        ax1.set_ylabel("correction")
        ax2.set_ylabel("boundary residual")
        ax2.set_xlabel("row")
        ax2.set_xlim(0, len(TABLE1) + 1)
        return _save(fig, path)


def plot_kepler_errors(indices: Sequence[int], errors: Sequence[float], path) -> Path:
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots()
        ax.plot(indices, errors, "o-", ms=3)
        ax.set_xlabel("row")
        ax.set_ylabel("relative error of two-body $v_{y4}$")
        return _save(fig, path)
