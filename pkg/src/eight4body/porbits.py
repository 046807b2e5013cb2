"""Shooting problems for symmetric periodic orbits of the massless body.

An orbit starts in Fix(Phi_{0,1}) with the test particle at ``(x40, 0)``
moving with ``(0, vy40)``. It is periodic as soon as, at some
``T0 = 2 m Tbar``, the particle is back on the x-axis with zero
horizontal velocity. The solution sets handled here are

* ``cy``  (C_(y,2p)):  ``y4(2p Tbar) = 0`` in the ``(x40, vy40)`` plane;
* ``cvx`` (C_(vx,2q)): ``vx4(2q Tbar) = 0``;
* ``cr``  (C_R):       ``y4(T0) = vx4(T0) = 0`` with ``T0`` free.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .choreography import (
    RESTRICTED_CONFIG,
    EightConstants,
    _fix_residuals,
    default_constants,
    label_from_residuals,
    restricted_initial_state,
)
from .dynamics import State
from .errors import (
    AmbiguousLabel,
    CollisionProximity,
    CorrectorDivergence,
    NoConvergence,
    StepSizeUnderflow,
)
from .integrator import DEFAULT_SETTINGS, IntegratorSettings, propagate
from .symmetry import classify_period
from .table1 import TABLE1, Table1Row

logger = logging.getLogger(__name__)

FAMILIES = ("cy", "cvx", "cr")

# body 4 in the 16-vector (x1, y1, ..., x4, y4, vx1, vy1, ..., vx4, vy4)
_Y4 = 7
_VX4 = 14
_VY4 = 15

SOLVER_TOL = 1e-10
BOUNDARY_TOL = 1e-8
CLOSURE_TOL = 1e-6
LABEL_TOL = 1e-6
SOFT_GUARD = 1e-3
T0_SCALE = 10.0


def fd_step(c: float) -> float:
    return 1e-7 * max(1.0, abs(c))


@dataclass(frozen=True)
class SeedPoint:
    x40: float
    vy40: float
    T0: float


class Shooter:
    """Integrates the co-moving primaries plus the test particle to ``T0``."""

    def __init__(self, constants: EightConstants | None = None,
                 settings: IntegratorSettings = DEFAULT_SETTINGS):
        self.constants = default_constants() if constants is None else constants
        self.settings = settings
        self.T_bar = self.constants.T_bar

    def initial(self, x40: float, vy40: float) -> State:
        return restricted_initial_state(x40, vy40, self.constants)

    def endpoint(self, x40: float, vy40: float, T0: float) -> tuple[np.ndarray, float]:
        """``(u(T0), min pairwise distance along the way)``."""
        u0 = self.initial(x40, vy40).vector
        return propagate(RESTRICTED_CONFIG, u0, 0.0, T0, self.settings)

    def boundary(self, x40: float, vy40: float, T0: float) -> np.ndarray:
        u, _ = self.endpoint(x40, vy40, T0)
        return np.array([u[_Y4], u[_VX4]])

    def boundary_with_time_derivative(self, x40, vy40, T0):
        """Boundary values, their derivative in ``T0`` and the min distance."""
        u, dmin = self.endpoint(x40, vy40, T0)
        f = np.empty_like(u)
        _kernels.rhs_into(u, RESTRICTED_CONFIG.mass_array, RESTRICTED_CONFIG.G, f)
        return np.array([u[_Y4], u[_VX4]]), np.array([f[_Y4], f[_VX4]]), dmin

    def jacobian_xv(self, x40: float, vy40: float, T0: float) -> np.ndarray:
        """Central-difference derivative of ``(y4, vx4)(T0)`` in ``(x40, vy40)``."""
        J = np.empty((2, 2))
        hx, hv = fd_step(x40), fd_step(vy40)
        J[:, 0] = (self.boundary(x40 + hx, vy40, T0) - self.boundary(x40 - hx, vy40, T0)) / (2 * hx)
        J[:, 1] = (self.boundary(x40, vy40 + hv, T0) - self.boundary(x40, vy40 - hv, T0)) / (2 * hv)
        return J


def boundary_values(x40: float, vy40: float, T0: float, *, constants: EightConstants | None = None,
                    settings: IntegratorSettings = DEFAULT_SETTINGS) -> tuple[float, float]:
    """``(y4(T0), vx4(T0))`` for the orbit launched from ``(x40, vy40)``."""
    y, vx = Shooter(constants, settings).boundary(x40, vy40, T0)
    return float(y), float(vx)


# --- seeds ----------------------------------------------------------------------------------


def find_seed(p: int, which: str, guess: SeedPoint, frozen: str, *,
              shooter: Shooter | None = None, tol: float = SOLVER_TOL, max_iter: int = 25) -> SeedPoint:
    """One-dimensional Newton on ``y4`` or ``vx4`` at ``2 p Tbar``.

    ``frozen`` names the coordinate held at its guess value (``"x40"`` or
    ``"vy40"``); the other one is solved for.
    """
    if which not in ("y", "vx"):
        raise ValueError(f"which must be 'y' or 'vx', got {which!r}")
    if frozen not in ("x40", "vy40"):
        raise ValueError(f"frozen must be 'x40' or 'vy40', got {frozen!r}")
    if p < 1:
        raise ValueError("p must be a positive integer")
    sh = shooter or Shooter()
    T0 = 2 * p * sh.T_bar
    comp = 0 if which == "y" else 1
    x, v = guess.x40, guess.vy40

    def g(c: float) -> float:
        args = (x, c) if frozen == "x40" else (c, v)
        return float(sh.boundary(*args, T0)[comp])

    c = v if frozen == "x40" else x
    r = g(c)
    it = 0
    while abs(r) >= tol:
        if it == max_iter or not math.isfinite(r):
            raise NoConvergence(f"seed search stalled at |residual| = {abs(r):.3e}", it, abs(r))
        h = fd_step(c)
        slope = (g(c + h) - g(c - h)) / (2 * h)
        if slope == 0 or not math.isfinite(slope):
            raise NoConvergence("zero derivative in seed search", it, abs(r))
        c -= r / slope
        r = g(c)
        it += 1
    logger.debug("seed found after %d Newton steps, residual %.2e", it, r)
    if frozen == "x40":
        return SeedPoint(x, c, T0)
    return SeedPoint(c, v, T0)


# --- continuation ---------------------------------------------------------------------------


@dataclass
class ContinuationCurve:
    """Points of one solution family in trace order.

    ``points`` rows are ``(x40, vy40, T0)``; ``residuals`` rows are the
    boundary values ``(y4(T0), vx4(T0))`` at each point.
    """

    family: str
    p: int | None
    points: list[np.ndarray] = field(default_factory=list)
    residuals: list[np.ndarray] = field(default_factory=list)
    arclength: list[float] = field(default_factory=list)
    status: str = "running"

    def __len__(self) -> int:
        return len(self.points)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.points).reshape(-1, 3)

    @property
    def truncated(self) -> bool:
        return self.status in ("near_collision", "collision", "corrector_divergence")

    def rows(self):
        for pt, res in zip(self.points, self.residuals):
            yield (self.family, self.p, pt[0], pt[1], pt[2], res[0], res[1])


class _Family:
    """Residual and Jacobian of one family in scaled unknowns ``z``.

    ``z = (x40, vy40)`` for fixed-time sets, ``(x40, vy40, T0/10)`` for C_R.
    """

    def __init__(self, family: str, T0: float, shooter: Shooter):
        if family not in FAMILIES:
            raise ValueError(f"unknown family {family!r}; expected one of {FAMILIES}")
        self.family = family
        self.T0 = T0
        self.sh = shooter
        self.dim = 3 if family == "cr" else 2

    def point(self, z: np.ndarray) -> np.ndarray:
        if self.dim == 3:
            return np.array([z[0], z[1], z[2] * T0_SCALE])
        return np.array([z[0], z[1], self.T0])

    def scaled(self, pt) -> np.ndarray:
        pt = np.asarray(pt, dtype=float)
        return pt[:2].copy() if self.dim == 2 else np.array([pt[0], pt[1], pt[2] / T0_SCALE])

    def _select(self, bv: np.ndarray) -> np.ndarray:
        if self.family == "cy":
            return bv[:1]
        if self.family == "cvx":
            return bv[1:]
        return bv

    def evaluate(self, z: np.ndarray):
        """``(G(z), dG/dz, boundary values, min distance)``."""
        x, v, T0 = self.point(z)
        bv, dT, dmin = self.sh.boundary_with_time_derivative(x, v, T0)
        J2 = self.sh.jacobian_xv(x, v, T0)
        if self.dim == 3:
            J = np.column_stack([J2, dT * T0_SCALE])
        else:
            J = J2
        return self._select(bv), self._select_rows(J), bv, dmin

    def _select_rows(self, J: np.ndarray) -> np.ndarray:
        if self.family == "cy":
            return J[:1]
        if self.family == "cvx":
            return J[1:]
        return J


def _null_vector(J: np.ndarray) -> np.ndarray:
    _, _, vt = np.linalg.svd(J)
    t = vt[-1]
    return t / np.linalg.norm(t)


def trace_curve(seed: SeedPoint, family: str, step: float = 1e-2, max_points: int = 100, *,
                direction: int = 1, p: int | None = None, shooter: Shooter | None = None,
                tol: float = SOLVER_TOL, soft_guard: float = SOFT_GUARD,
                max_halvings: int = 6, max_corrector: int = 8, strict: bool = False) -> ContinuationCurve:
    """Pseudo-arclength continuation of one family starting at ``seed``.

    Predictor along the secant of the last two points (the first tangent is
    the null vector of the finite-difference Jacobian), Newton corrector
    constrained to the hyperplane orthogonal to the predictor direction.
    ``step`` is measured in ``(x40, vy40, T0/10)``.

    When the corrector fails after ``max_halvings`` step halvings the curve
    is truncated and its ``status`` says why; with ``strict`` a divergence
    raises ``CorrectorDivergence`` carrying the partial curve instead.
    """
    sh = shooter or Shooter()
    fam = _Family(family, seed.T0, sh)
    if p is None and family != "cr":
        p = int(round(seed.T0 / (2 * sh.T_bar)))
    curve = ContinuationCurve(family, p if family != "cr" else None)
    if max_points <= 0:
        curve.status = "max_points"
        return curve

    z = fam.scaled([seed.x40, seed.vy40, seed.T0])
    G, J, bv, dmin = fam.evaluate(z)
    if np.max(np.abs(G)) >= tol:
        raise NoConvergence(f"seed residual {np.max(np.abs(G)):.3e} exceeds {tol:.0e}", 0, float(np.max(np.abs(G))))
    curve.points.append(fam.point(z))
    curve.residuals.append(bv)
    curve.arclength.append(0.0)

    tangent = _null_vector(J)
    lead = 0 if abs(tangent[0]) > 1e-3 else 1
    if np.sign(tangent[lead]) != np.sign(direction):
        tangent = -tangent

    h = step
    s_acc = 0.0
    while len(curve) < max_points:
        accepted = None
        for _ in range(max_halvings + 1):
            try:
                accepted = _correct(fam, z, tangent, h, tol, max_corrector, soft_guard)
            except (CollisionProximity, StepSizeUnderflow) as exc:
                logger.info("continuation hit %s at step %.3e", type(exc).__name__, h)
                accepted = "collision"
            if isinstance(accepted, tuple):
                break
            if accepted == "near_collision" or accepted == "collision":
                h *= 0.5
                continue
            h *= 0.5
        if not isinstance(accepted, tuple):
            curve.status = {
                "near_collision": "near_collision",
                "collision": "collision",
            }.get(accepted, "corrector_divergence")
            logger.info("curve %s truncated after %d points (%s)", family, len(curve), curve.status)
            if strict and curve.status == "corrector_divergence":
                err = CorrectorDivergence(f"corrector failed after {max_halvings} halvings "
                                          f"at point {len(curve)}")
                err.curve = curve
                raise err
            return curve
        z_new, bv, n_iter = accepted
        secant = z_new - z
        ds = float(np.linalg.norm(secant))
        new_tangent = secant / ds
        z = z_new
        tangent = new_tangent
        s_acc += ds
        curve.points.append(fam.point(z))
        curve.residuals.append(bv)
        curve.arclength.append(s_acc)
        if n_iter <= 3:
            h = min(step, 2 * h)
    curve.status = "max_points"
    return curve


def _correct(fam: _Family, z: np.ndarray, tangent: np.ndarray, h: float, tol: float,
             max_iter: int, soft_guard: float):
    """Predict ``h`` along ``tangent`` and correct back onto the family.

    Returns ``(z, boundary values, iterations)`` or a failure tag.
    """
    z_pred = z + h * tangent
    zc = z_pred.copy()
    prev = math.inf
    for it in range(1, max_iter + 1):
        G, J, bv, dmin = fam.evaluate(zc)
        if dmin < soft_guard:
            return "near_collision"
        res = float(np.max(np.abs(G)))
        if res < tol and it > 1:
            break
        if not math.isfinite(res) or (it > 2 and res > prev):
            return "diverged"
        prev = res
        A = np.vstack([J, tangent])
        rhs = np.concatenate([G, [tangent @ (zc - z_pred)]])
        try:
            dz = np.linalg.solve(A, rhs)
        except np.linalg.LinAlgError:
            return "diverged"
        zc = zc - dz
    else:
        G, _, bv, dmin = fam.evaluate(zc)
        if dmin < soft_guard:
            return "near_collision"
        if float(np.max(np.abs(G))) >= tol:
            return "diverged"
        it = max_iter
    secant = zc - z
    dist = float(np.linalg.norm(secant))
    if dist == 0.0 or dist > 2 * h or secant @ tangent <= 0:
        return "diverged"
    return zc, bv, it


# --- periodic orbits ------------------------------------------------------------------------


@dataclass
class OrbitRecord:
    x4: float
    vy4: float
    T0_over_Tbar: int
    T_over_Tbar: int
    j_end: int
    M: int
    res_y: float
    res_vx: float
    res_closure: float = math.nan
    res_closure_particle: float = math.nan
    index: int | None = None
    iterations: int = 0
    x4_start: float = math.nan
    vy4_start: float = math.nan
    min_distance: float = math.nan
    status: str = "ok"
    message: str = ""

    @property
    def m(self) -> int:
        return self.T0_over_Tbar // 2

    @property
    def correction(self) -> tuple[float, float]:
        return abs(self.x4 - self.x4_start), abs(self.vy4 - self.vy4_start)

    def passes(self, correction_tol: float = 1e-6, max_iterations: int = 6) -> bool:
        return (
            self.status == "ok"
            and self.iterations <= max_iterations
            and max(self.correction) < correction_tol
            and max(self.res_y, self.res_vx) < BOUNDARY_TOL
        )

    @property
    def closes(self) -> bool:
        """Full-period closure within ``CLOSURE_TOL`` (diagnostic; unstable orbits drift)."""
        return not math.isnan(self.res_closure) and self.res_closure < CLOSURE_TOL

    def to_json(self) -> dict:
        """Fields of the orbit-record JSON-lines format."""
        return {
            "index": self.index,
            "T0_over_Tbar": self.T0_over_Tbar,
            "T_over_Tbar": self.T_over_Tbar,
            "x4": self.x4,
            "vy4": self.vy4,
            "j_end": self.j_end,
            "M": self.M,
            "res_y": self.res_y,
            "res_vx": self.res_vx,
            "res_closure": None if math.isnan(self.res_closure) else self.res_closure,
        }


def end_label(u_end: np.ndarray, T0: float, tol: float = LABEL_TOL) -> int:
    """Which Fix(Phi_{0,j}) the full four-body endpoint lies in."""
    res = _fix_residuals(State.from_vector(u_end, T0))
    j = label_from_residuals(res, separation=tol)
    if res[j - 1] > tol:
        raise AmbiguousLabel(f"endpoint is in no reversible configuration (residuals {res})")
    return j


def closure(shooter: Shooter, x40: float, vy40: float, T: float) -> tuple[float, float]:
    """``(|phi_T(u0) - u0|_inf, same restricted to body 4)``."""
    u0 = shooter.initial(x40, vy40).vector
    u1, _ = propagate(RESTRICTED_CONFIG, u0, 0.0, T, shooter.settings)
    d = np.abs(u1 - u0)
    return float(d.max()), float(max(d[6:8].max(), d[14:16].max()))


def refine_periodic(x40: float, vy40: float, m: int, *, shooter: Shooter | None = None,
                    max_iter: int = 10, tol: float = SOLVER_TOL, with_closure: bool = True,
                    index: int | None = None) -> OrbitRecord:
    """Two-dimensional Newton on ``(y4, vx4)(2 m Tbar) = 0`` plus classification.

    The end configuration label fixes ``M`` and the full period
    ``T = 2 M T0``; the closure over ``T`` is then checked by direct
    integration.
    """
    if m < 1:
        raise ValueError("m must be a positive integer")
    sh = shooter or Shooter()
    T0 = 2 * m * sh.T_bar
    z = np.array([x40, vy40], dtype=float)
    r = sh.boundary(*z, T0)
    it = 0
    while np.max(np.abs(r)) >= tol:
        if it == max_iter:
            break
        J = sh.jacobian_xv(*z, T0)
        try:
            dz = np.linalg.solve(J, r)
        except np.linalg.LinAlgError as exc:
            raise NoConvergence("singular shooting Jacobian", it, float(np.max(np.abs(r)))) from exc
        z_new = z - dz
        r_new = sh.boundary(*z_new, T0)
        it += 1
        if not np.all(np.isfinite(r_new)):
            raise NoConvergence("non-finite residual", it, float(np.max(np.abs(r))))
        if np.max(np.abs(r_new)) >= np.max(np.abs(r)) and np.max(np.abs(r)) < BOUNDARY_TOL:
            # rounding floor reached; keep the better iterate
            break
        z, r = z_new, r_new
    res = float(np.max(np.abs(r)))
    if res >= BOUNDARY_TOL:
        raise NoConvergence(f"refinement ended with residual {res:.3e}", it, res)
    u_end, dmin = sh.endpoint(*z, T0)
    j_end = end_label(u_end, T0)
    M, T = classify_period(1, j_end, T0)
    rec = OrbitRecord(
        x4=float(z[0]), vy4=float(z[1]), T0_over_Tbar=2 * m, T_over_Tbar=4 * M * m,
        j_end=j_end, M=M, res_y=abs(float(r[0])), res_vx=abs(float(r[1])), index=index,
        iterations=it, x4_start=x40, vy4_start=vy40, min_distance=dmin,
    )
    if with_closure:
        rec.res_closure, rec.res_closure_particle = closure(sh, rec.x4, rec.vy4, T)
    return rec


def detect_periodic_on_curve(curve: ContinuationCurve, *, shooter: Shooter | None = None,
                             with_closure: bool = False) -> list[OrbitRecord]:
    """Refine every point of a C_R curve where ``T0`` crosses ``2 m Tbar``."""
    if curve.family != "cr":
        raise ValueError("periodic detection needs a C_R curve")
    sh = shooter or Shooter()
    pts = curve.array
    found: list[OrbitRecord] = []
    for a, b in zip(pts[:-1], pts[1:]):
        ma, mb = a[2] / (2 * sh.T_bar), b[2] / (2 * sh.T_bar)
        lo, hi = sorted((ma, mb))
        # half-open in trace order so a crossing on a shared vertex is seen once
        for m in range(max(1, math.ceil(lo)), math.floor(hi) + 1):
            if m == mb and b is not pts[-1]:
                continue
            w = 0.0 if mb == ma else (m - ma) / (mb - ma)
            guess = a + w * (b - a)
            try:
                rec = refine_periodic(guess[0], guess[1], m, shooter=sh, with_closure=with_closure)
            except (NoConvergence, CollisionProximity, StepSizeUnderflow, AmbiguousLabel) as exc:
                logger.warning("crossing T0 = %d Tbar on the curve did not refine: %s", 2 * m, exc)
                continue
            if all(abs(rec.x4 - f.x4) > 1e-8 or abs(rec.vy4 - f.vy4) > 1e-8 for f in found):
                found.append(rec)
    return sorted(found, key=lambda r: r.x4)


def find_intersection(curve_a: ContinuationCurve, curve_b: ContinuationCurve, *,
                      shooter: Shooter | None = None, tol: float = SOLVER_TOL) -> list[SeedPoint]:
    """Crossings of a C_(y,2p) polyline with a C_(vx,2p) polyline.

    Each segment crossing seeds a two-dimensional Newton solve on both
    boundary values; duplicates within 1e-8 are merged.
    """
    if curve_a.family == curve_b.family:
        logger.warning("find_intersection called with two %s curves; nothing to intersect", curve_a.family)
        return []
    if {curve_a.family, curve_b.family} != {"cy", "cvx"}:
        raise ValueError("intersections are defined between a cy and a cvx curve")
    if curve_a.p != curve_b.p:
        raise ValueError(f"curves belong to different times: p={curve_a.p} vs p={curve_b.p}")
    sh = shooter or Shooter()
    T0 = 2 * curve_a.p * sh.T_bar
    A, B = curve_a.array[:, :2], curve_b.array[:, :2]
    out: list[SeedPoint] = []
    for i in range(len(A) - 1):
        for k in range(len(B) - 1):
            hit = _segment_intersection(A[i], A[i + 1], B[k], B[k + 1])
            if hit is None:
                continue
            z = hit
            try:
                for _ in range(10):
                    r = sh.boundary(*z, T0)
                    if np.max(np.abs(r)) < tol:
                        break
                    z = z - np.linalg.solve(sh.jacobian_xv(*z, T0), r)
                else:
                    continue
            except (CollisionProximity, np.linalg.LinAlgError):
                continue
            if all(max(abs(z[0] - s.x40), abs(z[1] - s.vy40)) > 1e-8 for s in out):
                out.append(SeedPoint(float(z[0]), float(z[1]), T0))
    return out


def _segment_intersection(p1, p2, q1, q2):
    d1, d2 = p2 - p1, q2 - q1
    den = d1[0] * d2[1] - d1[1] * d2[0]
    if den == 0:
        return None
    w = q1 - p1
    s = (w[0] * d2[1] - w[1] * d2[0]) / den
    u = (w[0] * d1[1] - w[1] * d1[0]) / den
    if 0.0 <= s <= 1.0 and 0.0 <= u <= 1.0:
        return p1 + s * d1
    return None


# --- Table 1 ----------------------------------------------------------------------------------


@dataclass
class Table1Report:
    records: list[OrbitRecord]

    @property
    def failures(self) -> list[OrbitRecord]:
        return [r for r in self.records if not r.passes()]

    @property
    def passed(self) -> bool:
        """At most two failures, each of them a collision-guard casualty."""
        bad = self.failures
        return len(bad) <= 2 and all(r.status == "collision" for r in bad)

    def period_column_matches(self) -> bool:
        return all(
            r.T_over_Tbar == TABLE1[r.index - 1].T_over_Tbar for r in self.records if r.status == "ok"
        )

    def lines(self) -> list[str]:
        head = (f"{'#':>3} {'T0/Tb':>5} {'T/Tb':>5} {'paper':>5} {'x4':>19} {'vy4':>19} "
                f"{'|dx4|':>9} {'|dvy4|':>9} {'res_y':>9} {'res_vx':>9} {'closure':>9} {'it':>2} status")
        out = [head]
        for r in self.records:
            printed = TABLE1[r.index - 1]
            if r.status != "ok":
                out.append(f"{r.index:>3} {printed.T0_over_Tbar:>5} {'-':>5} {printed.T_over_Tbar:>5} "
                           f"{printed.x4:>19.15f} {printed.vy4:>19.15f} {'':>9} {'':>9} {'':>9} {'':>9} "
                           f"{'':>9} {'':>2} {r.status}: {r.message}")
                continue
            dx, dv = r.correction
            flag = "ok" if r.passes() else "FAIL"
            out.append(f"{r.index:>3} {r.T0_over_Tbar:>5} {r.T_over_Tbar:>5} {printed.T_over_Tbar:>5} "
                       f"{r.x4:>19.15f} {r.vy4:>19.15f} {dx:9.2e} {dv:9.2e} {r.res_y:9.2e} "
                       f"{r.res_vx:9.2e} {r.res_closure:9.2e} {r.iterations:>2} {flag}")
        return out


def refine_row(row: Table1Row, *, shooter: Shooter | None = None, with_closure: bool = True) -> OrbitRecord:
    """Refine one printed row; failures come back as records with a status."""
    sh = shooter or Shooter()
    m = row.T0_over_Tbar // 2
    try:
        return refine_periodic(row.x4, row.vy4, m, shooter=sh, with_closure=with_closure, index=row.index)
    except Exception as exc:
        if isinstance(exc, (CollisionProximity, StepSizeUnderflow)):
            status = "collision"
        elif isinstance(exc, NoConvergence):
            status = "no_convergence"
        elif isinstance(exc, AmbiguousLabel):
            status = "ambiguous_label"
        else:
            raise
        return OrbitRecord(
            x4=row.x4, vy4=row.vy4, T0_over_Tbar=row.T0_over_Tbar, T_over_Tbar=0, j_end=0, M=0,
            res_y=math.nan, res_vx=math.nan, index=row.index, x4_start=row.x4, vy4_start=row.vy4,
            status=status, message=str(exc),
        )


def reproduce_table1(rows=None, *, shooter: Shooter | None = None, with_closure: bool = True,
                     jobs: int = 1) -> Table1Report:
    """Refine every requested row (1-based indices, default all 34)."""
    sh = shooter or Shooter()
    selected = [TABLE1[i - 1] for i in rows] if rows is not None else list(TABLE1)
    if jobs > 1 and len(selected) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(refine_row, r, shooter=sh, with_closure=with_closure) for r in selected]
            records = [f.result() for f in futures]
    else:
        records = [refine_row(r, shooter=sh, with_closure=with_closure) for r in selected]
    records.sort(key=lambda r: r.index)
    return Table1Report(records)
