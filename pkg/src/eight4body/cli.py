"""Command-line interface.

Times given on the command line are in units of ``Tbar = T / 12``.

Exit codes: 0 pass, 1 check failed, 2 systemic failure, 3 no
convergence, 4 collision guard, 5 domain error, 64 usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import io as fio
from .choreography import (
    ENV_OVERRIDE,
    PRINTED,
    RESTRICTED_CONFIG,
    EightConstants,
    default_constants,
    load_constants,
    refine_constants,
    verify_choreography,
)
from .errors import (
    CollisionProximity,
    DomainError,
    Eight4BodyError,
    NoConvergence,
    NoPhysicalSolution,
)
from .integrator import integrate
from .kepler2b import APSIDES, approx_velocity, eccentricity_from_period, kepler_seed
from .porbits import (
    CLOSURE_TOL,
    FAMILIES,
    ContinuationCurve,
    SeedPoint,
    Shooter,
    detect_periodic_on_curve,
    find_intersection,
    find_seed,
    refine_periodic,
    reproduce_table1,
    trace_curve,
)
from .table1 import TABLE1

logger = logging.getLogger("eight4body")

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_SYSTEMIC = 2
EXIT_NO_CONVERGENCE = 3
EXIT_COLLISION = 4
EXIT_DOMAIN = 5
EXIT_USAGE = 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# --- argument types -----------------------------------------------------------------------


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def _nonneg_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {v}")
    return v


def _positive_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not v > 0 or not np.isfinite(v):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return v


def _finite_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not np.isfinite(v):
        raise argparse.ArgumentTypeError(f"expected a finite number, got {text}")
    return v


def parse_rows(text: str) -> list[int]:
    """``"15"``, ``"1-5,9"`` -> sorted unique 1-based row indices."""
    out: set[int] = set()
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            if "-" in part:
                a, b = (int(s) for s in part.split("-", 1))
                out.update(range(a, b + 1))
            else:
                out.add(int(part))
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad row selection {part!r}") from None
    if not out:
        raise argparse.ArgumentTypeError("empty row selection")
    bad = sorted(i for i in out if not 1 <= i <= len(TABLE1))
    if bad:
        raise argparse.ArgumentTypeError(f"rows must lie in 1..{len(TABLE1)}, got {bad}")
    return sorted(out)


# --- helpers ------------------------------------------------------------------------------


def _constants(args) -> EightConstants | None:
    """Explicit ``--constants`` wins over the environment; ``None`` means library default."""
    path = getattr(args, "constants", None)
    if path:
        return load_constants(path)
    return None


def _shooter(args) -> Shooter:
    return Shooter(_constants(args))


def _open_out(path: str | None):
    if path in (None, "-"):
        return sys.stdout
    return open(fio.ensure_parent(path), "w", encoding="utf-8", newline="")


def _figure_path(out: str | None, default_name: str, suffix: str = ".png") -> Path:
    if out in (None, "-"):
        return Path(default_name + suffix)
    p = Path(out)
    return p.with_name(p.stem + suffix)


def _emit(text: str) -> None:
    sys.stdout.write(text if text.endswith("\n") else text + "\n")


# --- commands -----------------------------------------------------------------------------


def cmd_verify_eight(args) -> int:
    constants = _constants(args)
    if constants is None:
        env = os.environ.get(ENV_OVERRIDE)
        constants = load_constants(env) if env else PRINTED
    report = verify_choreography(constants=constants)
    payload = report.to_json()
    payload["source"] = constants.source
    if args.refine:
        ref = refine_constants(constants)
        payload["refined_period"] = ref.constants.period
        payload["refined_closure"] = ref.closure_refined
    if args.json:
        _emit(json.dumps(payload, indent=2))
    else:
        _emit(f"constants        {constants.source}")
        _emit(f"period           {report.period:.15g}")
        _emit(f"closure          {report.closure:.3e}")
        _emit(f"shift residual   {report.shift_residual:.3e} (onto body {report.shift_target})")
        for m in sorted(report.isosceles):
            _emit(f"isosceles t={2 * m:>2} Tbar  {report.isosceles[m]:.3e}  j={report.labels[m]}")
        if args.refine:
            _emit(f"refined period   {payload['refined_period']:.15g}")
            _emit(f"refined closure  {payload['refined_closure']:.3e}")
        for f in report.failures:
            _emit(f"FAIL {f}")
        _emit("PASS" if report.passed else "FAIL")
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_table1(args) -> int:
    constants = _constants(args)
    check = verify_choreography(constants=constants if constants is not None else default_constants())
    if not check.passed:
        for f in check.failures:
            logger.error("choreography check failed: %s", f)
        return EXIT_SYSTEMIC
    sh = Shooter(constants)
    jobs = args.jobs or (os.cpu_count() or 1)
    report = reproduce_table1(args.rows, shooter=sh, with_closure=not args.no_closure, jobs=jobs)
    if args.records:
        fio.write_records(fio.ensure_parent(args.records), report.records)
    lines = report.lines()
    fh = _open_out(args.out)
    try:
        for line in lines:
            fh.write(line + "\n")
    finally:
        if fh is not sys.stdout:
            fh.close()
    n_ok = len(report.records) - len(report.failures)
    _emit(f"# rows passing: {n_ok}/{len(report.records)}; "
          f"period column {'matches' if report.period_column_matches() else 'DIFFERS'}")
    if args.plot:
        from .plotting import plot_table_comparison

        plot_table_comparison(report.records, _figure_path(args.records or args.out, "table1"))
    return EXIT_OK if report.passed and report.period_column_matches() else EXIT_FAIL


def _seed_for(family: str, args, sh: Shooter) -> SeedPoint:
    T0 = 2 * args.p * sh.T_bar
    guess = SeedPoint(args.x40, args.vy40_guess, T0)
    if family == "cr":
        rec = refine_periodic(args.x40, args.vy40_guess, args.p, shooter=sh, with_closure=False)
        return SeedPoint(rec.x4, rec.vy4, T0)
    return find_seed(args.p, "y" if family == "cy" else "vx", guess, "x40", shooter=sh)


def cmd_trace(args) -> int:
    families = args.family or ["cy"]
    sh = _shooter(args)
    directions = (1, -1) if args.direction == 0 else (args.direction,)
    curves: list[ContinuationCurve] = []
    if args.max_points > 0:
        for fam in families:
            seed = _seed_for(fam, args, sh)
            for d in directions:
                c = trace_curve(seed, fam, step=args.step, max_points=args.max_points,
                                direction=d, p=args.p if fam != "cr" else None, shooter=sh)
                if c.truncated:
                    logger.warning("%s curve (direction %+d) truncated: %s", fam, d, c.status)
                curves.append(c)
    fh = _open_out(args.out)
    try:
        fio.dump_curves(fh, curves)
    finally:
        if fh is not sys.stdout:
            fh.close()

    marks = []
    records = []
    for c in curves:
        if c.family == "cr":
            records += detect_periodic_on_curve(c, shooter=sh)
    if records:
        uniq = []
        for r in sorted(records, key=lambda r: r.x4):
            if all(abs(r.x4 - u.x4) > 1e-8 or abs(r.vy4 - u.vy4) > 1e-8 for u in uniq):
                uniq.append(r)
        records = uniq
        for r in records:
            logger.info("periodic point T0=%d Tbar T=%d Tbar x4=%.15f vy4=%.15f",
                        r.T0_over_Tbar, r.T_over_Tbar, r.x4, r.vy4)
            marks.append((r.x4, r.vy4))
        if args.records:
            fio.write_records(fio.ensure_parent(args.records), records)
    ys = [c for c in curves if c.family == "cy"]
    vxs = [c for c in curves if c.family == "cvx"]
    for a in ys:
        for b in vxs:
            for s in find_intersection(a, b, shooter=sh):
                if all(max(abs(s.x40 - x), abs(s.vy40 - v)) > 1e-8 for x, v in marks):
                    marks.append((s.x40, s.vy40))
                    logger.info("intersection x40=%.15f vy40=%.15f", s.x40, s.vy40)
    if args.out not in (None, "-"):
        for x, v in marks:
            _emit(f"# point x40={x:.15f} vy40={v:.15f}")
    if args.plot:
        from .plotting import plot_curves

        plot_curves(curves, _figure_path(args.out, "trace"), marks=marks)
    return EXIT_OK


def cmd_orbit(args) -> int:
    sh = _shooter(args)
    rec = refine_periodic(args.x40, args.vy40, args.m, shooter=sh, with_closure=True)
    T = rec.T_over_Tbar * sh.T_bar
    traj = integrate(RESTRICTED_CONFIG, sh.initial(rec.x4, rec.vy4), T, sh.settings)
    table = fio.trajectory_table(traj, args.sample_step * sh.T_bar)
    fh = _open_out(args.out)
    try:
        fio.dump_trajectory(fh, table)
    finally:
        if fh is not sys.stdout:
            fh.close()
    closes = rec.res_closure_particle < CLOSURE_TOL
    summary = (f"# x4={rec.x4:.15f} vy4={rec.vy4:.15f} iterations={rec.iterations} "
               f"T0={rec.T0_over_Tbar} Tbar T={rec.T_over_Tbar} Tbar j_end={rec.j_end} "
               f"closure={rec.res_closure:.3e} particle_closure={rec.res_closure_particle:.3e} "
               f"samples={len(table)}")
    print(summary, file=sys.stderr if args.out in (None, "-") else sys.stdout)
    if args.plot:
        from .plotting import plot_orbit

        plot_orbit(table, _figure_path(args.out, "orbit"),
                   title=f"T0 = {rec.T0_over_Tbar} Tbar, T = {rec.T_over_Tbar} Tbar")
    if not closes:
        logger.error("orbit does not close over T: particle residual %.3e", rec.res_closure_particle)
        return EXIT_FAIL
    return EXIT_OK


def cmd_kepler_seed(args) -> int:
    if args.e is None and args.x4 is None:
        raise UsageError("one of --e or --x4 is required")
    e = args.e
    if e is None:
        e = eccentricity_from_period(args.x4, args.m, apsis=args.apsis, revolutions=args.revolutions)
    seed = kepler_seed(args.m, e, apsis=args.apsis, revolutions=args.revolutions)
    _emit(f"m={args.m} e={e:.15g} x40={seed.x40:.15f} vy40={seed.vy40:.15f} "
          f"T0={2 * args.m} Tbar")
    if not args.refine:
        return EXIT_OK
    sh = _shooter(args)
    rec = refine_periodic(seed.x40, seed.vy40, args.m, shooter=sh, with_closure=False)
    dx, dv = rec.x4 - seed.x40, rec.vy4 - seed.vy40
    _emit(f"refined x40={rec.x4:.15f} vy40={rec.vy4:.15f} correction=({dx:.3e}, {dv:.3e}) "
          f"iterations={rec.iterations} T={rec.T_over_Tbar} Tbar")
    rel = abs(approx_velocity(rec.x4, max(0.0, min(e, 1.0)), args.apsis) - rec.vy4) / abs(rec.vy4)
    logger.info("two-body velocity relative error at the refined point: %.3e", rel)
    return EXIT_OK


# --- parser -------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="eight4body", description="Periodic orbits of a massless body "
                     "moving under the figure-eight choreography.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    common = _Parser(add_help=False)
    common.add_argument("--constants", metavar="JSON",
                        help=f"choreography constants file (default: ${ENV_OVERRIDE}, else refined)")
    common.add_argument("--plot", action="store_true", help="also write a PNG next to the output")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("verify-eight", parents=[common], help="check the choreography constants")
    p.add_argument("--json", action="store_true")
    p.add_argument("--refine", action="store_true", help="also report the refined period")
    p.set_defaults(func=cmd_verify_eight)

    p = sub.add_parser("table1", parents=[common], help="refine the tabulated initial conditions")
    p.add_argument("--rows", type=parse_rows, default=None, help="e.g. 15 or 1-5,9 (default: all)")
    p.add_argument("--jobs", type=_positive_int, default=None,
                   help="worker processes (default: available CPUs)")
    p.add_argument("--records", metavar="JSONL", help="orbit-record output file")
    p.add_argument("--out", default="-", help="comparison table (default: stdout)")
    p.add_argument("--no-closure", action="store_true", help="skip full-period closure integration")
    p.set_defaults(func=cmd_table1)

    p = sub.add_parser("trace", parents=[common], help="trace solution curves")
    p.add_argument("--family", action="append", choices=FAMILIES,
                   help="cy, cvx or cr; repeat to trace several (default: cy)")
    p.add_argument("--p", type=_positive_int, required=True, help="time 2p Tbar (seed period for cr)")
    p.add_argument("--x40", type=_finite_float, required=True)
    p.add_argument("--vy40-guess", type=_finite_float, required=True)
    p.add_argument("--step", type=_positive_float, default=1e-2, help="arclength step")
    p.add_argument("--max-points", type=_nonneg_int, default=100)
    p.add_argument("--direction", type=int, choices=(-1, 0, 1), default=1, help="0 traces both ways")
    p.add_argument("--out", default="-", help="curve CSV (default: stdout)")
    p.add_argument("--records", metavar="JSONL", help="periodic points detected on cr curves")
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("orbit", parents=[common], help="refine one orbit and sample it over its period")
    p.add_argument("--x40", type=_finite_float, required=True)
    p.add_argument("--vy40", type=_finite_float, required=True)
    p.add_argument("--m", type=_positive_int, required=True, help="half-period T0 = 2m Tbar")
    p.add_argument("--sample-step", type=_positive_float, default=0.05, help="in units of Tbar")
    p.add_argument("--out", default="-", help="trajectory CSV (default: stdout)")
    p.set_defaults(func=cmd_orbit)

    p = sub.add_parser("kepler-seed", parents=[common], help="two-body seed for distant orbits")
    p.add_argument("--m", type=_positive_int, required=True)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--e", type=_finite_float, help="eccentricity")
    g.add_argument("--x4", type=_positive_float, help="derive e from this apsis distance")
    p.add_argument("--apsis", choices=APSIDES, default="apocenter")
    p.add_argument("--revolutions", type=_positive_float, default=0.5,
                   help="Kepler revolutions per half-period T0 (default 0.5)")
    p.add_argument("--refine", action="store_true", help="Newton-refine the seed")
    p.set_defaults(func=cmd_kepler_seed)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"eight4body: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NoConvergence as exc:
        print(f"eight4body: no convergence: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    except CollisionProximity as exc:
        print(f"eight4body: collision guard: {exc}", file=sys.stderr)
        return EXIT_COLLISION
    except (DomainError, NoPhysicalSolution) as exc:
        print(f"eight4body: domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (Eight4BodyError, OSError, ValueError) as exc:
        print(f"eight4body: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SYSTEMIC


if __name__ == "__main__":
    sys.exit(main())
