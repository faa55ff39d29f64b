"""Command-line interface: ``youngop verify | compare | surface | gen``.

Exit status: 0 all inequalities hold, 1 an inequality failed, 2 usage
error, 3 I/O error. ``YOUNGOP_SEED`` sets the default seed.
"""
from __future__ import annotations

import argparse
import io
import math
import os
import sys
from typing import List, Optional, Sequence

from . import functional_bounds as fb
from . import operator_young as oy
from . import scalar_young as sy
from . import verify as vf
from .errors import DimMismatch, InvalidCondition, NoWitnessFound, YoungOpError
from .symcalc import MAX_DIM, SpdMatrix, read_matrix, write_matrix

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_IO = 3

SEED_ENV = "YOUNGOP_SEED"


class _UsageError(Exception):
    pass


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None or raw.strip() == "":
        return 0
    try:
        return int(raw)
    except ValueError:
        raise _UsageError(f"{SEED_ENV} must be an integer, got {raw!r}")


def _dims(text: str) -> List[int]:
    try:
        dims = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid dimension list {text!r}")
    if not dims or any(not 1 <= d <= MAX_DIM for d in dims):
        raise argparse.ArgumentTypeError(f"dimensions must lie in [1, {MAX_DIM}]")
    return dims


def _pair_of_floats(text: str):
    try:
        lo, hi = (float(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'lo,hi', got {text!r}")
    return lo, hi


def _grid(text: str):
    try:
        a, b = (int(t) for t in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'NUxX' such as 200x200, got {text!r}")
    if a < 1 or b < 1:
        raise argparse.ArgumentTypeError("grid sizes must be positive")
    return a, b


def _emit(text: str, path: Optional[str]) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


# -- verify -------------------------------------------------------------------


def _nonordering_result(mode: str) -> vf.SuiteResult:
    res = vf.SuiteResult(f"nonordering-{mode}", 0, trials_run=1)
    try:
        pos, neg = vf.nonordering_search(mode=mode)
        res.worst_margin = min(pos[2], -neg[2])
    except NoWitnessFound as exc:
        res.failures.append(vf.Failure(0, str(exc), -math.inf, -math.inf))
        res.worst_margin = -math.inf
    return res


def collect_verify(seed: int, dims: Sequence[int], trials: int,
                   tol_rel: float = oy.DEFAULT_TOL) -> List[vf.SuiteResult]:
    """All suites run by ``verify``: operator families over ``dims``, scalar
    families, the midpoint identity, the non-ordering search and both
    reduction oracles."""
    results = vf.run_operator_suites(seed, dims, trials, tol_rel=tol_rel)
    results += vf.scalar_family_suites(seed, n=min(100_000, 400 * trials))
    results.append(vf.km_identity_check(seed, n=min(10_000, 40 * trials)))
    results.append(_nonordering_result("P"))
    results.append(_nonordering_result("Q"))
    results.append(vf.scalar_oracle_check(trials, seed))
    results.append(vf.commuting_oracle_check(max(1, trials // 4), 4, seed))
    return results


def cmd_verify(args) -> int:
    results = collect_verify(args.seed, args.dims, args.trials, args.tol)
    text = vf.format_csv(results) if args.format == "csv" else vf.format_text(results)
    _emit(text, args.output)
    failing = sorted({r.family_tag for r in results if not r.passed})
    if failing:
        sys.stderr.write("failing families: " + ", ".join(failing) + "\n")
        return EXIT_FAIL
    return EXIT_OK


# -- compare ------------------------------------------------------------------


def _fmt(x: float, csv: bool) -> str:
    return f"{x:.17g}" if csv else f"{x:.6g}"


def _scalar_rows(a: float, b: float, nu: float):
    rows = []
    for fam in sy.ScalarBoundFamily:
        r = sy.evaluate_family(fam, a, b, nu)
        lo, mid, up = float(r.lower), float(r.middle), float(r.upper)
        slack = (up - mid) / max(abs(mid), 1e-300) if math.isfinite(up) else math.inf
        rows.append((fam.tag, fam.form, lo, mid, up, bool(r.holds()), slack))
    rows.sort(key=lambda t: (t[1], t[6], t[0]))
    return rows


def _operator_reports(A: SpdMatrix, B: SpdMatrix, nu: float):
    """``(tag, report or None, reason)`` for every family, in registry order."""
    out = []

    def attempt(tag, fn):
        try:
            out.append((tag, fn(), ""))
        except YoungOpError as exc:
            out.append((tag, None, str(exc)))

    w = oy.spectrum_window(A, B)
    attempt("amgm", lambda: oy.amgm_report(A, B, nu))
    try:
        c = oy.SandwichCondition.from_pair(A, B)
    except InvalidCondition as exc:
        c, reason = None, str(exc)
    for tag, fn in (("thmA", oy.thmA_bounds), ("thmB", oy.thmB_bounds)):
        if c is None:
            out.append((tag, None, reason))
        else:
            attempt(tag, lambda fn=fn: fn(A, B, nu, c))
    attempt("thm31", lambda: oy.thm31_bounds(A, B, nu))
    attempt("thm32", lambda: oy.thm32_bounds(A, B, nu, w))
    attempt("thm33", lambda: oy.thm33_bounds(A, B, nu, w))
    if c is None:
        out.append(("cor31", None, reason))
    else:
        attempt("cor31", lambda: oy.cor31_bounds(A, B, nu, c))
    # spectrum_window's guard makes lo < hi, so every FunctionSpec is valid
    for name, mk in vf._SPECS.items():
        attempt(f"thm41-{name}", lambda mk=mk, name=name: fb.thm41_bounds(
            A, B, mk(w.lo, w.hi), family=f"thm41-{name}"))
    for p in (-1.0, 0.5, 2.0, 3.0):
        attempt(f"power{p:g}", lambda p=p: fb.power_bounds(A, B, p, w))
    for name, mk in vf._SPECS.items():
        attempt(f"thm42-{name}", lambda mk=mk, name=name: fb.thm42_bounds(
            A, B, nu, mk(w.lo, w.hi), family=f"thm42-{name}"))
    attempt("log", lambda: fb.log_bounds(A, B, nu, w))
    return out


def cmd_compare(args) -> int:
    csv = args.format == "csv"
    buf = io.StringIO()
    ok = True
    if args.A is not None or args.B is not None:
        if args.A is None or args.B is None:
            raise _UsageError("--A and --B must be given together")
        A, B = SpdMatrix(read_matrix(args.A)), SpdMatrix(read_matrix(args.B))
        if A.dim != B.dim:
            raise DimMismatch(f"dimension mismatch: {A.dim} vs {B.dim}")
        reps = _operator_reports(A, B, args.nu)
        good = [(t, r) for t, r, _ in reps if r is not None]
        good.sort(key=lambda tr: (tr[1].upper_margin.relative, tr[0]))
        sep = "," if csv else " "
        buf.write(sep.join(["family", "lower_margin", "upper_margin", "rel_upper_slack", "pass"]) + "\n")
        for tag, r in good:
            ok &= r.passed
            buf.write(sep.join([
                tag, _fmt(r.lower_margin.min_eig_of_difference, csv),
                _fmt(r.upper_margin.min_eig_of_difference, csv),
                _fmt(r.upper_margin.relative, csv), "PASS" if r.passed else "FAIL",
            ]) + "\n")
        for tag, r, reason in reps:
            if r is None:
                buf.write(f"# inapplicable {tag}: {reason}\n")
    else:
        if args.a is None or args.b is None:
            raise _UsageError("compare needs --a/--b scalars or --A/--B matrix files")
        sep = "," if csv else " "
        buf.write(sep.join(["family", "form", "lower", "middle", "upper", "pass"]) + "\n")
        for tag, form, lo, mid, up, holds, _ in _scalar_rows(args.a, args.b, args.nu):
            ok &= holds
            buf.write(sep.join([tag, form, _fmt(lo, csv), _fmt(mid, csv), _fmt(up, csv),
                                "PASS" if holds else "FAIL"]) + "\n")
    _emit(buf.getvalue(), args.output)
    return EXIT_OK if ok else EXIT_FAIL


# -- surface ------------------------------------------------------------------


def cmd_surface(args) -> int:
    domain = None
    if args.nu_range is not None or args.x_range is not None:
        nu_r = args.nu_range or (0.0, 1.0)
        x_r = args.x_range or (0.0, 2.0 if args.mode == "P" else 10.0)
        domain = (nu_r, x_r)
    try:
        nu, x, first, second = vf.surface_grid(args.mode, args.grid, domain)
    except ValueError as exc:
        raise _UsageError(str(exc))
    diff = second - first
    lines = ["nu,x,first_bound,second_bound,difference"]
    for row in zip(nu.ravel(), x.ravel(), first.ravel(), second.ravel(), diff.ravel()):
        lines.append(",".join(f"{v:.17g}" for v in row))
    try:
        pos, neg = vf.nonordering_search(args.grid, domain, args.mode)
        lines.append(
            f"# witnesses mode={args.mode} positive nu={pos[0]:.17g} x={pos[1]:.17g} "
            f"difference={pos[2]:.17g} negative nu={neg[0]:.17g} x={neg[1]:.17g} "
            f"difference={neg[2]:.17g}"
        )
    except NoWitnessFound:
        lines.append(f"# witnesses mode={args.mode} none: no sign change on this grid")
    _emit("\n".join(lines) + "\n", args.output)
    return EXIT_OK


# -- gen ------------------------------------------------------------------------


def cmd_gen(args) -> int:
    c = oy.SandwichCondition(args.mprime, args.m, args.M, args.Mprime, args.cond)
    cfg = vf.GeneratorConfig(seed=args.seed, dim=args.dim, trials=1)
    a, b = vf.random_sandwich_pair(cfg, c)
    write_matrix(args.out_a, a)
    write_matrix(args.out_b, b)
    c.check(SpdMatrix(read_matrix(args.out_a)), SpdMatrix(read_matrix(args.out_b)))
    sys.stdout.write(f"wrote {args.out_a} and {args.out_b} (condition {args.cond} verified)\n")
    return EXIT_OK


# -- parser -----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="youngop",
        description="Certified checks of Young-type inequalities for SPD matrices.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run every property suite")
    v.add_argument("--seed", type=int, default=None, help=f"default: ${SEED_ENV} or 0")
    v.add_argument("--dims", type=_dims, default=[1, 2, 4, 8], help="comma list, e.g. 1,2,4,8")
    v.add_argument("--trials", type=int, default=250)
    v.add_argument("--tol", type=float, default=oy.DEFAULT_TOL, help="relative Loewner tolerance")
    v.add_argument("--format", choices=("text", "csv"), default="text")
    v.add_argument("-o", "--output", default=None)
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("compare", help="evaluate every applicable family on given inputs")
    c.add_argument("--a", type=float)
    c.add_argument("--b", type=float)
    c.add_argument("--nu", type=float, default=0.5)
    c.add_argument("--A", help="matrix file")
    c.add_argument("--B", help="matrix file")
    c.add_argument("--format", choices=("text", "csv"), default="text")
    c.add_argument("-o", "--output", default=None)
    c.set_defaults(func=cmd_compare)

    s = sub.add_parser("surface", help="CSV of the competing upper-bound surfaces")
    s.add_argument("--mode", type=str.upper, choices=("P", "Q"), default="P")
    s.add_argument("--grid", type=_grid, default=(200, 200), help="NUxX, e.g. 200x200")
    s.add_argument("--nu-range", type=_pair_of_floats, default=None)
    s.add_argument("--x-range", type=_pair_of_floats, default=None)
    s.add_argument("-o", "--output", default=None)
    s.set_defaults(func=cmd_surface)

    g = sub.add_parser("gen", help="write a random pair satisfying a sandwich condition")
    g.add_argument("--cond", choices=("i", "ii"), default="i")
    g.add_argument("--mprime", type=float, required=True)
    g.add_argument("--m", type=float, required=True)
    g.add_argument("--M", type=float, required=True)
    g.add_argument("--Mprime", type=float, required=True)
    g.add_argument("--dim", type=int, default=3)
    g.add_argument("--seed", type=int, default=None)
    g.add_argument("--out-a", default="A.txt")
    g.add_argument("--out-b", default="B.txt")
    g.set_defaults(func=cmd_gen)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        if getattr(args, "seed", 0) is None:
            args.seed = _default_seed()
        if args.command == "verify":
            if args.trials < 1:
                raise _UsageError("--trials must be at least 1")
            if not args.tol >= 0:
                raise _UsageError("--tol must be nonnegative")
        if args.command == "compare" and not 0.0 <= args.nu <= 1.0:
            raise _UsageError("--nu must lie in [0, 1]")
        if args.command == "gen" and not 1 <= args.dim <= MAX_DIM:
            raise _UsageError(f"--dim must lie in [1, {MAX_DIM}]")
        return args.func(args)
    except _UsageError as exc:
        sys.stderr.write(f"youngop: error: {exc}\n")
        return EXIT_USAGE
    except OSError as exc:
        sys.stderr.write(f"youngop: I/O error: {exc}\n")
        return EXIT_IO
    except (InvalidCondition, DimMismatch, ValueError, YoungOpError) as exc:
        sys.stderr.write(f"youngop: error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
