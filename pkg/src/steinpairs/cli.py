"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 usage or input error
(including a violated bound hypothesis), 3 numerical non-convergence.
Errors are reported on stderr as a JSON object ``{"error": ..., "message": ...}``.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .distributions import GigParams, KummerParams, log_density, params_from_dict, sample, stein_pair
from .errors import ConvergenceError, DomainError, NumericalError, ParameterError, PreconditionError
from .io import csv_text, dumps, load_params, read_sample_csv, sample_metadata, sidecar_path, solution_columns
from .stein import (
    bound_m,
    builtin,
    check_lemma_inequalities,
    check_structural_identity,
    solve_with_constant,
    stein_discrepancy,
)
from .stein.discrepancy import NULL_GATE

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2
EXIT_NUMERICAL = 3

IDENTITY_TOL = 1e-6


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class GridSpec:
    lo: float
    hi: float
    n: int
    spacing: str

    def points(self) -> np.ndarray:
        if self.spacing == "log":
            return np.geomspace(self.lo, self.hi, self.n)
        return np.linspace(self.lo, self.hi, self.n)

    def to_dict(self) -> dict:
        return {"lo": self.lo, "hi": self.hi, "n": self.n, "spacing": self.spacing}


def parse_grid(text: str) -> GridSpec:
    """``lo:hi:n:log|lin`` with ``0 < lo < hi`` and ``n >= 2``."""
    parts = text.split(":")
    if len(parts) != 4:
        raise UsageError(f"grid must look like lo:hi:n:log|lin, got {text!r}")
    try:
        lo, hi = float(parts[0]), float(parts[1])
        n = int(parts[2])
    except ValueError:
        raise UsageError(f"grid must look like lo:hi:n:log|lin, got {text!r}") from None
    spacing = parts[3]
    if spacing not in ("log", "lin"):
        raise UsageError("grid spacing must be 'log' or 'lin'")
    if not (np.isfinite(lo) and np.isfinite(hi)) or not (0 < lo < hi):
        raise UsageError("grid needs 0 < lo < hi")
    if n < 2:
        raise UsageError("grid needs n >= 2")
    return GridSpec(lo, hi, n, spacing)


DEFAULT_GRID = "0.001:50:400:log"


def _params(args):
    if args.params is not None:
        if any(getattr(args, k) is not None for k in ("family", "p", "a", "b", "c")):
            raise UsageError("give either --params FILE or --family with --p/--a/--b/--c, not both")
        return load_params(args.params)
    if args.family is None:
        raise UsageError("--family is required (or --params FILE)")
    need = {"gig": ("p", "a", "b"), "kummer": ("a", "b", "c")}[args.family]
    extra = [k for k in ("p", "a", "b", "c") if k not in need and getattr(args, k) is not None]
    if extra:
        raise ParameterError(
            f"{args.family}.unexpected", f"{args.family} does not take --{' --'.join(extra)}"
        )
    d = {"family": args.family}
    for k in need:
        v = getattr(args, k)
        if v is None:
            raise ParameterError(f"{args.family}.missing", f"{args.family} needs --{k}")
        d[k] = v
    return params_from_dict(d)


def _meta(args, params, grid: Optional[GridSpec] = None, seed=None) -> dict:
    m = {"command": args.command, "params": params.to_dict(), "version": __version__}
    if grid is not None:
        m["grid"] = grid.to_dict()
    if seed is not None:
        m["seed"] = seed
    return m


def _emit(args, text: str, stdout) -> None:
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        stdout.write(text)


# ---------------------------------------------------------------- commands


def cmd_density(args, stdout, stderr) -> int:
    params = _params(args)
    grid = parse_grid(args.grid)
    x = grid.points()
    ld = np.asarray(log_density(params, x))
    dens = np.exp(ld)
    if args.format == "json":
        doc = _meta(args, params, grid)
        doc.update({"columns": ["x", "log_density", "density"], "rows": [list(r) for r in zip(x, ld, dens)]})
        _emit(args, dumps(doc), stdout)
    else:
        _emit(args, csv_text(["x", "log_density", "density"], [x, ld, dens]), stdout)
    return EXIT_OK


def _tightness(pair, sol) -> dict:
    """sup|f| / (M ||h - E h||) when the bound applies, else nulls."""
    try:
        M = bound_m(pair).M
    except PreconditionError:
        return {"bound_M": None, "bound_ratio": None}
    denom = M * sol.centered_sup_norm
    return {"bound_M": M, "bound_ratio": sol.sup_abs_f / denom if denom > 0 else None}


def cmd_solve(args, stdout, stderr) -> int:
    params = _params(args)
    grid = parse_grid(args.grid)
    pair = stein_pair(params)
    h = builtin(args.h, pair, const_value=args.const)
    sol = solve_with_constant(pair, h, args.solution_constant, grid.points())
    meta = _meta(args, params, grid)
    meta["h"] = args.h
    sol_summary = dict(sol.summary(), **_tightness(pair, sol))
    summary = dict(meta, **sol_summary)
    header, cols = solution_columns(sol)
    if args.format == "json":
        doc = dict(meta, summary=sol_summary, columns=header, rows=[list(r) for r in zip(*cols)])
        _emit(args, dumps(doc), stdout)
    else:
        _emit(args, csv_text(header, cols), stdout)
        if args.out:
            with open(sidecar_path(args.out), "w", encoding="utf-8") as fh:
                fh.write(dumps(summary))
        else:
            stderr.write(dumps(summary))
    return EXIT_OK if sol.converged else EXIT_NUMERICAL


def cmd_bound(args, stdout, stderr) -> int:
    params = _params(args)
    rep = bound_m(stein_pair(params))
    doc = dict(_meta(args, params), **rep.to_dict())
    _emit(args, dumps(doc), stdout)
    return EXIT_OK


def cmd_verify(args, stdout, stderr) -> int:
    params = _params(args)
    grid = parse_grid(args.grid)
    pair = stein_pair(params)
    if args.corrupt_tau:
        pair = pair.with_tau((pair.tau[0] + args.corrupt_tau,) + tuple(pair.tau[1:]))
    ident = check_structural_identity(pair, grid.points(), IDENTITY_TOL)
    doc = _meta(args, params, grid)
    doc["corrupt_tau"] = args.corrupt_tau
    doc["structural_identity"] = ident.to_dict()
    passed = ident.passed
    if pair.monotone_tau and pair.tau[0] > 0:
        lemma = check_lemma_inequalities(pair, grid.points())
        doc["lemma"] = dict(lemma.to_dict(), applicable=True)
        passed = passed and lemma.passed
    else:
        doc["lemma"] = {"applicable": False, "reason": f"requires {pair.hypothesis}"}
    doc["passed"] = passed
    _emit(args, dumps(doc), stdout)
    return EXIT_OK if passed else EXIT_VERIFY_FAILED


def cmd_gof(args, stdout, stderr) -> int:
    params = _params(args)
    if args.sample is None:
        raise UsageError("gof needs --sample CSV")
    x = read_sample_csv(args.sample)
    rep = stein_discrepancy(x, stein_pair(params))
    doc = _meta(args, params)
    doc.update(rep.to_dict())
    doc["gate"] = NULL_GATE
    doc["reject"] = rep.statistic >= NULL_GATE
    _emit(args, dumps(doc), stdout)
    return EXIT_OK


def cmd_sample(args, stdout, stderr) -> int:
    params = _params(args)
    if args.n is None or args.n < 1:
        raise UsageError("sample needs --n >= 1")
    batch = sample(params, args.n, args.seed)
    meta = _meta(args, params, seed=args.seed)
    meta.update(sample_metadata(batch))
    if args.format == "json":
        _emit(args, dumps(dict(meta, values=batch.values)), stdout)
    else:
        _emit(args, csv_text(["x"], [batch.values]), stdout)
        if args.out:
            with open(sidecar_path(args.out), "w", encoding="utf-8") as fh:
                fh.write(dumps(meta))
    return EXIT_OK


COMMANDS = {
    "density": cmd_density,
    "solve": cmd_solve,
    "bound": cmd_bound,
    "verify": cmd_verify,
    "gof": cmd_gof,
    "sample": cmd_sample,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="steinpairs", description="Stein operators for the GIG and Kummer distributions.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, grid=False, seed=False, fmt=True):
        sp.add_argument("--family", choices=("gig", "kummer"))
        for k in ("p", "a", "b", "c"):
            sp.add_argument(f"--{k}", type=float)
        sp.add_argument("--params", help="JSON file with the parameter object")
        sp.add_argument("--out", help="output path (default: stdout)")
        if fmt:
            sp.add_argument("--format", choices=("csv", "json"), default="csv")
        if grid:
            sp.add_argument("--grid", default=DEFAULT_GRID, help="lo:hi:n:log|lin (default %(default)s)")
        if seed:
            sp.add_argument("--seed", type=int, default=0)

    common(sub.add_parser("density", help="log-density and density on a grid"), grid=True)
    sp = sub.add_parser("solve", help="solve the Stein equation on a grid")
    common(sp, grid=True)
    sp.add_argument("--h", default="exp-decay", choices=("const", "exp-decay", "logistic-step", "osc"))
    sp.add_argument("--const", type=float, default=1.0, help="value of h for --h const")
    sp.add_argument("--solution-constant", type=float, default=0.0, help="add C/(s g) to the solution")
    common(sub.add_parser("bound", help="alpha and the uniform bound M"), fmt=False)
    sp = sub.add_parser("verify", help="check (s g)' = tau g and the tail inequalities")
    common(sp, grid=True, fmt=False)
    sp.add_argument("--corrupt-tau", type=float, default=0.0, help=argparse.SUPPRESS)
    sp = sub.add_parser("gof", help="Stein discrepancy of a sample against a target")
    common(sp, fmt=False)
    sp.add_argument("--sample", help="single-column CSV of observations")
    sp = sub.add_parser("sample", help="draw a reproducible sample")
    common(sp, seed=True)
    sp.add_argument("--n", type=int)
    return p


def _fail(code: int, kind: str, message: str, stderr) -> int:
    stderr.write(dumps({"error": kind, "message": message, "exit_code": code}))
    return code


def main(argv: Optional[Sequence[str]] = None, *, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args, stdout, stderr)
    except UsageError as exc:
        return _fail(EXIT_USAGE, "usage", str(exc), stderr)
    except ParameterError as exc:
        return _fail(EXIT_USAGE, exc.code, str(exc), stderr)
    except PreconditionError as exc:
        return _fail(EXIT_USAGE, "hypothesis", str(exc), stderr)
    except DomainError as exc:
        return _fail(EXIT_USAGE, "input", str(exc), stderr)
    except (ConvergenceError, NumericalError) as exc:
        return _fail(EXIT_NUMERICAL, "numerical", str(exc), stderr)
    except OSError as exc:
        return _fail(EXIT_USAGE, "io", str(exc), stderr)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
