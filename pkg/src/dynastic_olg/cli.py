"""Command-line front end.

Commands: ``solve``, ``verify``, ``sweep`` and ``report``.  Every CSV file
starts with a ``# schema-sha256=...`` comment naming a hash of its column
list, followed by the header row.  Floats are written as their shortest
round-trip decimal.  Exit codes: 0 ok, 2 bad config, 3 no convergence,
4 invariant violation, 5 oracle disagreement.  Errors print one
``Reason: detail`` line to standard error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import os
import sys
import tempfile

import numpy as np

from .config import MODEL_KEYS, load_config
from .errors import ConfigError, InvalidGrid, ValidationError
from .oracle import OracleOptions, oracle_search
from .solver import invariant_violations, solve_steady_state, verify_state
from .statics import ReportCell, SweepRow, sweep, table1_report

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NO_CONVERGENCE = 3
EXIT_INVARIANT = 4
EXIT_ORACLE = 5

SOLVE_COLUMNS = ("name",) + MODEL_KEYS + (
    "n", "c1", "c2", "ph", "s", "e", "hp", "hm", "b", "w", "V", "lambda", "mu",
    "mh_share", "residual_norm")
ALLOC_FIELDS = ("c1", "c2", "ph", "s", "n", "e", "hp", "hm")
ORACLE_TOL = 1e-3


class CommandError(Exception):
    def __init__(self, code, reason, detail):
        self.code, self.reason, self.detail = code, reason, detail
        super().__init__(f"{reason}: {detail}")


def fmt(value):
    if isinstance(value, str):
        return value
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def schema_line(columns):
    digest = hashlib.sha256(",".join(columns).encode()).hexdigest()[:16]
    return f"# schema-sha256={digest} columns={len(columns)}\n"


def csv_text(columns, rows):
    buf = io.StringIO()
    buf.write(schema_line(columns))
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


def write_atomic(path, text):
    """Write ``text`` to a sibling temp file, then rename it over ``path``."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _load(path):
    try:
        return load_config(path)
    except ConfigError as exc:
        raise CommandError(EXIT_CONFIG, "ConfigError", str(exc)) from exc
    except ValidationError as exc:
        raise CommandError(EXIT_CONFIG, "ValidationError", str(exc)) from exc
    except OSError as exc:
        raise CommandError(EXIT_CONFIG, "ConfigError", f"cannot read {path}: {exc.strerror}") from exc


def _solve(cfg):
    out = solve_steady_state(cfg.params, cfg.solver)
    if not out.converged:
        raise CommandError(EXIT_NO_CONVERGENCE, out.status.value, out.message or "solver failed")
    bad = invariant_violations(out.state, cfg.params, cfg.solver.residual_tol)
    if bad:
        raise CommandError(EXIT_INVARIANT, "InvariantViolation", ",".join(bad))
    return out.state


def solve_row(cfg, state):
    a, p = state.alloc, cfg.params
    return [cfg.name, *(getattr(p, k) for k in MODEL_KEYS),
            a.n, a.c1, a.c2, a.ph, a.s, a.e, a.hp, a.hm, a.b, state.w, state.V,
            state.prices.lam, state.prices.mu, a.mh_share, state.residual_norm]


def cmd_solve(args):
    cfg = _load(args.config)
    state = _solve(cfg)
    write_atomic(args.out, csv_text(SOLVE_COLUMNS, [solve_row(cfg, state)]))
    return EXIT_OK


def cmd_verify(args):
    cfg = _load(args.config)
    state = _solve(cfg)
    base = cfg.oracle
    try:
        opts = OracleOptions(
            horizon=base.horizon if args.horizon is None else args.horizon,
            grid_points=base.grid_points if args.grid is None else args.grid,
            refine_rounds=base.refine_rounds if args.refine is None else args.refine,
            max_passes=base.max_passes, pass_tol=base.pass_tol)
    except ValueError as exc:
        raise CommandError(EXIT_CONFIG, "ValidationError", str(exc)) from exc
    result = oracle_search(cfg.params, opts)
    residuals = verify_state(state, cfg.params)

    lines = [f"scenario {cfg.name}",
             f"oracle horizon={opts.horizon} grid={opts.grid_points} "
             f"refine={opts.refine_rounds} passes={result.passes}",
             f"{'variable':<10}{'solver':>24}{'oracle':>24}{'rel_diff':>24}"]
    worst = 0.0
    for k in ALLOC_FIELDS:
        s_val, o_val = getattr(state.alloc, k), getattr(result.alloc, k)
        rel = abs(o_val - s_val) / abs(s_val)
        worst = max(worst, rel)
        lines.append(f"{k:<10}{fmt(s_val):>24}{fmt(o_val):>24}{fmt(rel):>24}")
    lines.append("residuals")
    for k, v in residuals.as_dict().items():
        lines.append(f"{k:<10}{fmt(v):>24}")
    norm = residuals.max_abs()
    ok = worst <= ORACLE_TOL and norm <= cfg.solver.residual_tol
    lines.append(f"max_rel_diff={fmt(worst)} residual_norm={fmt(norm)} "
                 f"result={'agree' if ok else 'disagree'}")
    text = "\n".join(lines) + "\n"
    sys.stdout.write(text)
    if args.out:
        write_atomic(args.out, text)
    if norm > cfg.solver.residual_tol:
        raise CommandError(EXIT_INVARIANT, "InvariantViolation", f"residual_norm={fmt(norm)}")
    if worst > ORACLE_TOL:
        raise CommandError(EXIT_ORACLE, "OracleDisagreement", f"max_rel_diff={fmt(worst)}")
    return EXIT_OK


def cmd_sweep(args):
    cfg = _load(args.config)
    if args.steps < 1:
        raise CommandError(EXIT_CONFIG, "InvalidGrid", "steps must be >= 1")
    grid = np.linspace(args.start, args.stop, args.steps) if args.steps > 1 else [args.start]
    try:
        rows = sweep(cfg.params, args.param, grid, cfg.solver)
    except InvalidGrid as exc:
        raise CommandError(EXIT_CONFIG, "InvalidGrid", str(exc)) from exc
    cols = SweepRow.columns()
    write_atomic(args.out, csv_text(cols, [[getattr(r, c) for c in cols] for r in rows]))
    if not any(r.converged for r in rows):
        raise CommandError(EXIT_NO_CONVERGENCE, rows[0].status, "no sweep point converged")
    return EXIT_OK


def cmd_report(args):
    cfg = _load(args.config)
    _solve(cfg)
    try:
        report = table1_report(cfg.params, opts=cfg.solver)
    except ValidationError as exc:
        raise CommandError(EXIT_CONFIG, "ValidationError", str(exc)) from exc
    write_atomic(args.out, csv_text(ReportCell.COLUMNS, report.rows()))
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="dynastic-olg",
        description="Steady state and comparative statics of a dynastic OLG model "
                    "with PAYG pensions and three child-quality investments.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text, out_required=True):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, metavar="PATH")
        p.add_argument("--out", required=out_required, metavar="PATH")
        p.set_defaults(func=func)
        return p

    add("solve", cmd_solve, "solve the steady state and write a one-row CSV")
    p = add("verify", cmd_verify, "compare the solver with the brute-force oracle",
            out_required=False)
    p.add_argument("--horizon", type=int, metavar="T")
    p.add_argument("--grid", type=int, metavar="N")
    p.add_argument("--refine", type=int, metavar="K")
    p = add("sweep", cmd_sweep, "solve along a grid of one parameter")
    p.add_argument("--param", required=True, metavar="NAME")
    p.add_argument("--from", dest="start", type=float, required=True, metavar="X")
    p.add_argument("--to", dest="stop", type=float, required=True, metavar="Y")
    p.add_argument("--steps", type=int, required=True, metavar="N")
    add("report", cmd_report, "write the comparative-statics sign report")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CommandError as exc:
        detail = " ".join(str(exc.detail).split())
        print(f"{exc.reason}: {detail}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
