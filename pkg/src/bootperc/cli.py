"""Command-line front end.

Subcommands: critical, simulate, sweep, martingale, giant.  Every
subcommand is deterministic in (flags, seed): repeated invocations yield
byte-identical outputs regardless of worker count.  Output files are
written atomically (temp file + rename), so interrupted runs never leave
truncated artifacts.

Exit codes: 0 success, 2 invalid parameters/flags, 3 degenerate regime,
4 output not writable.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
import tempfile

from ._parallel import WORKERS_ENV
from .critical import (
    DegenerateRegimeError,
    critical_quantities,
    drift_table,
)
from .experiments import (
    giant_completion_trials,
    seed_size_for_offset,
    sweep_omega0,
)
from .martingale import (
    collect_martingale_samples,
    empirical_martingale_check,
    empirical_variance_check,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DEGENERATE = 3
EXIT_UNWRITABLE = 4

_SYMBOLS = (
    "Symbols: n = vertex count; p = edge probability; r = infection "
    "threshold; a = initially infected count; omega0 = a - a_c (signed "
    "offset from the critical seed size); t0 = bottleneck scale; "
    "t_c = bottleneck step; a_c = critical seed size."
)


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def parse_probability(text: str, n: int) -> float:
    """Edge probability as a literal ("1e-4") or exponent form ("n^-0.7")."""
    match = re.fullmatch(r"n\^(-?[0-9.]+)", text.strip())
    if match:
        p = float(n) ** float(match.group(1))
    else:
        try:
            p = float(text)
        except ValueError:
            raise CliError(f"cannot parse probability {text!r}", EXIT_USAGE) from None
    if not 0.0 <= p <= 1.0:
        raise CliError(f"probability {p!r} outside [0, 1]", EXIT_USAGE)
    return p


def atomic_write_text(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    try:
        fd, tmp = tempfile.mkstemp(dir=directory, prefix=".bootperc-")
        try:
            with os.fdopen(fd, "w") as fh:
                fh.write(text)
            os.replace(tmp, path)
        except BaseException:
            os.unlink(tmp)
            raise
    except OSError as exc:
        raise CliError(f"cannot write {path}: {exc}", EXIT_UNWRITABLE) from exc


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _resolve_a(args, ac: float, n: int) -> tuple[int, float]:
    if args.a is not None:
        a = int(args.a)
        return a, a - ac
    a = seed_size_for_offset(ac, args.omega0, n)
    return a, float(args.omega0)


def _add_common_np(parser):
    parser.add_argument("--n", type=int, required=True, help="vertex count (n)")
    parser.add_argument(
        "--p", type=str, required=True,
        help="edge probability (p); literal like 2e-4 or exponent form n^-0.7",
    )
    parser.add_argument("--r", type=int, required=True, help="infection threshold (r)")


def _add_trial_flags(parser):
    group = parser.add_mutually_exclusive_group(required=True)
    group.add_argument("--a", type=int, help="initially infected count (a)")
    group.add_argument(
        "--omega0", type=float,
        help="signed seed-size offset omega0; the run uses a = round(a_c + omega0)",
    )
    parser.add_argument("--trials", type=int, required=True, help="trial count")
    parser.add_argument("--seed", type=int, required=True, help="master seed")
    parser.add_argument(
        "--workers", type=int, default=None,
        help=f"worker processes (default: ${WORKERS_ENV} or min(4, cpus)); "
        "does not affect output bytes",
    )


def cmd_critical(args) -> int:
    p = parse_probability(args.p, args.n)
    try:
        crit = critical_quantities(args.n, p, args.r)
    except DegenerateRegimeError as exc:
        raise CliError(f"degenerate regime: {exc}", EXIT_DEGENERATE) from exc
    text = _json_text(crit.to_json_dict())
    if args.out:
        atomic_write_text(args.out, text)
    sys.stdout.write(text)
    if args.ftable:
        f = drift_table(args.n, p, args.r)
        lines = ["t,f"] + [f"{t},{repr(float(v))}" for t, v in enumerate(f)]
        atomic_write_text(args.ftable, "\n".join(lines) + "\n")
    return EXIT_OK


def _outcome_rows(cells) -> list[dict]:
    rows = []
    for cell in cells:
        for i, out in enumerate(cell.outcomes):
            row = {"omega0": cell.omega0, "a": cell.a, "trial": i}
            row.update(out.to_json_dict())
            rows.append(row)
    return rows


def cmd_simulate(args) -> int:
    p = parse_probability(args.p, args.n)
    try:
        crit = critical_quantities(args.n, p, args.r)
        a, omega0 = _resolve_a(args, crit.ac, args.n)
        report = sweep_omega0(
            args.n, p, args.r, [omega0], args.trials, args.seed, workers=args.workers
        )
    except DegenerateRegimeError as exc:
        raise CliError(f"degenerate regime: {exc}", EXIT_DEGENERATE) from exc
    except ValueError as exc:
        raise CliError(str(exc), EXIT_USAGE) from exc
    cell = report.cells[0]
    payload = {
        "n": args.n, "p": p, "r": args.r, "a": a, "omega0": omega0,
        "seed": args.seed, "t0": crit.t0, "tc": crit.tc, "ac": crit.ac,
        "cell": cell.to_json_dict(),
        "outcomes": [o.to_json_dict() for o in cell.outcomes],
    }
    if args.format == "json":
        text = _json_text(payload)
    else:
        header = "trial,final_size,stopping_time,classification,t0_reached,infected_at_t0"
        lines = [header]
        for i, o in enumerate(cell.outcomes):
            at_t0 = "" if o.infected_at_t0 is None else o.infected_at_t0
            lines.append(
                f"{i},{o.final_size},{o.stopping_time},{o.classification},"
                f"{int(o.t0_reached)},{at_t0}"
            )
        text = "\n".join(lines) + "\n"
    atomic_write_text(args.out, text)
    if args.trial_log:
        nd = "".join(
            json.dumps(row, sort_keys=True) + "\n" for row in _outcome_rows([cell])
        )
        atomic_write_text(args.trial_log, nd)
    bound = "n/a" if cell.bound is None else f"{cell.bound:.4g}"
    print(
        f"simulate: n={args.n} p={p:.4g} r={args.r} a={a} trials={cell.trials} "
        f"sub={cell.frac_sub:.3f} super={cell.frac_super:.3f} "
        f"ambig={cell.frac_ambig:.3f} bound={bound} -> {args.out}"
    )
    return EXIT_OK


def cmd_sweep(args) -> int:
    p = parse_probability(args.p, args.n)
    grid = [w for w in (s.strip() for s in args.omega0_grid.split(",")) if w]
    if not grid:
        raise CliError("empty omega0 grid", EXIT_USAGE)
    try:
        omega0s = [float(w) for w in grid]
    except ValueError:
        raise CliError(f"cannot parse omega0 grid {args.omega0_grid!r}", EXIT_USAGE) from None
    try:
        report = sweep_omega0(
            args.n, p, args.r, omega0s, args.trials, args.seed, workers=args.workers
        )
    except DegenerateRegimeError as exc:
        raise CliError(f"degenerate regime: {exc}", EXIT_DEGENERATE) from exc
    text = report.to_csv_text() if args.format == "csv" else _json_text(report.to_json_dict())
    atomic_write_text(args.out, text)
    if args.trial_log:
        nd = "".join(
            json.dumps(row, sort_keys=True) + "\n" for row in _outcome_rows(report.cells)
        )
        atomic_write_text(args.trial_log, nd)
    supers = ", ".join(f"{c.omega0:+g}:{c.frac_super:.2f}" for c in report.cells)
    print(f"sweep: {len(report.cells)} cells x {args.trials} trials; super fractions {supers} -> {args.out}")
    return EXIT_OK


def cmd_martingale(args) -> int:
    p = parse_probability(args.p, args.n)
    try:
        crit = critical_quantities(args.n, p, args.r)
        a, _ = _resolve_a(args, crit.ac, args.n)
        t_probe = args.t_probe if args.t_probe is not None else crit.tc
        samples = collect_martingale_samples(
            args.n, p, args.r, a, t_probe, args.trials, args.seed, workers=args.workers
        )
    except DegenerateRegimeError as exc:
        raise CliError(f"degenerate regime: {exc}", EXIT_DEGENERATE) from exc
    except ValueError as exc:
        raise CliError(str(exc), EXIT_USAGE) from exc
    mean_rep = empirical_martingale_check(
        args.n, p, args.r, a, t_probe, args.trials, args.seed, samples=samples
    )
    var_rep = empirical_variance_check(
        args.n, p, args.r, a, t_probe, args.trials, args.seed, samples=samples
    )
    payload = {
        "mean": mean_rep.mean,
        "stderr": mean_rep.stderr,
        "z": mean_rep.z,
        "var": var_rep.var,
        "ceiling": var_rep.ceiling,
        "trials": args.trials,
        "t_probe": t_probe,
        "a": a,
        "diff_within_bounds": samples.diff_within_bounds,
        "max_diff_ratio": samples.max_diff_ratio,
    }
    atomic_write_text(args.out, _json_text(payload))
    print(
        f"martingale: t_probe={t_probe} trials={args.trials} mean={mean_rep.mean:.4g} "
        f"z={mean_rep.z:.3f} var={var_rep.var:.4g} ceiling={var_rep.ceiling:.4g} -> {args.out}"
    )
    return EXIT_OK


def cmd_giant(args) -> int:
    p = parse_probability(args.p, args.n)
    try:
        crit = critical_quantities(args.n, p, args.r)
        a, omega0 = _resolve_a(args, crit.ac, args.n)
        if omega0 <= 0:
            raise CliError("giant needs a supercritical cell (omega0 > 0)", EXIT_USAGE)
        reports = giant_completion_trials(
            args.n, p, args.r, omega0, args.trials, args.seed, workers=args.workers
        )
    except DegenerateRegimeError as exc:
        raise CliError(f"degenerate regime: {exc}", EXIT_DEGENERATE) from exc
    except ValueError as exc:
        raise CliError(str(exc), EXIT_USAGE) from exc
    k = len(reports)
    near_ok = sum(1 for rep in reports if rep.near_pass)
    giant_ok = sum(1 for rep in reports if rep.giant_pass)
    stage2_ok = sum(
        1 for rep in reports if rep.completion is not None and rep.completion.stage2_pass
    )
    payload = {
        "n": args.n, "p": p, "r": args.r, "a": a, "omega0": omega0,
        "seed": args.seed, "trials": k,
        "near_pass_fraction": near_ok / k if k else None,
        "giant_pass_fraction": giant_ok / k if k else None,
        "stage2_pass_fraction": stage2_ok / k if k else None,
        "runs": [rep.to_json_dict() for rep in reports],
    }
    atomic_write_text(args.out, _json_text(payload))
    print(
        f"giant: {k} runs; near>=3r/(4p) in {near_ok}, giant>=0.9*rho*|W| in "
        f"{giant_ok}, stage2<=1/p in {stage2_ok} -> {args.out}"
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bootperc",
        description="Bootstrap percolation on G(n, p): simulation, critical "
        "quantities, martingale diagnostics, and Monte Carlo sweeps.",
        epilog=_SYMBOLS,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser(
        "critical",
        help="print critical quantities {t0, tc, ac, tc_asymptotic, ac_asymptotic, pi_hat_table}",
        epilog=_SYMBOLS,
    )
    _add_common_np(sp)
    sp.add_argument("--out", type=str, default=None, help="also write the JSON here")
    sp.add_argument("--ftable", type=str, default=None, help="write the drift table f(t) as CSV")
    sp.set_defaults(fn=cmd_critical)

    sp = sub.add_parser(
        "simulate", help="Monte Carlo trials at one seed-size cell", epilog=_SYMBOLS
    )
    _add_common_np(sp)
    _add_trial_flags(sp)
    sp.add_argument("--out", type=str, required=True, help="output path")
    sp.add_argument("--format", choices=("json", "csv"), default="json")
    sp.add_argument("--trial-log", type=str, default=None,
                    help="newline-delimited JSON per-trial log")
    sp.set_defaults(fn=cmd_simulate)

    sp = sub.add_parser(
        "sweep", help="Monte Carlo sweep over an omega0 grid", epilog=_SYMBOLS
    )
    _add_common_np(sp)
    sp.add_argument(
        "--omega0-grid", type=str, required=True,
        help="comma-separated omega0 values, e.g. '-57,0,57'",
    )
    sp.add_argument("--trials", type=int, required=True, help="trials per cell")
    sp.add_argument("--seed", type=int, required=True, help="master seed")
    sp.add_argument("--workers", type=int, default=None,
                    help=f"worker processes (default: ${WORKERS_ENV} or min(4, cpus))")
    sp.add_argument("--out", type=str, required=True, help="output path")
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.add_argument("--trial-log", type=str, default=None,
                    help="newline-delimited JSON per-trial log")
    sp.set_defaults(fn=cmd_sweep)

    sp = sub.add_parser(
        "martingale",
        help="empirical martingale mean/variance report {mean, stderr, z, var, ceiling}",
        epilog=_SYMBOLS,
    )
    _add_common_np(sp)
    _add_trial_flags(sp)
    sp.add_argument("--t-probe", type=int, default=None,
                    help="probe step (default: t_c)")
    sp.add_argument("--out", type=str, required=True, help="output path (JSON)")
    sp.set_defaults(fn=cmd_martingale)

    sp = sub.add_parser(
        "giant",
        help="near-infected set, giant component, and completion stages per run",
        epilog=_SYMBOLS,
    )
    _add_common_np(sp)
    _add_trial_flags(sp)
    sp.add_argument("--out", type=str, required=True, help="output path (JSON)")
    sp.set_defaults(fn=cmd_giant)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except CliError as exc:
        print(f"bootperc: {exc}", file=sys.stderr)
        return exc.code
    except ValueError as exc:
        print(f"bootperc: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
