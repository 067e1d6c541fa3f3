"""Command-line interface: ``nmipf {transform,indicators,decompose,survey,simulate}``.

Data goes to stdout, diagnostics and errors to stderr. Tables are CSV with
rows = husbands and columns = wives; lines starting with ``#`` are comments.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys

import numpy as np

from . import __version__
from .decompose import OUTCOMES, cumulative_preference_path, decompose, share_statistics
from .errors import TableError
from .indicators import liu_lu_generalized, odds_ratio
from .ipf import IpfConfig, ipf_fit
from .nm import nm_fit
from .sim import enumerate_tables, experiment_csv, run_mle_experiment
from .survey import agresti_coull, intervals_disjoint
from .tables import MarginTargets, format_number, margin_ratios, margins, read_csv, to_csv


class CliError(Exception):
    pass


def _floats(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _targets(args):
    if args.targets:
        return margins(read_csv(args.targets))
    if args.rows is None or args.cols is None:
        raise CliError("give --targets TABLE.csv or both --rows and --cols")
    return MarginTargets(args.rows, args.cols)


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, float) and obj != obj:
        return None
    return obj


def _table_cells(table, digits, round_to_int):
    if round_to_int:
        return [[int(round(v)) for v in row] for row in table.cells.tolist()]
    return [[float(format_number(v, digits)) for v in row] for row in table.cells.tolist()]


# -- transform -------------------------------------------------------------


def cmd_transform(args, out):
    seed = read_csv(args.seed)
    targets = _targets(args)
    if args.method == "nm":
        result = nm_fit(seed, targets)
        before, after = result.preserved["liu_lu"]
        indicator = "liu_lu"
    else:
        cfg = IpfConfig(max_iterations=args.max_iter, tolerance=args.tol)
        result = ipf_fit(seed, targets, cfg)
        before, after = result.preserved["odds_ratios"]
        indicator = "odds_ratios"
    diag = {
        "method": result.method,
        "iterations": result.iterations,
        "margin_residual": result.margin_residual,
        "converged": result.converged,
        "preserved_indicator": indicator,
        "before": _jsonable(before),
        "after": _jsonable(after),
    }
    if args.format == "json":
        json.dump(
            {"table": _table_cells(result.table, args.digits, args.round), "diagnostics": diag},
            out,
            indent=2,
        )
        out.write("\n")
    else:
        out.write(to_csv(result.table, args.digits, args.round))
        for k, v in diag.items():
            out.write(f"# {k}: {json.dumps(v)}\n")
    if not result.converged:
        print(f"warning: IPF did not converge in {result.iterations} iterations", file=sys.stderr)


# -- indicators ------------------------------------------------------------


def indicator_report(table) -> dict:
    """Every indicator that applies to ``table``; failures are recorded as
    strings instead of aborting the report."""
    report = {}

    def attempt(name, fn):
        try:
            report[name] = fn()
        except (TableError, ValueError, ZeroDivisionError) as exc:
            report[name] = {"error": str(exc)}

    if table.shape == (2, 2):
        attempt("odds_ratio", lambda: odds_ratio(table))
    attempt("liu_lu", lambda: liu_lu_generalized(table).as_array().tolist())
    if table.n_rows == table.n_cols:
        attempt("shares", lambda: vars(share_statistics(table)))
    t = margins(table)
    report["margins"] = {"rows": t.row_totals.tolist(), "cols": t.col_totals.tolist()}
    # high-category rows per column mass of each lower category, and the
    # transposed ratio
    attempt(
        "margin_ratios",
        lambda: {
            "high_rows_over_low_cols": margin_ratios(table, [table.n_rows - 1], range(table.n_cols - 1)),
            "high_cols_over_low_rows": margin_ratios(
                table, [table.n_cols - 1], range(table.n_rows - 1), transpose=True
            ),
        },
    )
    return report


def cmd_indicators(args, out):
    report = indicator_report(read_csv(args.table))
    if args.format == "json":
        json.dump(report, out, indent=2)
        out.write("\n")
        return
    for k, v in report.items():
        out.write(f"{k}: {json.dumps(v)}\n")


# -- decompose -------------------------------------------------------------


def cmd_decompose(args, out):
    tables = [read_csv(p) for p in args.tables]
    if len(tables) < 2:
        raise CliError("decompose needs at least two tables")
    methods = ["ipf", "nm"] if args.method == "both" else [args.method]
    cfg = IpfConfig(max_iterations=args.max_iter, tolerance=args.tol)
    blocks = []
    for method in methods:
        pairs = []
        for k in range(len(tables) - 1):
            res = decompose(tables[k], tables[k + 1], args.outcome, method, cfg)
            pairs.append({"from": args.tables[k], "to": args.tables[k + 1], **res.to_dict(args.digits)})
        block = {"method": method, "outcome": args.outcome, "decompositions": pairs}
        if len(tables) >= 3:
            block["cumulative_preference_path"] = cumulative_preference_path(
                tables, args.reference, args.outcome, method, cfg
            )
        blocks.append(block)
    if args.format == "json":
        json.dump(blocks if len(blocks) > 1 else blocks[0], out, indent=2)
        out.write("\n")
        return
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["method", "from", "to", "total_change", "availability_effect",
                "preference_effect", "interaction_effect"])
    for b in blocks:
        for d in b["decompositions"]:
            w.writerow([b["method"], d["from"], d["to"]] + [
                format_number(d[k], args.digits)
                for k in ("total_change", "availability_effect", "preference_effect", "interaction_effect")
            ])
        if "cumulative_preference_path" in b:
            out.write(f"# {b['method']} cumulative_preference_path: "
                      f"{json.dumps(b['cumulative_preference_path'])}\n")


# -- survey ----------------------------------------------------------------


def _read_counts(path):
    """Rows of ``label,x,n`` (header optional)."""
    with open(path, encoding="utf-8", newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].startswith("#")]
    if rows and not rows[0][-1].strip().lstrip("-").isdigit():
        rows = rows[1:]
    groups = []
    for k, r in enumerate(rows):
        if len(r) == 2:
            r = [f"group{k + 1}"] + r
        try:
            groups.append((r[0].strip(), int(r[1]), int(r[2])))
        except (ValueError, IndexError):
            raise CliError(f"{path}: cannot parse counts row {r!r}") from None
    return groups


def cmd_survey(args, out):
    if args.counts:
        groups = _read_counts(args.counts)
    elif args.x is not None and args.n is not None:
        groups = [("group1", args.x, args.n)]
    else:
        raise CliError("give --x and --n, or --counts FILE.csv")
    records = []
    prev = None
    failed = False
    for label, x, n in groups:
        try:
            est = agresti_coull(x, n, args.alpha, args.variance)
        except ValueError as exc:
            print(f"error: group {label}: {exc}", file=sys.stderr)
            records.append({"group": label, "x": x, "n": n, "error": str(exc)})
            prev = None
            failed = True
            continue
        rec = {"group": label, **est.as_dict()}
        rec["disjoint_from_previous"] = intervals_disjoint(prev, est) if prev else None
        records.append(rec)
        prev = est
    if args.format == "json":
        json.dump(records, out, indent=2)
        out.write("\n")
    else:
        fields = ["group", "x", "n", "estimate", "half_width", "lower", "upper", "alpha", "z",
                  "disjoint_from_previous", "error"]
        w = csv.DictWriter(out, fieldnames=fields, lineterminator="\n", extrasaction="ignore")
        w.writeheader()
        for r in records:
            w.writerow({k: (format_number(v, args.digits) if isinstance(v, float) else v)
                        for k, v in r.items()})
    if failed:
        raise CliError("some groups could not be estimated")


# -- simulate --------------------------------------------------------------


def cmd_simulate(args, out):
    if args.enumerate:
        targets = _targets(args)
        tables = enumerate_tables(targets, args.nonneg_only)
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["rank", "n11", "n12", "n21", "n22"])
        for k, t in enumerate(tables):
            w.writerow([k] + [int(v) for v in t.cells.ravel()])
        return
    if not args.population:
        raise CliError("simulate needs a POPULATION table (or --enumerate)")
    rows = run_mle_experiment(read_csv(args.population), args.size, args.draws, args.seed, args.tolerance)
    if args.format == "json":
        json.dump(_jsonable(rows), out, indent=2)
        out.write("\n")
    else:
        out.write(experiment_csv(rows))
    worst = max((r["discrepancy"] for r in rows), default=0.0)
    print(f"max |IPF - MLE| free-cell discrepancy: {worst:.6g}", file=sys.stderr)


# -- parser ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nmipf", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, fmt="csv"):
        sp.add_argument("--format", choices=("csv", "json"), default=fmt)
        sp.add_argument("--digits", type=int, default=12, help="significant digits (default 12)")

    def target_opts(sp):
        sp.add_argument("--targets", help="table whose margins are the targets")
        sp.add_argument("--rows", type=_floats, help="target row totals, comma separated")
        sp.add_argument("--cols", type=_floats, help="target column totals, comma separated")

    def ipf_opts(sp):
        sp.add_argument("--tol", type=float, default=IpfConfig.tolerance)
        sp.add_argument("--max-iter", type=int, default=IpfConfig.max_iterations)

    sp = sub.add_parser("transform", help="move a table to new margins with IPF or NM")
    sp.add_argument("seed", help="CSV table to transform")
    target_opts(sp)
    sp.add_argument("--method", choices=("ipf", "nm"), default="nm")
    ipf_opts(sp)
    sp.add_argument("--round", action="store_true", help="round cells to integers")
    common(sp)
    sp.set_defaults(func=cmd_transform)

    sp = sub.add_parser("indicators", help="odds-ratio, Liu-Lu matrix, shares, margin ratios")
    sp.add_argument("table")
    common(sp, fmt="json")
    sp.set_defaults(func=cmd_indicators)

    sp = sub.add_parser("decompose", help="availability/preference/interaction decomposition")
    sp.add_argument("tables", nargs="+", help="time-ordered CSV tables (two or more)")
    sp.add_argument("--method", choices=("ipf", "nm", "both"), default="nm")
    sp.add_argument("--outcome", choices=sorted(OUTCOMES), default="heterogamy")
    sp.add_argument("--reference", type=int, default=0, help="index of the reference table")
    ipf_opts(sp)
    common(sp, fmt="json")
    sp.set_defaults(func=cmd_decompose)

    sp = sub.add_parser("survey", help="Agresti-Coull estimates of population shares")
    sp.add_argument("--x", type=int)
    sp.add_argument("--n", type=int)
    sp.add_argument("--counts", help="CSV with label,x,n rows")
    sp.add_argument("--alpha", type=float, default=0.05)
    sp.add_argument("--variance", choices=("adjusted", "raw"), default="adjusted")
    common(sp)
    sp.set_defaults(func=cmd_survey)

    sp = sub.add_parser("simulate", help="IPF vs likelihood experiment, or enumerate 2x2 tables")
    sp.add_argument("population", nargs="?")
    sp.add_argument("--size", type=int, default=100)
    sp.add_argument("--draws", type=int, default=200)
    sp.add_argument("--seed", type=int, default=42)
    sp.add_argument("--tolerance", type=float, default=1e-5)
    sp.add_argument("--enumerate", action="store_true", help="list integer tables with --rows/--cols")
    sp.add_argument("--nonneg-only", action="store_true", help="keep tables with N_HH >= int(R)")
    target_opts(sp)
    common(sp)
    sp.set_defaults(func=cmd_simulate)
    return p


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        args.func(args, out)
    except (CliError, TableError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
