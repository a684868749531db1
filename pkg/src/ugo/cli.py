"""Command line interface.

Subcommands: scan (tabulate families to CSV/JSONL with checkpointing),
inspect (all invariants of one discriminant), verify (exhaustive and
randomized consistency suites), stats (class-number growth reports).

Exit codes: 0 success, 1 usage error, 2 invalid discriminant, 3 overflow,
4 verification failure.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import relations, search
from .orders import MINUS, PLUS

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_BAD_DISCRIMINANT = 2
EXIT_OVERFLOW = 3
EXIT_VERIFY_FAILED = 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _families(name: str) -> tuple[str, ...]:
    if name == "both":
        return (PLUS, MINUS)
    return (name,)


def build_parser() -> _Parser:
    parser = _Parser(prog="ugo", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_scan = sub.add_parser("scan", help="tabulate unit-generated orders")
    p_scan.add_argument(
        "--family", choices=("plus", "minus", "both", "chowla"), default="both"
    )
    p_scan.add_argument("--n-min", type=int, default=0)
    p_scan.add_argument("--n-max", type=int, required=True)
    p_scan.add_argument("--filter", choices=search.FILTERS, default="all")
    p_scan.add_argument("--jobs", type=int, default=1)
    p_scan.add_argument("--checkpoint", default=None)
    p_scan.add_argument("--out", required=True)
    p_scan.add_argument("--format", choices=("csv", "jsonl"), default="csv")

    p_inspect = sub.add_parser("inspect", help="all invariants of one discriminant")
    p_inspect.add_argument("delta", type=int)
    p_inspect.add_argument("--json", action="store_true")

    p_verify = sub.add_parser("verify", help="run a consistency suite")
    p_verify.add_argument("suite", choices=sorted(search.VERIFY_SUITES))
    p_verify.add_argument("--max-delta", type=int, default=None)
    p_verify.add_argument("--max-n", type=int, default=500)
    p_verify.add_argument("--jobs", type=int, default=1)

    p_stats = sub.add_parser("stats", help="class-number growth reports")
    stats_sub = p_stats.add_subparsers(dest="stat", required=True, parser_class=_Parser)
    p_hua = stats_sub.add_parser("hua", help="log h / log n trend")
    p_hua.add_argument("--family", choices=("plus", "minus", "both"), default="both")
    p_hua.add_argument("--n-min", type=int, required=True)
    p_hua.add_argument("--n-max", type=int, required=True)
    p_bounded = stats_sub.add_parser(
        "bounded", help="|log h - log n| in bounded-fundamental families"
    )
    p_bounded.add_argument("--family", choices=("plus", "minus", "both"), default="both")
    p_bounded.add_argument("--delta0-max", type=int, required=True)
    p_bounded.add_argument("--n-min", type=int, required=True)
    p_bounded.add_argument("--n-max", type=int, required=True)
    return parser


def _cmd_scan(args) -> int:
    config = search.ScanConfig(
        families=_families(args.family),
        n_min=args.n_min,
        n_max=args.n_max,
        filter=args.filter,
        jobs=args.jobs,
        checkpoint_path=args.checkpoint,
        output=args.out,
        format=args.format,
    )
    result = search.scan_to_file(config)
    print(f"wrote {result.rows_written} rows to {config.output}")
    if result.errors:
        for err in result.errors[:10]:
            print(
                f"row error: family={err.family} n={err.n}: {err.message}",
                file=sys.stderr,
            )
        print(f"{len(result.errors)} row-level errors", file=sys.stderr)
        return EXIT_OVERFLOW
    return EXIT_OK


def _format_inspect(report: dict) -> str:
    lines = [
        f"delta          {report['delta']}",
        f"delta0         {report['delta0']}",
        f"conductor      {report['f']}",
        f"sign           {report['sign']}",
        f"maximal        {report['maximal']}",
        f"unit-generated {report['unit_generated'] or 'no'}",
        f"h              {report['h']}",
        f"h+             {report['h_plus']}",
        f"Cl             {report['cl']}",
        f"Cl+            {report['cl_plus']}",
        f"mu             {report['mu']}",
        f"genus order    {report['genus_order']}",
        f"one class/genus {report['one_class_per_genus']}",
        f"2-torsion wide {report['two_torsion_wide']}",
        f"RD row         {report['rd_row'] or '-'}",
    ]
    if report["unit"]:
        u = report["unit"]
        lines.append(
            f"fund. unit     ({u['t']} + {u['u']}*sqrt(delta))/2, "
            f"norm {u['norm']}, regulator {u['regulator']}"
        )
        lines.append(f"parity         h+ {report['narrow_parity']}, h {report['wide_parity']}")
    lines.append("classes:")
    for cyc in report["classes"]:
        lines.append("  " + " -> ".join(str(tuple(f)) for f in cyc))
    return "\n".join(lines)


def _cmd_inspect(args) -> int:
    try:
        report = search.inspect_report(args.delta)
    except OverflowError as exc:
        print(f"overflow: {exc}", file=sys.stderr)
        return EXIT_OVERFLOW
    except ValueError as exc:
        print(f"invalid discriminant: {exc}", file=sys.stderr)
        return EXIT_BAD_DISCRIMINANT
    if args.json:
        print(json.dumps(report))
    else:
        print(_format_inspect(report))
    return EXIT_OK


_VERIFY_DEFAULT_BOUNDS = {
    "parity": 10**5,
    "genus": 10**5,
    "conductor": 10**6,
    "group-axioms": 10**4,
}


def _cmd_verify(args) -> int:
    suite = args.suite
    if suite == "cf":
        report = search.verify_cf(args.max_n)
    elif suite == "group-axioms":
        bound = args.max_delta or _VERIFY_DEFAULT_BOUNDS[suite]
        report = search.verify_group_axioms(bound)
    else:
        bound = args.max_delta or _VERIFY_DEFAULT_BOUNDS[suite]
        report = search.VERIFY_SUITES[suite](bound, jobs=args.jobs)
    status = "pass" if report.passed else "FAIL"
    print(f"{report.suite}: {status} ({report.checked} checks)")
    if not report.passed:
        for failure in report.failures:
            print(f"  counterexample: {failure}")
        return EXIT_VERIFY_FAILED
    return EXIT_OK


def _cmd_stats(args) -> int:
    fams = _families(args.family)
    samples = [(f, n) for f in fams for n in range(args.n_min, args.n_max + 1)]
    if args.stat == "hua":
        rows, summary = relations.hua_trend(
            [(f, n) for f, n in samples if not (f == PLUS and n < 3)]
        )
        print("family,n,delta,h,log_h_over_log_n")
        for r in rows:
            print(f"{r.family},{r.n},{r.delta},{r.h},{r.log_h_over_log_n:.6f}")
        print(
            f"# count={summary['count']} mean={summary['mean']:.6f} "
            f"min={summary['min']:.6f} max={summary['max']:.6f}"
        )
    else:
        rows, summary = relations.bounded_family_statistic(
            args.delta0_max, [(f, n) for f, n in samples if not (f == PLUS and n < 3)]
        )
        print("family,n,delta,delta0,f,h,deviation")
        for r in rows:
            print(
                f"{r['family']},{r['n']},{r['delta']},{r['delta0']},{r['f']},"
                f"{r['h']},{r['deviation']:.6f}"
            )
        mean = summary["mean"]
        mx = summary["max"]
        print(f"# count={summary['count']} mean={mean:.6f} max={mx:.6f}")
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "scan":
        code = _cmd_scan(args)
    elif args.command == "inspect":
        code = _cmd_inspect(args)
    elif args.command == "verify":
        code = _cmd_verify(args)
    else:
        code = _cmd_stats(args)
    return code


if __name__ == "__main__":
    sys.exit(main())
