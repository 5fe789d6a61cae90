"""Command line surface.

Subcommands: enumeration counts, table construction, automorphism groups,
isomorphism testing, the verified summary table, and conjecture probes.
Exit codes: 0 success, 1 verification mismatch, 2 capacity or budget
exceeded, 3 parse error.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from dataclasses import dataclass, field

from . import catalog
from .autos import automorphism_group, find_isomorphism
from .errors import BudgetExceededError, CapacityError, ParseError
from .extension import build_lambda, lambda_of_monogenic
from .perms import GroupShape, cycle_str, group_shape
from .setfam import count_mlf
from .tables import (MonogenicSpec, OpTable, load_table, make_monogenic,
                     monogenic_specs, power_ideal, save_table, subtable)

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_CAPACITY = 2
EXIT_PARSE = 3

DEFAULT_BUDGET = 10**8


def _worker_cap() -> int:
    """Worker-thread cap from the environment; computation is sequential and
    deterministic, so any cap is honored trivially."""
    try:
        return max(1, int(os.environ.get("SUPEREXT_THREADS", "1")))
    except ValueError:
        return 1


@dataclass
class ReportRow:
    r: int
    m: int
    k: int
    sub_size: int
    lambda_size: int
    aut_base: GroupShape
    aut_lambda: GroupShape
    expected: dict
    verdict: str
    notes: str = ""

    def to_json(self) -> dict:
        return {
            "r": self.r, "m": self.m, "k": self.k,
            "sub_size": self.sub_size,
            "lambda_size": self.lambda_size,
            "aut_base": self.aut_base.to_json(),
            "aut_lambda": self.aut_lambda.to_json(),
            "expected": self.expected,
            "verdict": self.verdict,
            "notes": self.notes,
        }

    def csv_row(self) -> list:
        exp = self.expected["aut_lambda"]
        return [
            self.r, self.m, self.k, self.sub_size, self.lambda_size,
            self.aut_base.named_form or str(self.aut_base.order),
            str(self.aut_lambda.order),
            self.aut_lambda.named_form or "-",
            exp["expected_name"],
            exp["listed_order"],
            self.verdict,
            self.notes,
        ]


CSV_HEADER = ["r", "m", "k", "sub_size", "lambda_size", "aut_base",
              "aut_lambda_order", "aut_lambda_shape", "expected_shape",
              "listed_order", "verdict", "notes"]


def compute_report_row(r: int, m: int, k: int, node_budget: int = DEFAULT_BUDGET) -> ReportRow:
    expected = catalog.summary_row(r, m, k)
    lam = lambda_of_monogenic(r, m)
    if k == 1:
        base_op = lam.base
        lam_op = lam.table
    else:
        base_op = subtable(lam.base, power_ideal(lam.base, k))
        lam_op, _ = lam.ideal_subtable(k)
    aut_base = group_shape(automorphism_group(base_op, node_budget=node_budget))
    aut_lam = group_shape(automorphism_group(lam_op, node_budget=node_budget))

    base_ok = aut_base.order == int(expected["aut_base"]["expected_order"])
    lam_ok = catalog.shape_verdict(expected["aut_lambda"], aut_lam)
    notes = []
    if not expected["aut_base"]["listed_consistent"]:
        notes.append("listed base group inconsistent; corrected value verified")
    if not expected["aut_lambda"]["listed_order_consistent"]:
        notes.append("listed numeric order inconsistent with its symbolic group")
    if base_ok and lam_ok:
        verdict = "match" if not notes else "flagged"
    else:
        verdict = "mismatch"
        if not base_ok:
            notes.append(f"base group order {aut_base.order} != "
                         f"{expected['aut_base']['expected_order']}")
        if not lam_ok:
            notes.append(f"superextension group {aut_lam.order} does not meet "
                         f"{expected['aut_lambda']['expected_name']}")
    return ReportRow(r, m, k, expected["sub_size"], expected["lambda_size"],
                     aut_base, aut_lam, expected, verdict, "; ".join(notes))


def compute_report(max_size: int, node_budget: int = DEFAULT_BUDGET) -> list[ReportRow]:
    rows = []
    for spec in monogenic_specs(max_size):
        for k in range(1, spec.r + 1):
            rows.append(compute_report_row(spec.r, spec.m, k, node_budget))
    return rows


def cmd_lambda_count(args) -> int:
    n = args.n
    if not 1 <= n <= 7:
        raise CapacityError("counts available for 1 <= n <= 7")
    if n >= 6 and not args.perf:
        raise CapacityError(f"n = {n} is the performance tier; pass --perf")
    t0 = time.time()
    value = count_mlf(n)
    print(f"lambda({n}) = {value}   [{time.time() - t0:.2f}s]")
    return EXIT_OK


def cmd_build(args) -> int:
    spec = MonogenicSpec(args.r, args.m)
    if spec.size > 6 or (spec.size == 6 and not args.perf):
        raise CapacityError("base sizes above 5 need --perf (6 is the cap)")
    if not 1 <= args.k <= spec.r:
        raise CapacityError(f"k must lie in 1..{spec.r} for this semigroup")
    lam = build_lambda(make_monogenic(spec), spec, perf=args.perf)
    if args.k == 1:
        op = lam.table
    else:
        op, _ = lam.ideal_subtable(args.k)
    save_table(op, args.out)
    print(f"wrote {op.size} element table to {args.out}")
    return EXIT_OK


def cmd_aut(args) -> int:
    op = load_table(args.table)
    group = automorphism_group(op, node_budget=args.budget)
    shape = group_shape(group)
    print(f"order {shape.order}")
    if shape.named_form:
        print(f"named form {shape.named_form}")
    print(f"generators ({len(group.generators)}):")
    for g in group.generators:
        print("  " + cycle_str(g))
    print("orbits:")
    for orb in group.orbits():
        print("  {%s}" % ", ".join(op.labels[x] for x in orb))
    return EXIT_OK


def cmd_iso(args) -> int:
    a = load_table(args.a)
    b = load_table(args.b)
    witness, reason = find_isomorphism(a, b, node_budget=args.budget)
    if witness is not None:
        print("isomorphic")
        print("witness: " + ", ".join(
            f"{a.labels[x]}->{b.labels[y]}" for x, y in enumerate(witness)))
    else:
        print(f"not isomorphic (distinguished by: {reason['invariant']})")
        extra = {k: v for k, v in reason.items() if k != "invariant"}
        if extra:
            print("  " + json.dumps(extra))
    return EXIT_OK


def cmd_report_table(args) -> int:
    if args.max_size > 5:
        raise CapacityError("report table covers sizes up to 5")
    rows = compute_report(args.max_size, args.budget)
    writer = csv.writer(sys.stdout)
    if args.format == "csv" or args.out is None:
        writer.writerow(CSV_HEADER)
        for row in rows:
            writer.writerow(row.csv_row())
    if args.out:
        with open(args.out + ".csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(CSV_HEADER)
            for row in rows:
                w.writerow(row.csv_row())
        with open(args.out + ".json", "w") as fh:
            json.dump([row.to_json() for row in rows], fh, indent=1)
            fh.write("\n")
        print(f"wrote {args.out}.csv and {args.out}.json", file=sys.stderr)
    bad = [row for row in rows if row.verdict == "mismatch"]
    flagged = [row for row in rows if row.verdict == "flagged"]
    print(f"{len(rows)} rows: {len(rows) - len(bad) - len(flagged)} match, "
          f"{len(flagged)} flagged, {len(bad)} mismatch", file=sys.stderr)
    return EXIT_MISMATCH if bad else EXIT_OK


def cmd_conjectures(args) -> int:
    from .shifts import conjecture_probe

    if args.max_size >= 6 and not args.perf:
        raise CapacityError("size 6 probing needs --perf")
    rows = conjecture_probe(args.max_size, perf=args.perf, node_budget=args.budget)
    if args.format == "json":
        print(json.dumps([r.to_json() for r in rows], indent=1))
    else:
        for r in rows:
            print(f"{r.conjecture} size={r.size} {r.subject}: {r.status} ({r.detail})")
    return EXIT_MISMATCH if any(r.status == "violated" for r in rows) else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="superext",
        description="Superextensions of finite monogenic semigroups: "
                    "construction, automorphism groups, verified tables.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("lambda-count", help="count maximal linked families")
    c.add_argument("n", type=int)
    c.add_argument("--perf", action="store_true")
    c.set_defaults(func=cmd_lambda_count)

    c = sub.add_parser("build", help="write a superextension table as JSON")
    c.add_argument("r", type=int)
    c.add_argument("m", type=int)
    c.add_argument("k", type=int, nargs="?", default=1)
    c.add_argument("--out", required=True)
    c.add_argument("--perf", action="store_true")
    c.set_defaults(func=cmd_build)

    c = sub.add_parser("aut", help="automorphism group of a table file")
    c.add_argument("table")
    c.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    c.set_defaults(func=cmd_aut)

    c = sub.add_parser("iso", help="isomorphism test between two table files")
    c.add_argument("a")
    c.add_argument("b")
    c.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    c.set_defaults(func=cmd_iso)

    c = sub.add_parser("report-table", help="verify the summary table")
    c.add_argument("--max-size", type=int, default=5)
    c.add_argument("--out")
    c.add_argument("--format", choices=["csv", "json"], default="csv")
    c.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    c.set_defaults(func=cmd_report_table)

    c = sub.add_parser("conjectures", help="probe the two open conjectures")
    c.add_argument("--max-size", type=int, default=5)
    c.add_argument("--perf", action="store_true")
    c.add_argument("--format", choices=["text", "json"], default="text")
    c.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    c.set_defaults(func=cmd_conjectures)
    return p


def main(argv=None) -> int:
    _worker_cap()
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (CapacityError, BudgetExceededError) as exc:
        print(f"capacity: {exc}", file=sys.stderr)
        return EXIT_CAPACITY


if __name__ == "__main__":
    sys.exit(main())
