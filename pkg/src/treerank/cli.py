"""Command-line front end: counting, enumeration, limits, bounds, verify.

Exit codes are a stable contract: 0 success, 1 verification or internal
invariant failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from typing import Callable, Sequence

from .counting import (
    joint_vertex_counts,
    rank_vertex_counts,
    root_rank_counts,
    size_vertex_counts,
)
from .enumeration import (
    DEFAULT_ENUM_LIMIT,
    SizeLimitError,
    census,
    check_inequalities,
    enumerate_trees,
)
from .limits import (
    bound_interval,
    bound_report_dict,
    limit_joint_prob,
    limit_rank_fraction,
    limit_subtree_prob,
)
from .series import DEFAULT_ORDER, EgfSeries, base_series, tree_counts
from .variety import TreeVariety, parse_variety

THREADS_ENV_VAR = "TREERANK_THREADS"


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--variety", default="nonplane", choices=["nonplane", "plane"])
    parser.add_argument("--order", type=int, default=DEFAULT_ORDER,
                        help="series truncation order (default 80)")
    parser.add_argument("--digits", type=int, default=12,
                        help="decimal digits for printed enclosures")
    parser.add_argument("--enum-limit", type=int, default=DEFAULT_ENUM_LIMIT,
                        help="largest size enumerated exhaustively")
    parser.add_argument("--threads", type=int, default=None,
                        help=f"worker cap (or ${THREADS_ENV_VAR}); results do not depend on it")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="treerank",
        description="Exact rank statistics of labeled 1-2 trees",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_counts = sub.add_parser("counts", help="count sequences and root-rank tables")
    _add_common(p_counts)
    p_counts.add_argument("--kind", required=True, choices=["rank", "size", "joint", "root"])
    p_counts.add_argument("--k", type=int, default=None, help="vertex rank")
    p_counts.add_argument("--r", type=int, default=None, help="subtree size")
    p_counts.add_argument("--i", type=int, default=None, help="subtree size (joint)")
    p_counts.add_argument("--n-max", type=int, default=None, help="last row to print")
    p_counts.add_argument("--format", default="table", choices=["table", "json", "csv"])

    p_bounds = sub.add_parser("bounds", help="rigorous bracket for a rank limit")
    _add_common(p_bounds)
    p_bounds.add_argument("--k", type=int, required=True)
    p_bounds.add_argument("--r", type=int, default=12, help="truncation (default 12)")
    p_bounds.add_argument("--format", default="table", choices=["table", "json"])

    p_limits = sub.add_parser("limits", help="exact limiting probabilities")
    _add_common(p_limits)
    p_limits.add_argument("--kind", default="rank", choices=["rank", "v", "w"])
    p_limits.add_argument("--k", type=int, default=None)
    p_limits.add_argument("--r", type=int, default=None)
    p_limits.add_argument("--i", type=int, default=None)
    p_limits.add_argument("--format", default="table", choices=["table", "json"])

    p_enum = sub.add_parser("enumerate", help="dump every tree of one size")
    _add_common(p_enum)
    p_enum.add_argument("--n", type=int, required=True)

    p_verify = sub.add_parser("verify", help="run the cross-module oracle suite")
    _add_common(p_verify)
    p_verify.add_argument("--r", type=int, default=12, help="bracket truncation to check")
    p_verify.add_argument("--corrupt-root-table", action="store_true",
                          help=argparse.SUPPRESS)

    return parser


def _resolve_threads(args: argparse.Namespace) -> int:
    if args.threads is not None:
        return max(1, args.threads)
    env = os.environ.get(THREADS_ENV_VAR)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def cmd_counts(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    variety = parse_variety(args.variety)
    order = args.order
    n_max = args.n_max if args.n_max is not None else order
    if n_max < 0 or n_max > order:
        parser.error(f"--n-max must be in 0..{order}")

    if args.kind == "root":
        table = root_rank_counts(variety, max(n_max, 1))
        rows = [["i", "k", "count"]]
        for i in range(1, n_max + 1):
            for k in range(i):
                c = table.count(k, i)
                if c:
                    rows.append([str(i), str(k), str(c)])
        if args.format == "json":
            payload = {
                "variety": str(variety),
                "kind": "root",
                "rows": [{"i": int(a), "k": int(b), "count": int(c)} for a, b, c in rows[1:]],
            }
            print(json.dumps(payload, indent=2))
        elif args.format == "csv":
            print("\n".join(",".join(r) for r in rows))
        else:
            for r in rows:
                print("\t".join(r))
        return 0

    if args.kind == "rank":
        if args.k is None or args.k < 0:
            parser.error("--kind rank needs --k >= 0")
        seq = rank_vertex_counts(variety, args.k, order)
    elif args.kind == "size":
        if args.r is None or args.r < 1:
            parser.error("--kind size needs --r >= 1")
        seq = size_vertex_counts(variety, args.r, order)
    else:
        if args.k is None or args.k < 0 or args.i is None or args.i < 1:
            parser.error("--kind joint needs --k >= 0 and --i >= 1")
        seq = joint_vertex_counts(variety, args.k, args.i, order)

    rows = seq.csv_rows(args.digits)[: n_max + 2]
    if args.format == "json":
        payload = {
            "variety": str(variety),
            "selector": seq.selector,
            "rows": [
                {
                    "n": int(r[0]),
                    "count": int(r[1]),
                    "prob_numerator": r[2],
                    "prob_denominator": r[3],
                    "prob_decimal": r[4],
                }
                for r in rows[1:]
            ],
        }
        print(json.dumps(payload, indent=2))
    elif args.format == "csv":
        print("\n".join(",".join(r) for r in rows))
    else:
        for r in rows:
            print("\t".join(r))
    return 0


def cmd_bounds(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    if args.k < 0:
        parser.error("--k must be >= 0")
    if args.r < 1:
        parser.error("--r must be >= 1")
    variety = parse_variety(args.variety)
    report = bound_interval(variety, args.k, args.r, digits=args.digits)
    if args.format == "json":
        print(json.dumps(bound_report_dict(report, args.digits), indent=2))
        return 0
    print(f"variety: {report.variety}")
    print(f"k = {report.k}, truncation r = {report.r}")
    print(f"lower = {report.lower.render()}")
    print(f"      ≈ {report.lower_enc.decimal()}")
    print(f"upper = {report.upper.render()}")
    print(f"      ≈ {report.upper_enc.decimal()}")
    gap = report.gap.enclosure(args.digits)
    print(f"gap (unassigned subtree mass) ≈ {gap.decimal()}")
    return 0


def cmd_limits(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    variety = parse_variety(args.variety)
    if args.kind == "rank":
        if args.k is None:
            parser.error("--kind rank needs --k")
        if args.k not in (0, 1):
            parser.error("closed forms exist for k = 0 and 1 only; use `bounds`")
        value = limit_rank_fraction(variety, args.k)
        label = f"rank k={args.k}"
    elif args.kind == "v":
        if args.r is None or args.r < 1:
            parser.error("--kind v needs --r >= 1")
        value = limit_subtree_prob(variety, args.r)
        label = f"subtree size r={args.r}"
    else:
        if args.k is None or args.k < 0 or args.i is None or args.i < 1:
            parser.error("--kind w needs --k >= 0 and --i >= 1")
        value = limit_joint_prob(variety, args.k, args.i)
        label = f"rank k={args.k}, size i={args.i}"
    enc = value.enclosure(args.digits)
    if args.format == "json":
        payload = {
            "variety": str(variety),
            "selector": label,
            "exact": value.render(),
            "decimal": enc.decimal(),
        }
        print(json.dumps(payload, indent=2))
    else:
        print(f"{label} ({variety}): {value.render()} ≈ {enc.decimal()}")
    return 0


def cmd_enumerate(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    variety = parse_variety(args.variety)
    if args.n < 1:
        parser.error("--n must be >= 1")
    try:
        for tree in enumerate_trees(variety, args.n, args.enum_limit):
            print(tree.to_text())
    except SizeLimitError as exc:
        print(str(exc), file=sys.stderr)
        return 2
    return 0


def _verify_checks(args: argparse.Namespace):
    """Yield (name, passed, detail) for the whole cross-validation suite."""
    order = args.order
    limit = args.enum_limit
    digits = args.digits

    for variety in TreeVariety:
        counts = tree_counts(variety, limit)
        for n in range(1, limit + 1):
            got = sum(1 for _ in enumerate_trees(variety, n, limit))
            yield (
                f"enumeration-count {variety} n={n}",
                got == counts[n],
                f"enumerated {got}, series says {counts[n]}",
            )

    table = {v: root_rank_counts(v, order) for v in TreeVariety}
    if args.corrupt_root_table:
        table[TreeVariety.NONPLANE] = table[TreeVariety.NONPLANE].with_entry(1, 3, 999)

    for variety in TreeVariety:
        counts = tree_counts(variety, order)
        bad = [i for i in range(1, order + 1) if table[variety].row_sum(i) != counts[i]]
        yield (
            f"root-rank-table row sums {variety}",
            not bad,
            "all rows equal the tree counts" if not bad else f"mismatch at sizes {bad[:5]}",
        )

    for variety in TreeVariety:
        tbl = table[variety]
        for n in range(1, limit + 1):
            cen = census(variety, n, limit)
            ok = True
            notes = []
            for k in range(n):
                seq = rank_vertex_counts(variety, k, n, tbl)
                if seq.counts[n] != cen.rank_totals[k]:
                    ok = False
                    notes.append(f"rank k={k}")
            for r in range(1, n + 1):
                seq = size_vertex_counts(variety, r, n)
                if seq.counts[n] != cen.size_totals[r]:
                    ok = False
                    notes.append(f"size r={r}")
                for k in range(n):
                    seq = joint_vertex_counts(variety, k, r, n, tbl)
                    if seq.counts[n] != cen.joint_totals.get((k, r), 0):
                        ok = False
                        notes.append(f"joint k={k} i={r}")
            for k in range(n):
                if tbl.count(k, n) != cen.root_rank_counts[k]:
                    ok = False
                    notes.append(f"root-rank k={k} (root-rank-table)")
            yield (
                f"census-vs-recurrences {variety} n={n}",
                ok,
                "all selectors agree" if ok else "; ".join(notes[:6]),
            )

    for variety in TreeVariety:
        for n in range(1, limit + 1):
            report = check_inequalities(variety, n, limit, digits)
            fails = report.failures()
            yield (
                f"inequalities {variety} n={n}",
                report.all_hold,
                "all hold" if report.all_hold else "; ".join(c.name for c in fails),
            )

    # Leaf-count identity: total(n) = (n+1) count(n) - count(n+1), non-plane.
    e = tree_counts(TreeVariety.NONPLANE, order + 1)
    leaf_seq = rank_vertex_counts(TreeVariety.NONPLANE, 0, order, table[TreeVariety.NONPLANE])
    bad = [n for n in range(order) if leaf_seq.counts[n] != (n + 1) * e[n] - e[n + 1]]
    yield (
        "leaf-count identity (n+1)E_n - E_(n+1)",
        not bad,
        "holds through the full order" if not bad else f"fails at n={bad[:5]}",
    )

    # Rank-1 root correction: d/dz of the rank-1 root series is z*E - z^2/2.
    r1 = table[TreeVariety.NONPLANE].correction_series(1, order).derivative()
    base = base_series(TreeVariety.NONPLANE, order)
    z_e = EgfSeries([Fraction(0)] + list(base.coeffs[:-1]))
    expected = z_e - EgfSeries.monomial(2, order, Fraction(1, 2))
    ok = r1 == expected.truncate(order - 1)
    yield ("rank-1 root correction z*E - z^2/2", ok, "series match" if ok else "mismatch")

    for variety in TreeVariety:
        anchor = limit_rank_fraction(variety, 0) == limit_subtree_prob(variety, 1)
        yield (
            f"limit anchor {variety}: rank-0 limit equals size-1 limit",
            anchor,
            "exact equality" if anchor else "mismatch",
        )

    for variety in TreeVariety:
        prev = None
        ok = True
        detail = "brackets nested and anchored"
        ladder = sorted({max(1, args.r // 3), max(1, (2 * args.r) // 3), args.r})
        for r in ladder:
            rep = bound_interval(variety, 1, r, table[variety], digits=digits)
            a1 = limit_rank_fraction(variety, 1)
            inside = (rep.lower - a1).sign() <= 0 and (rep.upper - a1).sign() >= 0
            if not inside:
                ok = False
                detail = f"closed form escapes bracket at r={r}"
                break
            if prev is not None:
                nested = (rep.lower - prev.lower).sign() >= 0 and \
                    (prev.upper - rep.upper).sign() >= 0
                if not nested:
                    ok = False
                    detail = f"bracket at r={r} not nested"
                    break
            prev = rep
        yield (f"bracket nesting/anchoring {variety}", ok, detail)


def cmd_verify(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    if args.enum_limit < 1:
        parser.error("--enum-limit must be >= 1")
    if args.order < 2 or args.order < args.enum_limit:
        parser.error("--order must be >= 2 and at least --enum-limit")
    failures = 0
    total = 0
    for name, passed, detail in _verify_checks(args):
        total += 1
        tag = "ok  " if passed else "FAIL"
        print(f"{tag}  {name}: {detail}")
        if not passed:
            failures += 1
    print(f"\n{total - failures}/{total} checks passed")
    return 0 if failures == 0 else 1


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args.threads = _resolve_threads(args)
    handlers: dict[str, Callable] = {
        "counts": cmd_counts,
        "bounds": cmd_bounds,
        "limits": cmd_limits,
        "enumerate": cmd_enumerate,
        "verify": cmd_verify,
    }
    return handlers[args.command](args, parser)


if __name__ == "__main__":
    sys.exit(main())
