"""Batch experiment runner: generate sets, count, verify claims, scan sizes.

Four subcommands share one contract: every run is driven by (flags, seed)
only, so identical invocations produce byte-identical output.  Counting rows
and verdicts are emitted as versioned CSV (default) or JSON.

Exit status: 0 on success, 2 on usage errors, 3 when a size guard refuses an
enumeration, 4 when a hypothesis-met claim fails (which would mean the claim
catalog itself is wrong), 1 on internal errors such as method disagreement.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .configcount import (
    CountReport,
    count_ratio_quadruples,
    count_scaled_cycle_pairs,
    count_scaled_walk_pairs,
    cycle_pair_reports,
    displacement_histogram,
    walk_pair_reports,
)
from .errors import (
    DilateLabError,
    MethodMismatchError,
    SizeExceedsSpaceError,
    TooLargeError,
)
from .families import (
    FAMILIES,
    FAMILY_FOUR_CYCLE,
    FAMILY_PATH_PAIRS,
    FAMILY_SIMPLEX,
    FAMILY_TRIANGLE,
    FamilyCount,
    classify_two_path_pairs,
    count_path_pairs,
    count_simplex_pairs,
    count_triangle_pairs,
    four_cycle_families,
    shared_displacement_counts,
    simplex_bound_group_sum,
    triangle_bound_group_sum,
    two_path_parts_closed_form,
)
from .orthogonal import enumerate_orthogonal
from .field import make_prime
from .geometry import (
    PointSet,
    distance_set,
    full_space,
    load_point_set,
    quotient_set,
    random_point_set,
    save_point_set,
)
from .verify import (
    CLAIM_NAMES,
    ScanResult,
    Verdict,
    random_instances,
    ratios_for_policy,
    run_claim,
    scan_threshold,
)

CSV_SCHEMA = "dilatelab-csv v1"
JSON_SCHEMA = "dilatelab-json v1"

COUNT_KINDS = ("S_k", "C", "V", "quotient", "distance", "2path_parts",
               "displacement") + FAMILIES
WHAT_ALIASES = {"T": FAMILY_TRIANGLE, "P": FAMILY_SIMPLEX, "F": FAMILY_FOUR_CYCLE}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dilatelab",
        description="Exact counting and verification of dilated point configurations",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--p", type=int, help="odd prime modulus")
        p.add_argument("--d", type=int, default=2, help="dimension (default 2)")
        p.add_argument("--seed", default="0", help="seed for all randomness")
        p.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                       help="worker pool size (results are schedule-independent)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--out", help="output path (default stdout)")

    g = sub.add_parser("gen", help="write a seeded random point-set file")
    add_common(g)
    g.add_argument("--size", type=int, required=True)

    c = sub.add_parser("count", help="count configurations in a point set")
    add_common(c)
    c.add_argument("--what", choices=COUNT_KINDS + tuple(WHAT_ALIASES), required=True)
    c.add_argument("--k", type=int, default=2, help="walk length for S_k")
    c.add_argument("--r", default="all", help="ratio: integer, 'squares', or 'all'")
    c.add_argument("--set", dest="set_path", help="point-set file")
    c.add_argument("--random", type=int, help="use a seeded random set of this size")
    c.add_argument("--method", default="auto",
                   help="auto, all, or a specific method name")

    v = sub.add_parser("verify", help="check catalog claims on instances")
    add_common(v)
    v.add_argument("--claim", choices=CLAIM_NAMES + ("all",), required=True)
    v.add_argument("--r", default="all", help="ratio: integer, 'squares', or 'all'")
    v.add_argument("--set", dest="set_path", help="point-set file")
    v.add_argument("--random", type=int,
                   help="number of seeded random instances (one ratio each)")
    v.add_argument("--size", default="4:10",
                   help="size or LO:HI range for --random instances")
    v.add_argument("--k", type=int, default=3, help="walk length for T1.10")

    s = sub.add_parser("scan", help="positivity fraction of a family by set size")
    add_common(s)
    s.add_argument("--family", choices=FAMILIES, required=True)
    s.add_argument("--r", default="all", help="'all', 'squares', or an integer")
    s.add_argument("--sizes", required=True, help="LO:HI[:STEP] inclusive range")
    s.add_argument("--samples", type=int, required=True)

    return parser


def _parse_sizes(text: str) -> range:
    parts = text.split(":")
    if len(parts) == 1:
        lo = hi = int(parts[0])
        step = 1
    elif len(parts) in (2, 3):
        lo, hi = int(parts[0]), int(parts[1])
        step = int(parts[2]) if len(parts) == 3 else 1
    else:
        raise ValueError(f"bad size range {text!r}")
    if lo < 1 or hi < lo or step < 1:
        raise ValueError(f"bad size range {text!r}")
    return range(lo, hi + 1, step)


def _ratio_policy(text: str) -> str:
    if text in ("all", "squares"):
        return text
    return f"r={int(text)}"


def _resolve_set(args, parser) -> PointSet:
    if getattr(args, "set_path", None):
        E = load_point_set(args.set_path)
        if args.p is not None and E.prime.p != args.p:
            parser.error(f"--p {args.p} contradicts the file header p={E.prime.p}")
        return E
    if args.p is None:
        parser.error("--p is required without --set")
    prime = make_prime(args.p)
    if getattr(args, "random", None):
        return random_point_set(prime, args.d, args.random, args.seed)
    return full_space(prime, args.d)


def _emit(kind: str, header: str, rows: list[str], json_rows: list[dict], args) -> None:
    if args.format == "csv":
        lines = [f"# {CSV_SCHEMA} kind={kind} seed={args.seed}", header]
        lines.extend(rows)
        text = "\n".join(lines) + "\n"
    else:
        payload = {"schema": JSON_SCHEMA, "kind": kind, "seed": args.seed, "rows": json_rows}
        text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_gen(args, parser) -> int:
    if args.p is None:
        parser.error("gen requires --p")
    prime = make_prime(args.p)
    E = random_point_set(prime, args.d, args.size, args.seed)
    comment = f"generated size={args.size} seed={args.seed}"
    if args.out:
        save_point_set(E, args.out, comment=comment)
    else:
        sys.stdout.write(f"# {comment}\np={prime.p} d={args.d}\n")
        for pt in E.points:
            sys.stdout.write(",".join(str(c) for c in pt) + "\n")
    return 0


def _family_row(E: PointSet, name: str, value: int, method: str, r: int) -> FamilyCount:
    return FamilyCount(family=name, value=value, method=method,
                       p=E.prime.p, d=E.d, set_size=len(E), r=r)


def _count_rows(E: PointSet, args, parser) -> list:
    what = WHAT_ALIASES.get(args.what, args.what)
    if what in ("quotient", "distance"):
        value = len(quotient_set(E)) if what == "quotient" else len(distance_set(E))
        return [CountReport(name=what, value=value, method="brute",
                            p=E.prime.p, d=E.d, set_size=len(E))]
    ratios = ratios_for_policy(_ratio_policy(args.r), E.prime)
    reports = []
    for ratio in ratios:
        if what == "S_k":
            if args.method == "all":
                reports.extend(walk_pair_reports(E, ratio, args.k))
            else:
                method = "walk_dp" if args.method == "auto" else args.method
                reports.append(count_scaled_walk_pairs(E, ratio, args.k, method))
        elif what == "C":
            if args.method == "all":
                reports.extend(cycle_pair_reports(E, ratio))
            else:
                method = args.method
                if method == "auto":
                    method = ("mu_identity"
                              if E.d == 2 and E.prime.p_mod_4 == 3 else "brute")
                reports.append(count_scaled_cycle_pairs(E, ratio, method))
        elif what == "V":
            reports.append(count_ratio_quadruples(E, ratio))
        elif what == FAMILY_PATH_PAIRS:
            reports.append(count_path_pairs(E, ratio, args.k))
        elif what == "2path_parts":
            parts = classify_two_path_pairs(E, ratio)
            reports.append(_family_row(E, "A", parts.x_coincide, "brute", ratio.r))
            reports.append(_family_row(E, "B", parts.y_coincide, "brute", ratio.r))
            reports.append(_family_row(E, "A∩B", parts.both_coincide, "brute", ratio.r))
            reports.append(_family_row(E, FAMILY_PATH_PAIRS, parts.open_pairs,
                                       "brute", ratio.r))
            if args.method == "all":
                a, b, ab = two_path_parts_closed_form(E, ratio)
                if (a, b, ab) != (parts.x_coincide, parts.y_coincide, parts.both_coincide):
                    raise MethodMismatchError(
                        f"closed forms {(a, b, ab)} disagree with enumeration on "
                        f"p={E.prime.p} r={ratio.r} points={list(E.points)}"
                    )
                reports.append(_family_row(E, "A", a, "nu_identity", ratio.r))
                reports.append(_family_row(E, "B", b, "nu_identity", ratio.r))
                reports.append(_family_row(E, "A∩B", ab, "nu_identity", ratio.r))
        elif what == "displacement":
            if not ratio.is_square:
                print(f"note: displacement rows skipped for r={ratio.r} "
                      "(not a square)", file=sys.stderr)
                continue
            group = enumerate_orthogonal(E.d, E.prime)
            lam_total = n_total = slice_total = 0
            for theta in group:
                total, distinct = shared_displacement_counts(E, ratio, theta)
                hist = displacement_histogram(E, ratio, theta)
                lam_total += total
                n_total += distinct
                slice_total += sum(c ** E.d for c in hist.values())
            reports.append(_family_row(E, "Lambda_theta", lam_total, "group_sum", ratio.r))
            reports.append(_family_row(E, "N_theta", n_total, "group_sum", ratio.r))
            reports.append(_family_row(E, "A_kl", slice_total, "group_sum", ratio.r))
        elif what == FAMILY_FOUR_CYCLE:
            fams = four_cycle_families(E, ratio)
            reports.append(_family_row(E, FAMILY_FOUR_CYCLE, fams.fully_distinct,
                                       "brute", ratio.r))
            if args.method == "all":
                reports.append(_family_row(E, "A13", fams.x13, "brute", ratio.r))
                reports.append(_family_row(E, "A24", fams.x24, "brute", ratio.r))
                reports.append(_family_row(E, "B13", fams.y13, "brute", ratio.r))
                reports.append(_family_row(E, "B24", fams.y24, "brute", ratio.r))
        elif what in (FAMILY_TRIANGLE, FAMILY_SIMPLEX):
            planar = what == FAMILY_TRIANGLE
            counter = count_triangle_pairs if planar else count_simplex_pairs
            bound = triangle_bound_group_sum if planar else simplex_bound_group_sum
            reports.append(counter(E, ratio))
            if args.method == "all":
                if ratio.is_square:
                    value = max(0, int(bound(E, ratio)))
                    reports.append(FamilyCount(
                        family=what, value=value, method="group_sum",
                        p=E.prime.p, d=E.d, set_size=len(E), r=ratio.r,
                    ))
                else:
                    print(
                        f"note: group_sum skipped for r={ratio.r} (not a square)",
                        file=sys.stderr,
                    )
        else:
            parser.error(f"cannot count {what!r}")
    return reports


def cmd_count(args, parser) -> int:
    E = _resolve_set(args, parser)
    reports = _count_rows(E, args, parser)
    header = reports[0].CSV_HEADER if reports else CountReport.CSV_HEADER
    _emit("count", header, [rep.csv_row() for rep in reports],
          [rep.json_dict() for rep in reports], args)
    return 0


def _verify_instances(args, parser):
    """Yield (E, ratio_or_None) instances resolved from the flags."""
    policy = _ratio_policy(args.r)
    if args.random:
        if args.p is None:
            parser.error("--random requires --p")
        prime = make_prime(args.p)
        parts = args.size.split(":")
        sizes = (
            range(int(parts[0]), int(parts[1]) + 1)
            if len(parts) == 2
            else [int(parts[0])]
        )
        values = [rat.r for rat in ratios_for_policy(policy, prime)]
        for E, ratio in random_instances(
            prime, args.d, args.random, sizes, args.seed, r_values=values
        ):
            yield E, ratio
    else:
        E = _resolve_set(args, parser)
        for ratio in ratios_for_policy(policy, E.prime):
            yield E, ratio


def cmd_verify(args, parser) -> int:
    claims = list(CLAIM_NAMES) if args.claim == "all" else [args.claim]
    verdicts: list[Verdict] = []
    ratio_free = {"lemma2.6", "quotient"}
    # a ratio-free claim is checked once per set, not once per ratio
    seen_sets: set[tuple[str, int]] = set()
    for E, ratio in _verify_instances(args, parser):
        for claim in claims:
            try:
                if claim in ratio_free:
                    key = (claim, id(E))
                    if key in seen_sets:
                        continue
                    seen_sets.add(key)
                    verdicts.append(run_claim(claim, E))
                else:
                    verdicts.append(run_claim(claim, E, ratio, k=args.k))
            except TooLargeError as exc:
                if len(claims) == 1:
                    raise
                print(f"note: {claim} skipped on |E|={len(E)} (guard: {exc})",
                      file=sys.stderr)
    failed = any(v.contradicts_catalog for v in verdicts)
    _emit("verify", Verdict.CSV_HEADER, [v.csv_row() for v in verdicts],
          [v.json_dict() for v in verdicts], args)
    return 4 if failed else 0


def cmd_scan(args, parser) -> int:
    if args.p is None:
        parser.error("scan requires --p")
    if args.samples < 1:
        parser.error("--samples must be at least 1")
    prime = make_prime(args.p)
    try:
        sizes = _parse_sizes(args.sizes)
    except ValueError as exc:
        parser.error(str(exc))
    seed = args.seed
    result = scan_threshold(
        prime, args.d, args.family, _ratio_policy(args.r),
        sizes, args.samples, seed, threads=args.threads,
    )
    _emit("scan", ScanResult.CSV_HEADER, result.csv_rows(), [result.json_dict()], args)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "gen":
            return cmd_gen(args, parser)
        if args.command == "count":
            return cmd_count(args, parser)
        if args.command == "verify":
            return cmd_verify(args, parser)
        if args.command == "scan":
            return cmd_scan(args, parser)
        parser.error(f"unknown command {args.command!r}")
    except (TooLargeError, SizeExceedsSpaceError) as exc:
        print(f"guard exceeded: {exc}", file=sys.stderr)
        return 3
    except MethodMismatchError as exc:
        print(f"method mismatch (implementation bug): {exc}", file=sys.stderr)
        return 1
    except (DilateLabError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
