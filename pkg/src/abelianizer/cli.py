"""Command-line front end: invariants, verification suites, tables, cache.

Exit codes: 0 success, 1 violations found, 2 usage error, 3 cache-version
error.  The environment variable ABELIANIZER_CACHE overrides --cache.
"""

from __future__ import annotations

import argparse
import itertools
import json
import os
import random
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction

from .partitions import BoxSpec, Partition, box_partitions, multidegree_text, parse_partition
from .cohomology import ProductSpace
from .abelian_gw import CacheVersionError, MemoStore, check_wdvv, gw_invariant
from . import grassmannian
from .correspondence import (
    AssembledInvariants,
    assemble_and_check_wdvv,
    check_omega_triviality,
    check_two_point,
    evaluate_formula,
    generate_formula,
    mirror_map,
    mirror_roundtrip_defect,
    naive_vs_corrected,
)
from .grassmannian import fundamental_solution
from .jfunctions import i_function, solve_c_coefficients

REPORT_SCHEMA = "report v1"

SUITES = (
    "martin",
    "two-point",
    "three-point",
    "four-point-divisor",
    "five-point-symmetry",
    "wdvv-abelian",
    "wdvv-grass",
    "omega-trivial",
    "mirror-small",
    "j-i",
)


@dataclass
class RunConfig:
    k: int
    n: int
    max_degree: int = 2
    max_insertions: int = 5
    z_depth: int = 8
    suites: tuple = ("all",)
    cache: str = None
    fmt: str = "json"
    seed: int = 0
    jobs: int = 1

    def __post_init__(self):
        if self.k < 1 or self.n < 2:
            raise ValueError("need k >= 1 and n >= 2")
        if min(self.max_degree, self.max_insertions, self.z_depth, self.jobs) < 0:
            raise ValueError("bounds must be nonnegative")
        bad = [s for s in self.suites if s != "all" and s not in SUITES]
        if bad:
            raise ValueError(f"unknown suites: {bad}")

    def box(self) -> BoxSpec:
        return BoxSpec(self.k, self.n)  # raises when k >= n

    def space(self) -> ProductSpace:
        return ProductSpace(self.k, self.n)


@dataclass
class Report:
    suite: str
    instances: int
    violations: list
    wall_time: float
    cache_stats: dict
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "schema": REPORT_SCHEMA,
            "suite": self.suite,
            "instances": self.instances,
            "passed": self.passed,
            "violations": [_jsonable(v) for v in self.violations],
            "wall_time_s": round(self.wall_time, 3),
            "cache": self.cache_stats,
            "details": _jsonable(self.details),
        }


def _jsonable(x):
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, Partition):
        return str(x)
    if isinstance(x, dict):
        return {str(_jsonable(k)): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


# ---------------------------------------------------------------------------
# suites

def _suite_martin(cfg: RunConfig, store: MemoStore) -> Report:
    from .cohomology import cup, lift, martin_integral
    from .partitions import complement

    box = cfg.box()
    t0 = time.time()
    violations, count = [], 0
    parts = box_partitions(box)
    for lam, mu in itertools.product(parts, parts):
        if lam.weight + mu.weight != box.dim:
            continue
        count += 1
        got = martin_integral(cup(lift(lam, box), lift(mu, box)), box)
        want = Fraction(1) if mu == complement(lam, box) else Fraction(0)
        if got != want:
            violations.append({"pair": (lam, mu), "got": got, "want": want})
    return Report("martin", count, violations, time.time() - t0, store.stats())


def _suite_two_point(cfg: RunConfig, store: MemoStore) -> Report:
    t0 = time.time()
    box = cfg.box()
    violations = check_two_point(box, cfg.max_degree, store)
    npairs = len(box_partitions(box))
    count = npairs * (npairs + 1) // 2 * cfg.max_degree
    return Report("two-point", count, violations, time.time() - t0, store.stats())


def _suite_three_point(cfg: RunConfig, store: MemoStore) -> Report:
    box = cfg.box()
    t0 = time.time()
    tree = generate_formula(3)
    violations, count = [], 0
    parts = box_partitions(box)
    for combo in itertools.combinations_with_replacement(parts, 3):
        for d in range(cfg.max_degree + 1):
            if sum(p.weight for p in combo) != box.dim + box.n * d:
                continue
            count += 1
            corr = evaluate_formula(tree, list(combo), d, box, store)
            oracle = grassmannian.three_point(*combo, d, box)
            if corr != oracle:
                violations.append({"triple": combo, "d": d, "formula": corr, "oracle": oracle})
    return Report("three-point", count, violations, time.time() - t0, store.stats())


def _suite_four_point_divisor(cfg: RunConfig, store: MemoStore) -> Report:
    box = cfg.box()
    t0 = time.time()
    rep = naive_vs_corrected(box, cfg.max_degree, store)
    sigma1 = Partition((1,))
    with_divisor = [r for r in rep["instances"] if sigma1 in r["partitions"] and r["d"] >= 1]
    violations = rep["oracle_mismatches"]
    return Report(
        "four-point-divisor", len(with_divisor), violations, time.time() - t0, store.stats(),
        details={"nonzero_corrections": len(rep["nonzero_corrections"])},
    )


def _suite_five_point_symmetry(cfg: RunConfig, store: MemoStore, min_samples: int = 50) -> Report:
    box = cfg.box()
    t0 = time.time()
    tree = generate_formula(5)
    rng = random.Random(cfg.seed)
    parts = box_partitions(box)
    admissible = [
        (combo, d)
        for d in range(cfg.max_degree + 1)
        for combo in itertools.combinations_with_replacement(parts, 5)
        if sum(p.weight for p in combo) == box.dim + box.n * d + 2
    ]
    violations, count = [], 0
    while count < min_samples and admissible:
        combo, d = rng.choice(admissible)
        base = list(combo)
        ref = evaluate_formula(tree, base, d, box, store)
        perm = list(range(5))
        rng.shuffle(perm)
        got = evaluate_formula(tree, [base[i] for i in perm], d, box, store)
        count += 1
        if got != ref:
            violations.append({"tuple": combo, "perm": perm, "d": d, "values": (ref, got)})
    return Report("five-point-symmetry", count, violations, time.time() - t0, store.stats())


def _count_wdvv_instances(labels, weights, dim, d_range, n_marks_max):
    """Identity instances surviving the dimension filter (no evaluation)."""
    count = 0
    max_back = max(0, n_marks_max - 4)
    backgrounds = []
    for size in range(max_back + 1):
        backgrounds.extend(itertools.combinations_with_replacement(range(len(labels)), size))
    for quad in itertools.combinations_with_replacement(range(len(labels)), 4):
        wq = sum(weights[i] for i in quad)
        for back in backgrounds:
            w = wq + sum(weights[i] for i in back)
            for c1 in d_range:
                if w == dim + c1 + len(back):
                    count += 1
    return count


def _suite_wdvv_abelian(cfg: RunConfig, store: MemoStore) -> Report:
    t0 = time.time()
    space = cfg.space()
    violations = check_wdvv(space, cfg.max_degree, cfg.max_insertions, store)
    monos = space.monomials()
    degrees = [
        space.c1_degree(dd)
        for dd in itertools.product(range(cfg.max_degree + 1), repeat=space.k)
        if sum(dd) <= cfg.max_degree
    ]
    count = _count_wdvv_instances(monos, [sum(e) for e in monos], space.dim,
                                  degrees, cfg.max_insertions)
    return Report("wdvv-abelian", count, violations, time.time() - t0, store.stats())


def _suite_wdvv_grass(cfg: RunConfig, store: MemoStore) -> Report:
    t0 = time.time()
    box = cfg.box()
    violations = assemble_and_check_wdvv(box, cfg.max_degree, cfg.max_insertions, store)
    parts = box_partitions(box)
    count = _count_wdvv_instances(parts, [p.weight for p in parts], box.dim,
                                  [box.n * d for d in range(cfg.max_degree + 1)],
                                  cfg.max_insertions)
    return Report("wdvv-grass", count, violations, time.time() - t0, store.stats())


def _suite_omega_trivial(cfg: RunConfig, store: MemoStore) -> Report:
    t0 = time.time()
    violations = check_omega_triviality(cfg.box(), cfg.max_degree)
    return Report("omega-trivial", 1, violations, time.time() - t0, store.stats())


def _suite_mirror_small(cfg: RunConfig, store: MemoStore) -> Report:
    t0 = time.time()
    box = cfg.box()
    mm = mirror_map(box, cfg.max_degree, store)
    violations = [
        {"lam": lam, "series": series} for lam, series in mm.forward.items() if series
    ]
    defects = {lam: d for lam, d in mirror_roundtrip_defect(box, mm).items() if d}
    if defects:
        violations.append({"roundtrip": defects})
    return Report("mirror-small", len(mm.forward) * cfg.max_degree, violations,
                  time.time() - t0, store.stats())


def _suite_j_i(cfg: RunConfig, store: MemoStore) -> Report:
    t0 = time.time()
    box = cfg.box()
    res = solve_c_coefficients(i_function(box, cfg.max_degree), fundamental_solution(box), box)
    details = {
        "c_series": {
            str(lam): {f"Q^{d} z^{zp}": v for (d, zp), v in series.items()}
            for lam, series in res.c_series.items()
        }
    }
    return Report("j-i", cfg.max_degree + 1, res.residual, time.time() - t0,
                  store.stats(), details=details)


SUITE_RUNNERS = {
    "martin": _suite_martin,
    "two-point": _suite_two_point,
    "three-point": _suite_three_point,
    "four-point-divisor": _suite_four_point_divisor,
    "five-point-symmetry": _suite_five_point_symmetry,
    "wdvv-abelian": _suite_wdvv_abelian,
    "wdvv-grass": _suite_wdvv_grass,
    "omega-trivial": _suite_omega_trivial,
    "mirror-small": _suite_mirror_small,
    "j-i": _suite_j_i,
}

# suites that need k < n (a Grassmannian target, not just a product space)
BOX_SUITES = frozenset(SUITES) - {"wdvv-abelian"}


def run_suites(cfg: RunConfig, store: MemoStore) -> list[Report]:
    names = list(SUITES) if "all" in cfg.suites else [s for s in SUITES if s in cfg.suites]
    reports = []
    for name in names:
        if name in BOX_SUITES and not cfg.k < cfg.n:
            raise ValueError(f"suite {name!r} needs a Grassmannian target (k < n)")
        reports.append(SUITE_RUNNERS[name](cfg, store))
    return reports


# ---------------------------------------------------------------------------
# commands

def _resolve_cache(args) -> str:
    return os.environ.get("ABELIANIZER_CACHE") or getattr(args, "cache", None)


def _open_store(args) -> MemoStore:
    path = _resolve_cache(args)
    store = MemoStore(path)
    if path and os.path.exists(path):
        store.load(path)
    return store


def cmd_invariant(args, parser) -> int:
    try:
        box = BoxSpec(args.k, args.n)
        parts = [parse_partition(p) for p in args.parts.split(";") if p.strip()]
    except ValueError as exc:
        parser.error(str(exc))
    if len(parts) < 3:
        parser.error("need at least 3 insertions")
    for p in parts:
        if not p.fits(box):
            parser.error(f"partition {p} does not fit the {box.k}x{box.cols} box")
    if args.d < 0:
        parser.error("degree must be nonnegative")
    store = _open_store(args)

    def corrected(ps, d):
        return evaluate_formula(generate_formula(len(ps)), ps, d, box, store)

    value = corrected(parts, args.d)
    oracle = None
    sigma1 = Partition((1,))
    if len(parts) == 3:
        oracle = grassmannian.three_point(parts[0], parts[1], parts[2], args.d, box)
    elif sigma1 in parts and args.d >= 1:
        rest = list(parts)
        rest.remove(sigma1)
        if len(rest) == 3:
            oracle = args.d * grassmannian.three_point(rest[0], rest[1], rest[2], args.d, box)
        else:
            oracle = args.d * corrected(rest, args.d)
    record = {
        "k": args.k, "n": args.n, "partitions": [str(p) for p in parts], "d": args.d,
        "value": _jsonable(value), "oracle": _jsonable(oracle) if oracle is not None else None,
    }
    print(json.dumps(record, sort_keys=True))
    if _resolve_cache(args):
        store.save(_resolve_cache(args))
    return 0 if oracle is None or oracle == value else 1


def cmd_verify(args, parser) -> int:
    try:
        cfg = RunConfig(
            k=args.k, n=args.n, max_degree=args.max_degree,
            max_insertions=args.max_insertions, z_depth=args.z_depth,
            suites=tuple(args.suite), cache=_resolve_cache(args),
            fmt=args.format, seed=args.seed, jobs=args.jobs,
        )
    except ValueError as exc:
        parser.error(str(exc))
    store = _open_store(args)
    try:
        reports = run_suites(cfg, store)
    except ValueError as exc:
        parser.error(str(exc))
    payload = [r.to_dict() for r in reports]
    if cfg.fmt == "json":
        out = json.dumps(payload, indent=1, sort_keys=True)
    else:
        lines = ["| suite | instances | passed | wall time (s) |", "|---|---|---|---|"]
        for r in reports:
            lines.append(f"| {r.suite} | {r.instances} | {r.passed} | {r.wall_time:.2f} |")
        out = "\n".join(lines)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(out + "\n")
    else:
        print(out)
    if cfg.cache:
        store.save(cfg.cache)
    return 0 if all(r.passed for r in reports) else 1


def _grass_rows(cfg: RunConfig, store: MemoStore):
    box = cfg.box()
    inv = AssembledInvariants(box, store)
    for m in range(3, cfg.max_insertions + 1):
        for combo in itertools.combinations_with_replacement(box_partitions(box), m):
            for d in range(cfg.max_degree + 1):
                if sum(p.weight for p in combo) != box.dim + box.n * d + m - 3:
                    continue
                yield d, ";".join(str(p) for p in combo), inv.value(combo, d)


def _abelian_rows(cfg: RunConfig, store: MemoStore):
    space = cfg.space()
    monos = space.monomials()
    degrees = [
        dd for dd in itertools.product(range(cfg.max_degree + 1), repeat=space.k)
        if 0 < sum(dd) <= cfg.max_degree
    ]
    for m in range(3, cfg.max_insertions + 1):
        for combo in itertools.combinations_with_replacement(monos, m):
            for dd in degrees:
                if sum(sum(e) for e in combo) != space.dim + space.c1_degree(dd) + m - 3:
                    continue
                label = ";".join("H^" + ".".join(str(x) for x in e) for e in combo)
                yield multidegree_text(dd), label, gw_invariant(space, combo, dd, store)


def cmd_table(args, parser) -> int:
    try:
        cfg = RunConfig(
            k=args.k, n=args.n, max_degree=args.max_degree,
            max_insertions=args.max_insertions, cache=_resolve_cache(args), fmt=args.format,
        )
        if args.side == "grass":
            cfg.box()
    except ValueError as exc:
        parser.error(str(exc))
    store = _open_store(args)
    rows = list(_grass_rows(cfg, store) if args.side == "grass" else _abelian_rows(cfg, store))
    rows.sort(key=lambda r: (str(r[0]), r[1]))
    if cfg.fmt == "csv":
        lines = ["degree,insertions,value"]
        lines += [f"{d},{ins},{_jsonable(v)}" for d, ins, v in rows]
    elif cfg.fmt == "markdown":
        lines = ["| degree | insertions | value |", "|---|---|---|"]
        lines += [f"| {d} | {ins} | {_jsonable(v)} |" for d, ins, v in rows]
    else:
        lines = [json.dumps([{"degree": _jsonable(d), "insertions": i, "value": _jsonable(v)}
                             for d, i, v in rows], indent=1, sort_keys=True)]
    out = "\n".join(lines)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(out + "\n")
    else:
        print(out)
    if cfg.cache:
        store.save(cfg.cache)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="abelianizer",
        description="Exact Gromov-Witten invariants of Grassmannians via abelianization",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--k", type=int, required=True)
        p.add_argument("--n", type=int, required=True)
        p.add_argument("--cache", default=None, help="cache file (env ABELIANIZER_CACHE overrides)")
        p.add_argument("--format", choices=("json", "csv", "markdown"), default="json")
        p.add_argument("--out", default=None, help="write output to a file")

    p_inv = sub.add_parser("invariant", help="one corrected Grassmannian invariant")
    common(p_inv)
    p_inv.add_argument("--parts", required=True, help='insertions, e.g. "[1];[2,1];[2,2]"')
    p_inv.add_argument("--d", type=int, required=True)

    p_ver = sub.add_parser("verify", help="run verification suites")
    common(p_ver)
    p_ver.add_argument("--suite", action="append", default=None,
                       help=f"suite name or 'all'; known: {', '.join(SUITES)}")
    p_ver.add_argument("--max-degree", type=int, default=2)
    p_ver.add_argument("--max-insertions", type=int, default=5)
    p_ver.add_argument("--z-depth", type=int, default=8)
    p_ver.add_argument("--seed", type=int, default=0)
    p_ver.add_argument("--jobs", type=int, default=1, help="accepted for interface stability; suites run serially")

    p_tab = sub.add_parser("table", help="emit a table of invariants within bounds")
    common(p_tab)
    p_tab.add_argument("--max-degree", type=int, default=2)
    p_tab.add_argument("--max-insertions", type=int, default=3)
    p_tab.add_argument("--side", choices=("grass", "abelian"), default="grass")

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "suite", None) is None and args.command == "verify":
        args.suite = ["all"]
    try:
        if args.command == "invariant":
            return cmd_invariant(args, parser)
        if args.command == "verify":
            return cmd_verify(args, parser)
        if args.command == "table":
            return cmd_table(args, parser)
    except CacheVersionError as exc:
        print(f"cache error: {exc}", file=sys.stderr)
        return 3
    parser.error("unknown command")


if __name__ == "__main__":
    sys.exit(main())
