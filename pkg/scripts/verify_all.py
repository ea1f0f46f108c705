#!/usr/bin/env python3
"""Run the verification battery over the standard targets and print a table.

Usage: python scripts/verify_all.py [--deep] [--cache PATH]

--deep raises the degree/insertion bounds (several minutes instead of
seconds).  Exit status 1 when any suite reports a violation.
"""

import argparse
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from abelianizer.abelian_gw import MemoStore
from abelianizer.cli import RunConfig, run_suites


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--deep", action="store_true")
    ap.add_argument("--cache", default=None)
    args = ap.parse_args()

    d, l = (2, 6) if args.deep else (2, 5)
    plans = [
        RunConfig(k=2, n=4, max_degree=d, max_insertions=l),
        RunConfig(k=2, n=5, max_degree=d, max_insertions=l),
        RunConfig(k=3, n=6, max_degree=1, max_insertions=4,
                  suites=("martin", "omega-trivial", "two-point", "three-point")),
    ]
    store = MemoStore(args.cache)
    if args.cache:
        try:
            store.load(args.cache)
        except FileNotFoundError:
            pass

    print(f"{'target':<10} {'suite':<22} {'instances':>9} {'pass':>5} {'time':>8}")
    ok = True
    for cfg in plans:
        for rep in run_suites(cfg, store):
            ok = ok and rep.passed
            print(f"Gr({cfg.k},{cfg.n})   {rep.suite:<22} {rep.instances:>9} "
                  f"{str(rep.passed):>5} {rep.wall_time:>7.2f}s")
    if args.cache:
        store.save(args.cache)
    print("cache:", store.stats())
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
