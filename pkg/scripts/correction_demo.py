#!/usr/bin/env python3
"""Show why the naive one-bracket formula fails and how the corrections fix it.

Prints the 4- and 5-point correction-formula trees, then scans Gr(2,4) for
4-point invariants where the naive main term disagrees with the corrected
value, cross-checking every divisor-axiom instance against the rim-hook
oracle.
"""

import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from abelianizer.abelian_gw import MemoStore
from abelianizer.correspondence import generate_formula, naive_vs_corrected, render_formula
from abelianizer.partitions import BoxSpec


def main():
    for arity in (4, 5):
        print(f"--- {arity}-point formula ---")
        print(render_formula(generate_formula(arity)))
        print()

    box = BoxSpec(2, 4)
    store = MemoStore()
    rep = naive_vs_corrected(box, 3, store)
    print(f"Gr(2,4) 4-point instances, d <= 3: {len(rep['instances'])}")
    print(f"divisor-oracle mismatches: {len(rep['oracle_mismatches'])}")
    print("instances with a nonzero correction term:")
    for r in rep["nonzero_corrections"]:
        parts = ", ".join(str(p) for p in r["partitions"])
        print(f"  <{parts}>_d={r['d']}  naive={r['naive']}  corrected={r['corrected']}")
    return 0 if rep["nonzero_corrections"] and not rep["oracle_mismatches"] else 1


if __name__ == "__main__":
    sys.exit(main())
