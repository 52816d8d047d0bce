"""Graph non-isomorphism over every ordered pair of small-graph classes.

For each pair, build the gap predicate, run the construction and compare
"amplitude is zero" with brute-force isomorphism.  Prints a summary and, with
--matrix, the v-class x v-class grid of verdicts (. isomorphic, # not).
"""

import argparse
import time

from countq.catalog import canonical_form, gni_pairs, isomorphism_classes
from countq.constructions import run
from countq.gap_oracle import build_gni_predicate


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--vertices", type=int, default=4)
    ap.add_argument("--variant", choices=("sqrt2", "rational"), default="sqrt2")
    ap.add_argument("--matrix", action="store_true")
    args = ap.parse_args()

    t0 = time.perf_counter()
    pairs = gni_pairs(args.vertices)
    verdicts = {}
    mismatches = 0
    for g1, g2 in pairs:
        rep = run(args.variant, build_gni_predicate(g1, g2), keep_state=False)
        zero = not rep.accepting_amplitude
        iso = canonical_form(g1) == canonical_form(g2)
        mismatches += zero != iso
        verdicts[canonical_form(g1), canonical_form(g2)] = zero
    elapsed = time.perf_counter() - t0
    print(f"{len(pairs)} pairs on {args.vertices} vertices ({args.variant}), "
          f"{sum(verdicts.values())} distinct isomorphic, {mismatches} mismatches, {elapsed:.1f}s")
    if args.matrix:
        reps = [canonical_form(g) for g in isomorphism_classes(args.vertices)]
        for a in reps:
            print("".join("." if verdicts[a, b] else "#" for b in reps))


if __name__ == "__main__":
    main()
