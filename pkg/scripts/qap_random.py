"""Decide acceptance possibility for random exact circuits and tabulate by field."""

import argparse
import collections
import time

from countq.algebraic_converse import probability_decomposition, qap_decide, simulate_field
from countq.catalog import random_circuit_suite


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--count", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--max-width", type=int, default=6)
    ap.add_argument("--max-layers", type=int, default=12)
    args = ap.parse_args()

    stats = collections.defaultdict(collections.Counter)
    t0 = time.perf_counter()
    for c in random_circuit_suite(args.count, args.seed, args.max_width, args.max_layers):
        state = simulate_field(c)
        possible = qap_decide(c, state)
        dec = probability_decomposition(c, state)
        s = stats[c.spec.name]
        s["circuits"] += 1
        s["possible"] += possible
        s["max_D^t_bits"] = max(s["max_D^t_bits"], (dec.D**dec.t).bit_length())
    print(f"{'field':<10} {'circuits':>8} {'possible':>8} {'max D^t bits':>12}")
    for name, s in sorted(stats.items()):
        print(f"{name:<10} {s['circuits']:>8} {s['possible']:>8} {s['max_D^t_bits']:>12}")
    print(f"{time.perf_counter() - t0:.2f}s")


if __name__ == "__main__":
    main()
