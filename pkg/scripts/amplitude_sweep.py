"""Run a construction over the predicate suite and write one TSV row per predicate.

    python scripts/amplitude_sweep.py --variant sqrt2 --max-m 12 --out sweep_sqrt2.tsv
"""

import argparse
import collections
import csv
import sys
import time
from dataclasses import dataclass

from countq.catalog import predicate_suite
from countq.constructions import run
from countq.exact_scalar import format_scalar, to_decimal


@dataclass
class SweepConfig:
    variant: str = "sqrt2"
    max_m: int = 12
    random_per_m: int = 9
    seed: int = 0
    digits: int = 12
    out: str = "-"


def sweep(cfg: SweepConfig):
    for case in predicate_suite(range(1, cfg.max_m + 1), cfg.random_per_m, cfg.seed):
        t0 = time.perf_counter()
        # crosscheck on: any gap/amplitude disagreement raises
        rep = run(cfg.variant, case.predicate, case.x, keep_state=False)
        yield {
            "name": case.name,
            "m": rep.m,
            "n": case.predicate.n,
            "x": case.x,
            "gap": rep.gap_crosscheck.gap,
            "amplitude": format_scalar(rep.accepting_amplitude),
            "amplitude_decimal": to_decimal(rep.accepting_amplitude, cfg.digits),
            "probability": format_scalar(rep.acceptance_probability),
            "zero": int(not rep.accepting_amplitude),
            "seconds": f"{time.perf_counter() - t0:.4f}",
        }


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--variant", choices=("sqrt2", "rational"), default="sqrt2")
    ap.add_argument("--max-m", type=int, default=12)
    ap.add_argument("--random-per-m", type=int, default=9)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--digits", type=int, default=12)
    ap.add_argument("--out", default="-")
    cfg = SweepConfig(**vars(ap.parse_args()))

    fh = sys.stdout if cfg.out == "-" else open(cfg.out, "w", newline="")
    writer = None
    zeros, total = collections.Counter(), collections.Counter()
    t0 = time.perf_counter()
    for row in sweep(cfg):
        if writer is None:
            writer = csv.DictWriter(fh, fieldnames=list(row), delimiter="\t", lineterminator="\n")
            writer.writeheader()
        writer.writerow(row)
        fam = row["name"].split("/")[0].rstrip("0123456789")
        total[fam] += 1
        zeros[fam] += row["zero"]
    if fh is not sys.stdout:
        fh.close()
    print(f"# {sum(total.values())} predicates in {time.perf_counter() - t0:.1f}s", file=sys.stderr)
    for fam in sorted(total):
        print(f"#   {fam:<10} zero amplitude {zeros[fam]:>3}/{total[fam]}", file=sys.stderr)


if __name__ == "__main__":
    main()
