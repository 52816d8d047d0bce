"""Write GNI predicate and circuit files for two graph files.

    python scripts/make_gni_circuits.py data/triangle.graph data/path3.graph data/gni_tri_path
"""

import argparse
import os

from countq.constructions import construction_circuit_text
from countq.gap_oracle import build_gni_predicate, format_predicate, parse_graph


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("graph1")
    ap.add_argument("graph2")
    ap.add_argument("stem", help="output prefix; writes <stem>.pred and <stem>.<variant>.circ")
    ap.add_argument("--variant", choices=("sqrt2", "rational", "both"), default="both")
    args = ap.parse_args()

    with open(args.graph1) as f1, open(args.graph2) as f2:
        pred = build_gni_predicate(parse_graph(f1.read()), parse_graph(f2.read()))
    pred_path = args.stem + ".pred"
    with open(pred_path, "w") as fh:
        fh.write(format_predicate(pred))
    variants = ("sqrt2", "rational") if args.variant == "both" else (args.variant,)
    for v in variants:
        path = f"{args.stem}.{v}.circ"
        with open(path, "w") as fh:
            fh.write(construction_circuit_text(v, os.path.basename(pred_path), pred.m))
        print(f"wrote {path} (m = {pred.m})")


if __name__ == "__main__":
    main()
