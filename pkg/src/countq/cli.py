"""Command-line front end.

Exit codes: 0 success / acceptance possible, 1 acceptance probability exactly
zero (``qap`` only), 2 usage or input error, 3 internal invariant violation.

Every numeric flag can also be set through a ``COUNTQ_`` environment
variable (``COUNTQ_DIGITS``, ``COUNTQ_THREADS``, ``COUNTQ_MAX_WITNESS_BITS``,
``COUNTQ_MAX_TERMS``, ``COUNTQ_MAX_VERTICES``, ``COUNTQ_VARIANT``); explicit
flags win.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass, field
from typing import Sequence, TextIO

from .algebraic_converse import (
    acceptance_probability,
    amplitude_decomposition,
    parse_circuit,
    probability_decomposition,
    qap_decide,
    simulate_field,
)
from .constructions import VARIANTS, ConstructionReport, run
from .errors import CountQError, InvariantViolation, ParseError, ResourceLimitError
from .exact_scalar import format_scalar, to_decimal
from .gap_oracle import (
    DEFAULT_MAX_WITNESS_BITS,
    Graph,
    build_gni_predicate,
    count_automorphisms,
    count_isomorphisms,
    gap,
    parse_graph,
    parse_predicate,
)
from .state_vector import DEFAULT_MAX_TERMS, SparseState, total_norm_sq

EXIT_OK, EXIT_NEGATIVE, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3
COMMANDS = ("gap", "simulate", "qap", "gni", "selftest")
DEFAULT_MAX_VERTICES = 5

TSV_COLUMNS = {
    "gap": ("command", "file", "x", "m", "accept", "reject", "gap"),
    "simulate": (
        "command", "file", "x", "variant", "m", "p", "accepting_basis", "amplitude",
        "amplitude_decimal", "probability", "probability_decimal", "gap", "crosscheck",
    ),
    "qap": ("command", "file", "qubits", "layers", "decision", "probability", "probability_decimal"),
    "gni": (
        "command", "variant", "vertices", "m", "amplitude", "probability",
        "iso_count", "aut_count", "verdict", "search_verdict",
    ),
}


@dataclass
class RunConfig:
    command: str
    paths: list[str] = field(default_factory=list)
    x: str = ""
    variant: str = "sqrt2"
    trace: bool = False
    dump: bool = False
    digits: int = 10
    max_witness_bits: int = DEFAULT_MAX_WITNESS_BITS
    max_terms: int = DEFAULT_MAX_TERMS
    max_vertices: int = DEFAULT_MAX_VERTICES
    threads: int = 1
    crosscheck: bool = True
    tsv: bool = False
    quick: bool = False

    def __post_init__(self) -> None:
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}")
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        for name in ("digits", "max_witness_bits", "max_terms", "max_vertices", "threads"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(f"COUNTQ_{name}")
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError:
        raise argparse.ArgumentTypeError(f"COUNTQ_{name}={raw!r} is not an integer") from None


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--variant", choices=VARIANTS, default=os.environ.get("COUNTQ_VARIANT", "sqrt2"))
    common.add_argument("--digits", type=_positive, default=_env_int("DIGITS", 10))
    common.add_argument("--trace", action="store_true", help="print one line per layer")
    common.add_argument("--dump", action="store_true", help="with --trace, dump the full state after each layer")
    common.add_argument("--tsv", action="store_true", help="one tab-separated record with a header line")
    common.add_argument("--threads", type=_positive, default=_env_int("THREADS", 1))
    common.add_argument("--max-witness-bits", type=_positive, default=_env_int("MAX_WITNESS_BITS", DEFAULT_MAX_WITNESS_BITS))
    common.add_argument("--max-terms", type=_positive, default=_env_int("MAX_TERMS", DEFAULT_MAX_TERMS))
    common.add_argument("--max-vertices", type=_positive, default=_env_int("MAX_VERTICES", DEFAULT_MAX_VERTICES))
    common.add_argument("--no-crosscheck", dest="crosscheck", action="store_false")

    parser = argparse.ArgumentParser(prog="countq", description="Exact GapP <-> quantum acceptance tools.")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("gap", parents=[common], help="count accepting/rejecting witnesses")
    p.add_argument("predicate")
    p.add_argument("x", nargs="?", default="")
    p = sub.add_parser("simulate", parents=[common], help="run a GapP-to-quantum construction")
    p.add_argument("predicate")
    p.add_argument("x", nargs="?", default="")
    p = sub.add_parser("qap", parents=[common], help="decide whether a circuit can accept")
    p.add_argument("circuit")
    p = sub.add_parser("gni", parents=[common], help="graph non-isomorphism via amplitude cancellation")
    p.add_argument("graph1")
    p.add_argument("graph2")
    p = sub.add_parser("selftest", parents=[common], help="run the built-in invariant suite")
    p.add_argument("--quick", action="store_true")
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    paths = [getattr(ns, k) for k in ("predicate", "circuit", "graph1", "graph2") if getattr(ns, k, None)]
    return RunConfig(
        command=ns.command,
        paths=paths,
        x=getattr(ns, "x", ""),
        variant=ns.variant,
        trace=ns.trace,
        dump=ns.dump,
        digits=ns.digits,
        max_witness_bits=ns.max_witness_bits,
        max_terms=ns.max_terms,
        max_vertices=ns.max_vertices,
        threads=ns.threads,
        crosscheck=ns.crosscheck,
        tsv=ns.tsv,
        quick=getattr(ns, "quick", False),
    )


def _read(path: str) -> str:
    try:
        with open(path) as fh:
            return fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None


def _emit_tsv(out: TextIO, command: str, row: dict) -> None:
    cols = TSV_COLUMNS[command]
    out.write("\t".join(cols) + "\n")
    out.write("\t".join(str(row[c]) for c in cols) + "\n")


def _exact_and_decimal(x, digits: int) -> str:
    return f"{format_scalar(x)} (≈ {to_decimal(x, digits)})"


def _tracer(cfg: RunConfig, out: TextIO):
    if not cfg.trace:
        return None

    def on_layer(i: int, layer, state: SparseState) -> None:
        norm = total_norm_sq(state)
        shown = "1" if norm == 1 else format_scalar(norm)
        out.write(f"layer {i}: {len(state)} terms, norm={shown}\n")
        if cfg.dump:
            out.write(state.dump(cfg.digits) + "\n")

    return on_layer


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------


def cmd_gap(cfg: RunConfig, out: TextIO) -> int:
    path = cfg.paths[0]
    pred = parse_predicate(_read(path))
    gv = gap(pred, cfg.x, max_witness_bits=cfg.max_witness_bits, workers=cfg.threads)
    if cfg.tsv:
        _emit_tsv(out, "gap", dict(command="gap", file=path, x=cfg.x, m=pred.m,
                                   accept=gv.accept_count, reject=gv.reject_count, gap=gv.gap))
    else:
        out.write(f"A={gv.accept_count} R={gv.reject_count} gap={gv.gap}\n")
    return EXIT_OK


def _run_construction(cfg: RunConfig, pred, x: str, out: TextIO) -> ConstructionReport:
    return run(
        cfg.variant, pred, x,
        crosscheck=cfg.crosscheck,
        max_witness_bits=cfg.max_witness_bits,
        max_terms=cfg.max_terms,
        workers=cfg.threads,
        keep_state=False,
        on_layer=_tracer(cfg, out),
    )


def cmd_simulate(cfg: RunConfig, out: TextIO) -> int:
    path = cfg.paths[0]
    pred = parse_predicate(_read(path))
    rep = _run_construction(cfg, pred, cfg.x, out)
    gv = rep.gap_crosscheck
    verdict = "ok" if gv is not None else "skipped"
    if cfg.tsv:
        _emit_tsv(out, "simulate", dict(
            command="simulate", file=path, x=cfg.x, variant=rep.variant, m=rep.m, p=rep.p,
            accepting_basis=rep.accepting_basis,
            amplitude=format_scalar(rep.accepting_amplitude),
            amplitude_decimal=to_decimal(rep.accepting_amplitude, cfg.digits),
            probability=format_scalar(rep.acceptance_probability),
            probability_decimal=to_decimal(rep.acceptance_probability, cfg.digits),
            gap="" if gv is None else gv.gap, crosscheck=verdict,
        ))
        return EXIT_OK
    out.write(f"variant = {rep.variant}, m = {rep.m}, p = {rep.p}\n")
    out.write(f"accepting basis = |{rep.accepting_basis}⟩\n")
    out.write(f"amplitude = {_exact_and_decimal(rep.accepting_amplitude, cfg.digits)}\n")
    out.write(f"prob = {_exact_and_decimal(rep.acceptance_probability, cfg.digits)}\n")
    if gv is None:
        out.write("crosscheck: skipped\n")
    else:
        out.write(f"crosscheck: A={gv.accept_count} R={gv.reject_count} gap={gv.gap} ok\n")
    return EXIT_OK


def cmd_qap(cfg: RunConfig, out: TextIO) -> int:
    path = cfg.paths[0]
    circuit = parse_circuit(_read(path), base_dir=os.path.dirname(os.path.abspath(path)))
    state = simulate_field(circuit, workers=cfg.threads, max_terms=cfg.max_terms, on_layer=_tracer(cfg, out))
    possible = qap_decide(circuit, state)
    prob = acceptance_probability(circuit, state)
    if cfg.tsv:
        _emit_tsv(out, "qap", dict(
            command="qap", file=path, qubits=circuit.width, layers=len(circuit.layers),
            decision="possible" if possible else "impossible",
            probability=format_scalar(prob), probability_decimal=to_decimal(prob, cfg.digits),
        ))
    else:
        out.write(f"acceptance {'possible' if possible else 'impossible'}\n")
        out.write(f"prob = {_exact_and_decimal(prob, cfg.digits)}\n")
        if cfg.trace:
            dec = probability_decomposition(circuit, state)
            out.write(f"probability = (1/{dec.D}^{dec.t}) * sum f_j alpha_j\n")
            for f, alpha in zip(dec.coefficients, dec.basis):
                out.write(f"  f = {f}  alpha = {format_scalar(alpha)}\n")
            for bits, _ in state:
                if all(p == "-" or p == b for p, b in zip(circuit.accepting, bits)):
                    amp = amplitude_decomposition(circuit, bits, state)
                    out.write(f"  |{bits}⟩ = (1/{amp.d}^{amp.t}) * {list(amp.coefficients)}\n")
    return EXIT_OK if possible else EXIT_NEGATIVE


@dataclass
class GniResult:
    report: ConstructionReport
    iso_count: int
    aut_count: int

    @property
    def amplitude_zero(self) -> bool:
        return not self.report.accepting_amplitude

    @property
    def search_isomorphic(self) -> bool:
        return self.iso_count > 0


def run_gni(g1: Graph, g2: Graph, cfg: RunConfig, out: TextIO | None = None) -> GniResult:
    v = max(g1.vertex_count, g2.vertex_count)
    if v > cfg.max_vertices:
        raise ResourceLimitError(f"{v} vertices exceeds the cap of {cfg.max_vertices}")
    pred = build_gni_predicate(g1, g2)
    rep = _run_construction(cfg, pred, "", out if out is not None else sys.stdout)
    iso = count_isomorphisms(g1, g2)
    aut = count_automorphisms(g1)
    result = GniResult(rep, iso, aut)
    if result.amplitude_zero != result.search_isomorphic:
        raise InvariantViolation(
            f"amplitude says {'isomorphic' if result.amplitude_zero else 'non-isomorphic'} "
            f"but permutation search found {iso} isomorphisms"
        )
    return result


def cmd_gni(cfg: RunConfig, out: TextIO) -> int:
    g1 = parse_graph(_read(cfg.paths[0]))
    g2 = parse_graph(_read(cfg.paths[1]))
    res = run_gni(g1, g2, cfg, out)
    rep = res.report
    verdict = "ISOMORPHIC (amplitude = 0)" if res.amplitude_zero else "NON-ISOMORPHIC (amplitude ≠ 0)"
    search = "isomorphic" if res.search_isomorphic else "non-isomorphic"
    if cfg.tsv:
        _emit_tsv(out, "gni", dict(
            command="gni", variant=rep.variant, vertices=g1.vertex_count, m=rep.m,
            amplitude=format_scalar(rep.accepting_amplitude),
            probability=format_scalar(rep.acceptance_probability),
            iso_count=res.iso_count, aut_count=res.aut_count,
            verdict="isomorphic" if res.amplitude_zero else "non-isomorphic", search_verdict=search,
        ))
        return EXIT_OK
    out.write(f"{verdict}\n")
    out.write(f"amplitude = {_exact_and_decimal(rep.accepting_amplitude, cfg.digits)}\n")
    out.write(f"prob = {_exact_and_decimal(rep.acceptance_probability, cfg.digits)}\n")
    out.write(f"permutation search: {res.iso_count} isomorphisms, {res.aut_count} automorphisms ({search})\n")
    return EXIT_OK


def cmd_selftest(cfg: RunConfig, out: TextIO) -> int:
    from .selftest import run_selftest

    return run_selftest(quick=cfg.quick, out=out)


HANDLERS = {
    "gap": cmd_gap,
    "simulate": cmd_simulate,
    "qap": cmd_qap,
    "gni": cmd_gni,
    "selftest": cmd_selftest,
}


def main(argv: Sequence[str] | None = None, out: TextIO | None = None, err: TextIO | None = None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    try:
        ns = build_parser().parse_args(argv)
        cfg = config_from_args(ns)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    except (argparse.ArgumentTypeError, ValueError) as exc:
        err.write(f"countq: {exc}\n")
        return EXIT_USAGE
    try:
        return HANDLERS[cfg.command](cfg, out)
    except InvariantViolation as exc:
        err.write(f"countq: internal invariant violated: {exc}\n")
        return EXIT_INTERNAL
    except ResourceLimitError as exc:
        err.write(f"countq: resource limit: {exc}\n")
        return EXIT_USAGE
    except (CountQError, ValueError) as exc:
        err.write(f"countq: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
