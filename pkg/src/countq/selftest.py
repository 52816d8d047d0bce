"""Built-in invariant suite behind ``countq selftest``."""

from __future__ import annotations

import sys
import time
from typing import Callable, TextIO

from .algebraic_converse import (
    acceptance_probability,
    amplitude_decomposition,
    qap_decide,
    simulate_field,
    verify_unitary,
)
from .catalog import deep_rotation_circuit, gni_pairs, predicate_suite, random_circuit_suite
from .constructions import (
    A_MATRIX,
    B_MATRIX,
    HADAMARD,
    T_PRINTED,
    construction_circuit,
    kron,
    rational_constant,
    run_rational,
    run_sqrt2,
    transpose,
)
from .errors import InvariantViolation
from .exact_scalar import SQRT2, RootTwo, is_zero
from .gap_oracle import are_isomorphic, build_gni_predicate, count_automorphisms, count_isomorphisms, gap, negate
from .state_vector import Gate1, apply_gate1, initial_state, key_to_bits

Check = Callable[[bool], str]


def _require(cond: bool, what: str) -> None:
    if not cond:
        raise InvariantViolation(what)


def check_sqrt2_law(quick: bool) -> str:
    cases = predicate_suite(range(1, 7 if quick else 13), 2 if quick else 9, seed=1)
    for c in cases:
        run_sqrt2(c.predicate, c.x, keep_state=False)  # raises on any mismatch
    return f"{len(cases)} predicates"


def check_rational_law(quick: bool) -> str:
    _require(rational_constant() == 2, "rational constant drifted")
    cases = predicate_suite(range(1, 6 if quick else 11), 2 if quick else 9, seed=2)
    for c in cases:
        run_rational(c.predicate, c.x, keep_state=False)
    return f"{len(cases)} predicates, c_rat={rational_constant()}"


def check_t_matrix(quick: bool) -> str:
    _require(transpose(T_PRINTED) == kron(A_MATRIX, B_MATRIX), "printed T is not (A x B)^T")
    for name, mat in (("T", T_PRINTED), ("A", A_MATRIX), ("B", B_MATRIX), ("H", HADAMARD)):
        _require(verify_unitary(mat), f"{name} is not unitary")
    return "T, A, B, H exact"


def check_negation(quick: bool) -> str:
    cases = predicate_suite(range(1, 9), 1, seed=3)
    for c in cases:
        _require(gap(negate(c.predicate), c.x).gap == -gap(c.predicate, c.x).gap, f"{c.name}: negation")
    return f"{len(cases)} predicates"


def check_gni(quick: bool) -> str:
    pairs = gni_pairs(3 if quick else 4)
    for g1, g2 in pairs:
        g = gap(build_gni_predicate(g1, g2)).gap
        _require(g == count_isomorphisms(g1, g2) - count_automorphisms(g1), "gni gap formula")
        _require((g == 0) == are_isomorphic(g1, g2), "gni zero test")
    return f"{len(pairs)} graph pairs"


def check_fourier_involution(quick: bool) -> str:
    m = 6 if quick else 10
    one = RootTwo(1)
    total = 0
    for key in range(1 << m):
        bits = key_to_bits(key, m)
        s = initial_state(m, bits, one)
        for q in range(m):
            g = Gate1(HADAMARD, q)
            s = apply_gate1(apply_gate1(s, g), g)
        _require(s.as_dict() == {bits: one}, f"H twice on |{bits}>")
        total += 1
    return f"{total} basis states"


def check_representation(quick: bool) -> str:
    cases = predicate_suite(range(1, 5), 1, seed=4)[:25]
    for c in cases:
        rep = run_sqrt2(c.predicate, c.x)
        circuit = construction_circuit("sqrt2", c.predicate, c.x)
        state = simulate_field(circuit)
        _require(len(state) == len(rep.final_state), f"{c.name}: support differs")
        for bits, amp in rep.final_state:
            _require(amp.as_field(SQRT2) == state.as_dict().get(bits), f"{c.name}: amplitude of |{bits}>")
            _require(amplitude_decomposition(circuit, bits, state).value(SQRT2) == amp.as_field(SQRT2),
                     f"{c.name}: decomposition")
    return f"{len(cases)} circuits"


def check_qap(quick: bool) -> str:
    n = 30 if quick else 100
    hits = 0
    for c in random_circuit_suite(n, seed=5):
        direct = not is_zero(acceptance_probability(c))
        _require(qap_decide(c) == direct, "qap_decide disagrees with the direct zero test")
        hits += direct
    return f"{n} circuits, {hits} possible"


def check_deep_rotation(quick: bool) -> str:
    c = deep_rotation_circuit()
    state = simulate_field(c)
    _require(qap_decide(c, state), "deep rotation circuit should accept")
    amp = state.as_dict()["1"]
    _require(amp.coeffs[1] != 0, "deep rotation amplitude should be irrational")
    den = max(v.denominator for v in amp.coeffs)
    _require(den >= 1 << 64, "denominator below 2^64")
    return f"amplitude denominator 2^{den.bit_length() - 1}+"


CHECKS: dict[str, Check] = {
    "sqrt2-amplitude-law": check_sqrt2_law,
    "rational-amplitude-law": check_rational_law,
    "t-matrix-orthogonal": check_t_matrix,
    "gap-negation": check_negation,
    "gni-gap-formula": check_gni,
    "fourier-involution": check_fourier_involution,
    "representation-independence": check_representation,
    "qap-zero-test": check_qap,
    "exactness-stress": check_deep_rotation,
}


def run_selftest(quick: bool = False, out: TextIO | None = None) -> int:
    out = sys.stdout if out is None else out
    failed: list[str] = []
    width = max(map(len, CHECKS))
    for name, check in CHECKS.items():
        t0 = time.perf_counter()
        try:
            detail = check(quick)
            status = "PASS"
        except Exception as exc:  # report everything, the table is the product
            detail = f"{type(exc).__name__}: {exc}"
            status = "FAIL"
            failed.append(name)
        out.write(f"{name:<{width}}  {status}  {time.perf_counter() - t0:6.2f}s  {detail}\n")
    if failed:
        out.write(f"FAILED: {', '.join(failed)}\n")
        return 3
    out.write("all checks passed\n")
    return 0
