"""Compile a witness predicate into a circuit whose accepting amplitude is its gap.

Two variants:

``sqrt2``
    Register ``[y0 .. y{m-1}, b]``.  Hadamard-scan the witness bits, XOR the
    predicate into ``b``, Hadamard-scan all ``m + 1`` bits, accept on
    ``|0^m, 1>``.  The accepting amplitude is ``-gap / (sqrt2 * 2**(m-1))``.

``rational``
    Register ``[y0 .. y{m-1}, b0, b1]`` with amplitudes in
    ``{0, +-3/5, +-4/5, +-1}``.  Scan the witness bits with ``A``, move the
    flags to ``01`` (accept) or ``10`` (reject), apply ``A`` to ``b0`` and
    ``B`` to ``b1``, scan the witness bits with ``A`` again, accept on
    ``|1^m, 01>``.  The accepting amplitude is
    ``RATIONAL_CONSTANT * (12/25)**(m+1) * gap``.

The input ``x`` stays classical; it is baked into the oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Sequence

from .algebraic_converse import FieldCircuit, convert_layers
from .errors import InvariantViolation, ResourceLimitError
from .exact_scalar import RATIONALS, SQRT2, ExactScalar, FieldElement, RootTwo, norm_sq
from .gap_oracle import (
    DEFAULT_MAX_WITNESS_BITS,
    GapValue,
    WitnessPredicate,
    _bits,
    eval_predicate,
    gap,
)
from .state_vector import (
    DEFAULT_MAX_TERMS,
    Gate1,
    Gate2,
    Layer,
    PermOracle,
    SparseState,
    XorOracle,
    accepting_terms,
    amplitude_of,
    apply_layer,
    initial_state,
    total_norm_sq,
)

VARIANTS = ("sqrt2", "rational")

_H = RootTwo(0, 1, 1)
HADAMARD = ((_H, _H), (_H, -_H))

_F = Fraction
A_MATRIX = ((_F(3, 5), _F(-4, 5)), (_F(4, 5), _F(3, 5)))
B_MATRIX = ((_F(4, 5), _F(-3, 5)), (_F(3, 5), _F(4, 5)))

# Reference flag matrix, equal to (A (x) B)^T; row = pattern before, column = after.
T_PRINTED = tuple(
    tuple(_F(v, 25) for v in row)
    for row in ((12, 9, 16, 12), (-9, 12, -12, 16), (-16, -12, 12, 9), (12, -16, -9, 12))
)

# Flag update as target-pattern permutations, indexed by predicate value.
# Patterns are b0b1 read as a 2-bit number.
FLAG_PERMUTATIONS = (
    (2, 1, 0, 3),  # reject: 00 <-> 10
    (1, 0, 2, 3),  # accept: 00 <-> 01
)


@dataclass
class ConstructionReport:
    variant: str
    m: int
    p: int
    accepting_basis: str
    accepting_amplitude: ExactScalar
    acceptance_probability: ExactScalar
    gap_crosscheck: GapValue | None
    final_state: SparseState | None = None
    norm_checks: int = 0


def amplitude_exponent(variant: str, m: int) -> int:
    if variant == "sqrt2":
        return 2 * m - 1
    if variant == "rational":
        return 2 * m + 2
    raise ValueError(f"unknown variant {variant!r}")


def accepting_basis(variant: str, m: int) -> str:
    if variant == "sqrt2":
        return "0" * m + "1"
    if variant == "rational":
        return "1" * m + "01"
    raise ValueError(f"unknown variant {variant!r}")


def _predicate_function(p: WitnessPredicate, x: str) -> Callable[[int], int]:
    m = p.m

    def fn(pattern: int) -> int:
        return eval_predicate(p, x, format(pattern, f"0{m}b"))

    return fn


def sqrt2_layers(m: int, predicate: Callable[[int], int]) -> list[Layer]:
    layers: list[Layer] = [Gate1(HADAMARD, j, f"H y{j}") for j in range(m)]
    layers.append(XorOracle(tuple(range(m)), (m,), predicate, "oracle b^=P(x,y)"))
    layers += [Gate1(HADAMARD, j, f"H y{j}") for j in range(m)]
    layers.append(Gate1(HADAMARD, m, "H b"))
    return layers


def rational_layers(m: int, predicate: Callable[[int], int]) -> list[Layer]:
    layers: list[Layer] = [Gate1(A_MATRIX, j, f"A y{j}") for j in range(m)]
    layers.append(PermOracle(tuple(range(m)), (m, m + 1), predicate, FLAG_PERMUTATIONS, "oracle flag"))
    layers.append(Gate1(A_MATRIX, m, "A b0"))
    layers.append(Gate1(B_MATRIX, m + 1, "B b1"))
    layers += [Gate1(A_MATRIX, j, f"A y{j}") for j in range(m)]
    return layers


def build_layers(variant: str, m: int, predicate: Callable[[int], int]) -> list[Layer]:
    if variant == "sqrt2":
        return sqrt2_layers(m, predicate)
    if variant == "rational":
        return rational_layers(m, predicate)
    raise ValueError(f"unknown variant {variant!r}")


def describe_circuit(variant: str, m: int) -> str:
    """One-line layer listing, e.g. ``H y0; oracle b^=P(x,y); H y0; H b; accept |0,1⟩``."""
    layers = build_layers(variant, m, lambda _: 0)
    acc = accepting_basis(variant, m)
    ket = f"|{acc[:m]},{acc[m:]}⟩"
    return "; ".join([*(layer.label for layer in layers), f"accept {ket}"])


def transpose(matrix: Sequence[Sequence[ExactScalar]]) -> tuple[tuple[ExactScalar, ...], ...]:
    return tuple(zip(*matrix))


def kron(a: Sequence[Sequence[ExactScalar]], b: Sequence[Sequence[ExactScalar]]):
    """Kronecker product; ``a`` acts on the high-order factor."""
    return tuple(
        tuple(a[i][j] * b[k][l] for j in range(len(a[0])) for l in range(len(b[0])))
        for i in range(len(a))
        for k in range(len(b))
    )


def flag_gate() -> Gate2:
    """The flag rotation as a single two-qubit gate: ``A`` on ``b0`` times ``B`` on ``b1``."""
    return Gate2(kron(A_MATRIX, B_MATRIX), 0, 1, "T")


@lru_cache(maxsize=None)
def rational_constant() -> Fraction:
    """Constant ``c`` in ``amplitude = c * (12/25)**(m+1) * gap``.

    Fixed from a dense 8x8 matrix trace of the ``m = 1`` circuit for the
    always-accepting predicate (gap 1), independent of the sparse simulator.
    """
    one, zero = Fraction(1), Fraction(0)
    ident = ((one, zero), (zero, one))

    def on(q: int, g):
        mats = [ident, ident, ident]
        mats[q] = g
        return kron(kron(mats[0], mats[1]), mats[2])

    # accept-branch flag permutation 00 <-> 01 on qubits 1, 2 for both y
    perm = [[zero] * 8 for _ in range(8)]
    for src in range(8):
        y, flags = src >> 2, src & 3
        dst = (y << 2) | FLAG_PERMUTATIONS[1][flags]
        perm[dst][src] = one
    steps = [on(0, A_MATRIX), perm, on(1, A_MATRIX), on(2, B_MATRIX), on(0, A_MATRIX)]
    vec = [one] + [zero] * 7
    for mat in steps:
        vec = [sum((mat[r][c] * vec[c] for c in range(8)), zero) for r in range(8)]
    amp = vec[0b101]
    return amp / Fraction(12, 25) ** 2


def _check_run_args(p: WitnessPredicate, x: str, max_witness_bits: int) -> None:
    if p.m < 1:
        raise ValueError("constructions need at least one witness bit")
    if p.m > max_witness_bits:
        raise ResourceLimitError(f"m = {p.m} witness bits exceeds the cap of {max_witness_bits}")
    _bits(x, p.n, "x")


def _run(
    variant: str,
    p: WitnessPredicate,
    x: str,
    one: ExactScalar,
    *,
    crosscheck: bool,
    max_witness_bits: int,
    max_terms: int,
    workers: int,
    keep_state: bool,
    on_layer: Callable[[int, Layer, SparseState], None] | None,
) -> ConstructionReport:
    _check_run_args(p, x, max_witness_bits)
    m = p.m
    layers = build_layers(variant, m, _predicate_function(p, x))
    width = m + 1 if variant == "sqrt2" else m + 2
    state = initial_state(width, "0" * width, one)
    checks = 0
    for i, layer in enumerate(layers):
        state = apply_layer(state, layer, workers=workers, max_terms=max_terms)
        norm = total_norm_sq(state)
        if norm != 1:
            raise InvariantViolation(f"norm {norm} != 1 after layer {i} ({layer.label})")
        checks += 1
        if on_layer is not None:
            on_layer(i, layer, state)
    acc = accepting_basis(variant, m)
    amp = amplitude_of(state, acc)
    prob = norm_sq(amp)
    # the accept rule looks at a single basis state
    subspace = accepting_terms(state, acc)
    if sum((norm_sq(a) for _, a in subspace), state.zero) != prob:
        raise InvariantViolation("accepting subspace probability disagrees with the accepting amplitude")
    report = ConstructionReport(
        variant=variant,
        m=m,
        p=amplitude_exponent(variant, m),
        accepting_basis=acc,
        accepting_amplitude=amp,
        acceptance_probability=prob,
        gap_crosscheck=None,
        final_state=state if keep_state else None,
        norm_checks=checks,
    )
    if crosscheck:
        gv = gap(p, x, max_witness_bits=max_witness_bits, workers=workers)
        report.gap_crosscheck = gv
        check_amplitude_law(report, gv.gap)
    return report


def expected_amplitude(variant: str, m: int, gap_value: int) -> ExactScalar:
    if variant == "sqrt2":
        # -gap / (sqrt2 * 2**(m-1)) = -gap * sqrt2 / 2**m
        return RootTwo(0, -gap_value, m)
    if variant == "rational":
        return rational_constant() * Fraction(12, 25) ** (m + 1) * gap_value
    raise ValueError(f"unknown variant {variant!r}")


def check_amplitude_law(report: ConstructionReport, gap_value: int) -> None:
    """Raise :class:`InvariantViolation` unless amplitude and probability match the gap exactly."""
    m, amp = report.m, report.accepting_amplitude
    if report.variant == "sqrt2":
        if amp * RootTwo(0, 1 << (m - 1)) != -gap_value:
            raise InvariantViolation(f"sqrt2 amplitude {amp} does not match gap {gap_value}")
        if report.acceptance_probability != Fraction(gap_value**2, 1 << report.p):
            raise InvariantViolation("sqrt2 probability is not gap^2 / 2^p")
    else:
        c = rational_constant()
        if amp != expected_amplitude("rational", m, gap_value):
            raise InvariantViolation(f"rational amplitude {amp} does not match gap {gap_value}")
        if report.acceptance_probability != c * c * Fraction(12, 25) ** (2 * m + 2) * gap_value**2:
            raise InvariantViolation("rational probability does not match the gap")
    if bool(amp) != bool(gap_value):
        raise InvariantViolation("amplitude is zero but gap is not, or vice versa")


def run_sqrt2(
    p: WitnessPredicate,
    x: str = "",
    *,
    crosscheck: bool = True,
    max_witness_bits: int = DEFAULT_MAX_WITNESS_BITS,
    max_terms: int = DEFAULT_MAX_TERMS,
    workers: int = 1,
    keep_state: bool = True,
    on_layer: Callable[[int, Layer, SparseState], None] | None = None,
) -> ConstructionReport:
    return _run(
        "sqrt2", p, x, RootTwo(1),
        crosscheck=crosscheck, max_witness_bits=max_witness_bits, max_terms=max_terms,
        workers=workers, keep_state=keep_state, on_layer=on_layer,
    )


def run_rational(
    p: WitnessPredicate,
    x: str = "",
    *,
    crosscheck: bool = True,
    max_witness_bits: int = DEFAULT_MAX_WITNESS_BITS,
    max_terms: int = DEFAULT_MAX_TERMS,
    workers: int = 1,
    keep_state: bool = True,
    on_layer: Callable[[int, Layer, SparseState], None] | None = None,
) -> ConstructionReport:
    return _run(
        "rational", p, x, Fraction(1),
        crosscheck=crosscheck, max_witness_bits=max_witness_bits, max_terms=max_terms,
        workers=workers, keep_state=keep_state, on_layer=on_layer,
    )


def run(variant: str, p: WitnessPredicate, x: str = "", **kwargs) -> ConstructionReport:
    if variant == "sqrt2":
        return run_sqrt2(p, x, **kwargs)
    if variant == "rational":
        return run_rational(p, x, **kwargs)
    raise ValueError(f"unknown variant {variant!r}")


def construction_circuit(variant: str, p: WitnessPredicate, x: str = "") -> FieldCircuit:
    """The same circuit as a :class:`FieldCircuit` (over Q(sqrt2) or Q)."""
    _check_run_args(p, x, DEFAULT_MAX_WITNESS_BITS)
    m = p.m
    layers = build_layers(variant, m, _predicate_function(p, x))
    if variant == "sqrt2":
        spec, conv = SQRT2, lambda v: v.as_field(SQRT2)
        width = m + 1
    else:
        spec, conv = RATIONALS, lambda v: FieldElement.from_rational(RATIONALS, v)
        width = m + 2
    return FieldCircuit(
        width=width,
        spec=spec,
        layers=tuple(convert_layers(layers, conv)),
        initial="0" * width,
        accepting=accepting_basis(variant, m),
    )


def construction_circuit_text(variant: str, predicate_path: str, m: int, x: str = "") -> str:
    """Circuit-file text for a construction whose oracle reads ``predicate_path``."""
    ys = ",".join(str(j) for j in range(m))
    xpart = f" x {x}" if x else ""
    lines = []
    if variant == "sqrt2":
        h = "[0,1/2]"
        hm = "[0,-1/2]"
        lines += ["field sqrt2", f"qubits {m + 1}", f"init {'0' * (m + 1)}"]
        lines += [f"g1 {j} {h} {h} {h} {hm}" for j in range(m)]
        lines.append(f"oracle xor {m} {predicate_path} controls {ys}{xpart}")
        lines += [f"g1 {j} {h} {h} {h} {hm}" for j in range(m + 1)]
    elif variant == "rational":
        a = "3/5 -4/5 4/5 3/5"
        b = "4/5 -3/5 3/5 4/5"
        perms = " ".join(",".join(map(str, p)) for p in FLAG_PERMUTATIONS)
        lines += ["field rational", f"qubits {m + 2}", f"init {'0' * (m + 2)}"]
        lines += [f"g1 {j} {a}" for j in range(m)]
        lines.append(f"oracle perm {m},{m + 1} {predicate_path} {perms} controls {ys}{xpart}")
        lines += [f"g1 {m} {a}", f"g1 {m + 1} {b}"]
        lines += [f"g1 {j} {a}" for j in range(m)]
    else:
        raise ValueError(f"unknown variant {variant!r}")
    lines.append(f"accept {accepting_basis(variant, m)}")
    return "\n".join(lines) + "\n"
