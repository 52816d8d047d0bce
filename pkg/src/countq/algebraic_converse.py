"""Exact simulation of circuits with algebraic amplitudes and the zero test.

A :class:`FieldCircuit` has every gate entry in one number field ``F``.  After
``t`` layers each amplitude is ``(1/d**t) * sum_i f_i * beta_i`` with integer
``f_i``, where ``d`` is the lcm of all coefficient denominators appearing in
the gates.  The acceptance probability is real, so it can be rewritten over a
basis ``alpha_1..alpha_s`` of the real subfield as
``(1/D**t) * sum_j g_j * alpha_j`` with ``D = d**2`` and integer ``g_j``.
Because the ``alpha_j`` are linearly independent over Q, the probability is
zero iff every ``g_j`` is zero: that is the decision :func:`qap_decide` makes.
"""

from __future__ import annotations

import math
import os
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .errors import InvariantViolation, ParseError
from .exact_scalar import FieldElement, NumberFieldSpec, norm_sq, parse_field, parse_scalar
from .gap_oracle import WitnessPredicate, eval_predicate, parse_predicate
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
    is_unitary,
    total_norm_sq,
)


def convert_layers(layers: Iterable[Layer], fn: Callable) -> list[Layer]:
    """Map every gate entry through ``fn``; oracles pass through unchanged."""
    out: list[Layer] = []
    for layer in layers:
        if isinstance(layer, Gate1):
            out.append(Gate1(tuple(tuple(fn(v) for v in row) for row in layer.matrix), layer.target, layer.label))
        elif isinstance(layer, Gate2):
            out.append(
                Gate2(tuple(tuple(fn(v) for v in row) for row in layer.matrix), layer.first, layer.second, layer.label)
            )
        else:
            out.append(layer)
    return out


@dataclass(frozen=True)
class FieldCircuit:
    width: int
    spec: NumberFieldSpec
    layers: tuple[Layer, ...]
    initial: str
    accepting: str

    def __post_init__(self) -> None:
        if self.width < 1:
            raise ValueError("a circuit needs at least one qubit")
        if len(self.initial) != self.width or any(c not in "01" for c in self.initial):
            raise ValueError(f"initial state {self.initial!r} is not a {self.width}-bit string")
        if len(self.accepting) != self.width or any(c not in "01-" for c in self.accepting):
            raise ValueError(f"accepting pattern {self.accepting!r} is not {self.width} symbols of 0/1/-")
        for layer in self.layers:
            if any(not 0 <= q < self.width for q in layer.qubits):
                raise ValueError(f"layer {layer.label or layer!r} touches a qubit outside 0..{self.width - 1}")
            if isinstance(layer, (Gate1, Gate2)):
                for row in layer.matrix:
                    for v in row:
                        if not isinstance(v, FieldElement) or v.spec != self.spec:
                            raise ValueError(f"gate entry {v!r} is not an element of {self.spec.name!r}")


@dataclass(frozen=True)
class AmplitudeDecomposition:
    """``amplitude = (1/d**t) * sum_i coefficients[i] * beta_i``."""

    d: int
    t: int
    coefficients: tuple[int, ...]

    def value(self, spec: NumberFieldSpec) -> FieldElement:
        scale = Fraction(1, self.d**self.t)
        return FieldElement(spec, [c * scale for c in self.coefficients])


@dataclass(frozen=True)
class ProbabilityDecomposition:
    """``probability = (1/D**t) * sum_j coefficients[j] * basis[j]`` over real ``basis``."""

    D: int
    t: int
    basis: tuple[FieldElement, ...]
    coefficients: tuple[int, ...]

    def value(self) -> FieldElement:
        spec = self.basis[0].spec
        acc = FieldElement.zero(spec)
        for c, alpha in zip(self.coefficients, self.basis):
            acc = acc + alpha * c
        return acc * Fraction(1, self.D**self.t)

    @property
    def is_zero(self) -> bool:
        return not any(self.coefficients)


def simulate_field(
    c: FieldCircuit,
    *,
    workers: int = 1,
    max_terms: int = DEFAULT_MAX_TERMS,
    check_norm: bool = True,
    on_layer: Callable[[int, Layer, SparseState], None] | None = None,
) -> SparseState:
    state = initial_state(c.width, c.initial, FieldElement.one(c.spec))
    for i, layer in enumerate(c.layers):
        state = apply_layer(state, layer, workers=workers, max_terms=max_terms)
        if check_norm:
            norm = total_norm_sq(state)
            if norm != 1:
                raise InvariantViolation(f"norm {norm} != 1 after layer {i}")
        if on_layer is not None:
            on_layer(i, layer, state)
    return state


def circuit_denominator(c: FieldCircuit) -> int:
    """lcm of every coefficient denominator among the gate entries."""
    d = 1
    for layer in c.layers:
        if isinstance(layer, (Gate1, Gate2)):
            for row in layer.matrix:
                for v in row:
                    for q in v.coeffs:
                        d = math.lcm(d, q.denominator)
    return d


def _integerize(coeffs: Sequence[Fraction], scale: int, what: str) -> tuple[int, ...]:
    out = []
    for q in coeffs:
        v = q * scale
        if v.denominator != 1:
            raise ValueError(
                f"{what} is not integral after scaling; the field needs an integral "
                "minimal polynomial and conjugation"
            )
        out.append(v.numerator)
    return tuple(out)


def amplitude_decomposition(
    c: FieldCircuit, bits: str, state: SparseState | None = None
) -> AmplitudeDecomposition:
    if len(bits) != c.width or any(ch not in "01" for ch in bits):
        raise ValueError(f"basis state {bits!r} is out of range for width {c.width}")
    if state is None:
        state = simulate_field(c)
    d, t = circuit_denominator(c), len(c.layers)
    amp = amplitude_of(state, bits)
    return AmplitudeDecomposition(d, t, _integerize(amp.coeffs, d**t, "amplitude"))


def acceptance_probability(c: FieldCircuit, state: SparseState | None = None) -> FieldElement:
    if state is None:
        state = simulate_field(c)
    prob = FieldElement.zero(c.spec)
    for _, amp in accepting_terms(state, c.accepting):
        prob = prob + norm_sq(amp)
    if prob.conjugate() != prob:
        raise ValueError("acceptance probability is not real; the conjugation map is inconsistent")
    return prob


def _solve_rational(rows: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction] | None:
    """Solve ``sum_j x_j * rows[j] = rhs`` exactly; None when inconsistent."""
    ncols = len(rows)
    # augmented matrix: one equation per coordinate
    mat = [[rows[j][i] for j in range(ncols)] + [rhs[i]] for i in range(len(rhs))]
    pivots: list[int] = []
    r = 0
    for col in range(ncols):
        pr = next((i for i in range(r, len(mat)) if mat[i][col]), None)
        if pr is None:
            continue
        mat[r], mat[pr] = mat[pr], mat[r]
        inv = 1 / mat[r][col]
        mat[r] = [v * inv for v in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][col]:
                f = mat[i][col]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[r])]
        pivots.append(col)
        r += 1
    if any(row[-1] for row in mat[r:]):
        return None
    x = [Fraction(0)] * ncols
    for i, col in enumerate(pivots):
        x[col] = mat[i][-1]
    return x


def real_basis(spec: NumberFieldSpec) -> tuple[tuple[FieldElement, ...], tuple[tuple[int, ...], ...]]:
    """A Q-basis ``alpha`` of the real subfield and integers ``c`` with ``Re(beta_i) = sum_j c[i][j] alpha_j``.

    Real fields use the field basis itself.  Otherwise the real parts
    ``(beta_i + conj beta_i)/2`` are reduced to an independent subset by exact
    elimination and each chosen ``alpha_j`` is divided by the lcm of the
    denominators in its column so every ``c[i][j]`` is an integer.
    """
    k = spec.degree
    basis = [FieldElement(spec, [Fraction(int(i == j)) for j in range(k)]) for i in range(k)]
    if spec.is_real:
        return tuple(basis), tuple(tuple(int(i == j) for j in range(k)) for i in range(k))
    reals = [(b + b.conjugate()) * Fraction(1, 2) for b in basis]
    chosen: list[FieldElement] = []
    for r in reals:
        if not r:
            continue
        if not chosen or _solve_rational([list(a.coeffs) for a in chosen], list(r.coeffs)) is None:
            chosen.append(r)
    coeffs = [_solve_rational([list(a.coeffs) for a in chosen], list(r.coeffs)) for r in reals]
    s = len(chosen)
    scales = [1] * s
    for row in coeffs:
        for j, q in enumerate(row):
            scales[j] = math.lcm(scales[j], q.denominator)
    alphas = tuple(a * Fraction(1, sc) for a, sc in zip(chosen, scales))
    ints = tuple(tuple(int(q * sc) for q, sc in zip(row, scales)) for row in coeffs)
    return alphas, ints


def probability_decomposition(c: FieldCircuit, state: SparseState | None = None) -> ProbabilityDecomposition:
    if state is None:
        state = simulate_field(c)
    prob = acceptance_probability(c, state)
    d, t = circuit_denominator(c), len(c.layers)
    big_d = d * d
    h = _integerize(prob.coeffs, big_d**t, "probability")
    alphas, cmat = real_basis(c.spec)
    f = tuple(sum(cmat[i][j] * h[i] for i in range(len(h))) for j in range(len(alphas)))
    dec = ProbabilityDecomposition(big_d, t, alphas, f)
    if dec.value() != prob:
        raise InvariantViolation("probability decomposition does not reconstruct the probability")
    return dec


def qap_decide(c: FieldCircuit, state: SparseState | None = None) -> bool:
    """True iff the circuit accepts with probability exactly nonzero."""
    if state is None:
        state = simulate_field(c)
    dec = probability_decomposition(c, state)
    decision = not dec.is_zero
    if decision != bool(acceptance_probability(c, state)):
        raise InvariantViolation("coefficient zero test disagrees with the direct zero test")
    return decision


def verify_unitary(g) -> bool:
    """Exact ``U U^dagger = I`` for a gate or a bare square matrix."""
    matrix = g.matrix if isinstance(g, (Gate1, Gate2)) else g
    return is_unitary(matrix)


# --------------------------------------------------------------------------
# circuit files
# --------------------------------------------------------------------------

_TOKEN = re.compile(r"\[[^\]]*\]|\([^)]*\)\s*/\s*2\^\d+|\S+")


def _qubit_list(text: str, lineno: int) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.split(","))
    except ValueError:
        raise ParseError(f"bad qubit list {text!r}", lineno) from None


def _predicate_fn(pred: WitnessPredicate, x: str, ncontrols: int, lineno: int) -> Callable[[int], int]:
    if pred.m != ncontrols:
        raise ParseError(f"predicate has {pred.m} witness bits but the oracle has {ncontrols} controls", lineno)
    if len(x) != pred.n:
        raise ParseError(f"predicate needs {pred.n} input bits, got x={x!r}", lineno)

    def fn(pattern: int) -> int:
        return eval_predicate(pred, x, format(pattern, f"0{ncontrols}b") if ncontrols else "")

    return fn


def parse_circuit(
    text: str,
    base_dir: str | os.PathLike | None = None,
    load_predicate: Callable[[str], WitnessPredicate] | None = None,
) -> FieldCircuit:
    """Parse a circuit file.

    Directives, one per line (``#`` starts a comment)::

        field sqrt2 | field rational | field poly c0 .. ck root lo hi [conj ...]
        qubits <w>
        init <bits>
        g1 <q> <m00> <m01> <m10> <m11>            # matrix[out][in], row-major
        g2 <q1> <q2> <16 entries>
        oracle xor <targets> <predicate-file> [controls <list>] [x <bits>]
        oracle perm <targets> <predicate-file> <perm0> <perm1> [controls <list>] [x <bits>]
        accept <pattern of 0/1/->

    Qubit lists are comma-separated.  Without ``controls`` an oracle reads
    the first ``m`` qubits that are not targets.
    """
    if load_predicate is None:
        def load_predicate(path: str) -> WitnessPredicate:
            full = os.path.join(base_dir, path) if base_dir is not None else path
            with open(full) as fh:
                return parse_predicate(fh.read())

    spec: NumberFieldSpec | None = None
    width: int | None = None
    init: str | None = None
    accept: str | None = None
    layers: list[Layer] = []

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head = line.split(None, 1)[0]
        if head == "field":
            if spec is not None:
                raise ParseError("duplicate field line", lineno)
            spec = parse_field(line, lineno)
            continue
        if spec is None:
            raise ParseError("the field line must come first", lineno)
        toks = _TOKEN.findall(line)
        if head == "qubits":
            if len(toks) != 2 or not toks[1].isdigit() or int(toks[1]) < 1:
                raise ParseError("expected 'qubits <w>'", lineno)
            width = int(toks[1])
        elif head == "init":
            if len(toks) != 2:
                raise ParseError("expected 'init <bits>'", lineno)
            init = toks[1]
        elif head == "accept":
            if len(toks) != 2:
                raise ParseError("expected 'accept <pattern>'", lineno)
            accept = toks[1]
        elif head in ("g1", "g2"):
            if width is None:
                raise ParseError("'qubits' must precede gates", lineno)
            nq, size = (1, 2) if head == "g1" else (2, 4)
            if len(toks) != 1 + nq + size * size:
                raise ParseError(f"{head} needs {nq} qubit(s) and {size * size} entries", lineno)
            try:
                qs = [int(t) for t in toks[1 : 1 + nq]]
            except ValueError:
                raise ParseError("bad qubit index", lineno) from None
            vals = [parse_scalar(t, spec, lineno) for t in toks[1 + nq :]]
            matrix = tuple(tuple(vals[r * size : (r + 1) * size]) for r in range(size))
            label = f"{head}@{lineno}"
            if head == "g1":
                layers.append(Gate1(matrix, qs[0], label))
            else:
                if qs[0] == qs[1]:
                    raise ParseError("g2 needs two distinct qubits", lineno)
                layers.append(Gate2(matrix, qs[0], qs[1], label))
        elif head == "oracle":
            if width is None:
                raise ParseError("'qubits' must precede oracles", lineno)
            layers.append(_parse_oracle(toks, width, lineno, load_predicate))
        else:
            raise ParseError(f"unknown directive {head!r}", lineno)

    if spec is None:
        raise ParseError("missing field line")
    if width is None:
        raise ParseError("missing 'qubits' line")
    if init is None:
        init = "0" * width
    if accept is None:
        raise ParseError("missing 'accept' line")
    try:
        return FieldCircuit(width, spec, tuple(layers), init, accept)
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def _parse_oracle(toks: list[str], width: int, lineno: int, load_predicate) -> Layer:
    if len(toks) < 4 or toks[1] not in ("xor", "perm"):
        raise ParseError("expected 'oracle xor|perm <targets> <predicate-file> ...'", lineno)
    form = toks[1]
    targets = _qubit_list(toks[2], lineno)
    try:
        pred = load_predicate(toks[3])
    except OSError as exc:
        raise ParseError(f"cannot read predicate file {toks[3]!r}: {exc.strerror}", lineno) from None
    rest = toks[4:]
    perms: tuple[tuple[int, ...], ...] = ()
    if form == "perm":
        if len(rest) < 2:
            raise ParseError("perm oracle needs two permutations", lineno)
        perms = (_qubit_list(rest[0], lineno), _qubit_list(rest[1], lineno))
        rest = rest[2:]
    controls: tuple[int, ...] | None = None
    x = ""
    while rest:
        key = rest[0]
        if len(rest) < 2 or key not in ("controls", "x"):
            raise ParseError(f"unexpected oracle option {key!r}", lineno)
        if key == "controls":
            controls = _qubit_list(rest[1], lineno)
        else:
            x = rest[1]
        rest = rest[2:]
    if controls is None:
        free = [q for q in range(width) if q not in targets]
        controls = tuple(free[: pred.m])
    if form == "xor" and len(targets) != 1:
        raise ParseError("xor oracle takes a single target qubit", lineno)
    fn = _predicate_fn(pred, x, len(controls), lineno)
    label = f"oracle {form}@{lineno}"
    try:
        if form == "xor":
            return XorOracle(controls, targets, fn, label)
        return PermOracle(controls, targets, fn, perms, label)
    except ValueError as exc:
        raise ParseError(str(exc), lineno) from None
