"""Exact sparse state vectors and the gates that act on them.

A :class:`SparseState` maps basis states to nonzero exact amplitudes.
Basis states are stored as integers in which qubit 0 is the most significant
bit, so sorting keys numerically sorts the printed kets ``|q0 q1 ...>``
lexicographically.  Gate matrices act on column vectors: ``matrix[out][in]``
is the amplitude sent from input pattern ``in`` to output pattern ``out``.

Every operation returns a new state; states are never mutated after
construction.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterator, Mapping, Sequence, Union

from .errors import NonUnitaryError, ResourceLimitError
from .exact_scalar import ExactScalar, format_scalar, to_decimal

DEFAULT_MAX_TERMS = 1 << 26

Matrix = tuple[tuple[ExactScalar, ...], ...]


def bits_to_key(bits: str) -> int:
    if any(c not in "01" for c in bits):
        raise ValueError(f"not a bit-string: {bits!r}")
    return int(bits, 2) if bits else 0


def key_to_bits(key: int, width: int) -> str:
    return format(key, f"0{width}b") if width else ""


def is_unitary(matrix: Sequence[Sequence[ExactScalar]]) -> bool:
    """Exact check of ``U U^dagger = I``."""
    n = len(matrix)
    if any(len(row) != n for row in matrix):
        return False
    for i in range(n):
        for j in range(i, n):
            acc = None
            for a, b in zip(matrix[i], matrix[j]):
                term = a * b.conjugate()
                acc = term if acc is None else acc + term
            if acc != (1 if i == j else 0):
                return False
    return True


def _freeze(matrix: Sequence[Sequence[ExactScalar]], size: int) -> Matrix:
    m = tuple(tuple(row) for row in matrix)
    if len(m) != size or any(len(row) != size for row in m):
        raise ValueError(f"expected a {size}x{size} matrix")
    return m


@dataclass(frozen=True)
class Gate1:
    matrix: Matrix
    target: int
    label: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "matrix", _freeze(self.matrix, 2))
        if not is_unitary(self.matrix):
            raise NonUnitaryError(f"gate {self.label or '?'} on qubit {self.target} is not unitary")

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.target,)


@dataclass(frozen=True)
class Gate2:
    """Two-qubit gate; ``first`` is the high bit of the 2-bit pattern index."""

    matrix: Matrix
    first: int
    second: int
    label: str = ""

    def __post_init__(self) -> None:
        if self.first == self.second:
            raise ValueError("two-qubit gate needs distinct qubits")
        object.__setattr__(self, "matrix", _freeze(self.matrix, 4))
        if not is_unitary(self.matrix):
            raise NonUnitaryError(f"gate {self.label or '?'} on qubits {self.first},{self.second} is not unitary")

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.first, self.second)


@dataclass(frozen=True)
class XorOracle:
    """``targets ^= f(controls)``; patterns are integers, first qubit most significant."""

    controls: tuple[int, ...]
    targets: tuple[int, ...]
    function: Callable[[int], int] = field(compare=False)
    label: str = ""

    def __post_init__(self) -> None:
        _check_disjoint(self.controls, self.targets)

    @property
    def qubits(self) -> tuple[int, ...]:
        return self.controls + self.targets


@dataclass(frozen=True)
class PermOracle:
    """Permute target patterns by ``permutations[selector(controls)]``.

    ``permutations[s][t]`` is the image of target pattern ``t``.
    """

    controls: tuple[int, ...]
    targets: tuple[int, ...]
    selector: Callable[[int], int] = field(compare=False)
    permutations: tuple[tuple[int, ...], ...] = ()
    label: str = ""

    def __post_init__(self) -> None:
        _check_disjoint(self.controls, self.targets)
        size = 1 << len(self.targets)
        perms = tuple(tuple(p) for p in self.permutations)
        for p in perms:
            if sorted(p) != list(range(size)):
                raise ValueError(f"{p} is not a permutation of {size} target patterns")
        object.__setattr__(self, "permutations", perms)

    @property
    def qubits(self) -> tuple[int, ...]:
        return self.controls + self.targets


def _check_disjoint(controls: Sequence[int], targets: Sequence[int]) -> None:
    if set(controls) & set(targets):
        raise ValueError("oracle control and target qubits overlap")
    if len(set(controls)) != len(controls) or len(set(targets)) != len(targets):
        raise ValueError("oracle qubits repeat")


ReversibleOracle = Union[XorOracle, PermOracle]
Layer = Union[Gate1, Gate2, XorOracle, PermOracle]


class SparseState:
    """Finite superposition with only nonzero amplitudes stored."""

    __slots__ = ("width", "_terms", "_zero")

    def __init__(self, width: int, terms: Mapping[int, ExactScalar], zero: ExactScalar):
        self.width = width
        self._terms = {k: v for k, v in terms.items() if v}
        self._zero = zero

    @property
    def zero(self) -> ExactScalar:
        return self._zero

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self) -> Iterator[tuple[str, ExactScalar]]:
        for k in sorted(self._terms):
            yield key_to_bits(k, self.width), self._terms[k]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SparseState):
            return NotImplemented
        return self.width == other.width and self._terms == other._terms

    def keyed_items(self) -> list[tuple[int, ExactScalar]]:
        return sorted(self._terms.items())

    def as_dict(self) -> dict[str, ExactScalar]:
        return dict(iter(self))

    def map_amplitudes(self, fn: Callable[[ExactScalar], ExactScalar]) -> "SparseState":
        """Same support, each amplitude converted (e.g. to another representation)."""
        return SparseState(self.width, {k: fn(v) for k, v in self._terms.items()}, fn(self._zero))

    def dump(self, digits: int = 10) -> str:
        lines = []
        for bits, amp in self:
            lines.append(f"|{bits}⟩ = {format_scalar(amp)} (≈ {to_decimal(amp, digits)})")
        return "\n".join(lines)

    def __repr__(self) -> str:
        inner = ", ".join(f"|{b}⟩: {format_scalar(a)}" for b, a in self)
        return f"SparseState({self.width}, {{{inner}}})"


def initial_state(width: int, bits: str, one: ExactScalar) -> SparseState:
    """Basis state ``|bits>`` with amplitude ``one``."""
    if len(bits) != width:
        raise ValueError(f"bit-string {bits!r} does not have width {width}")
    return SparseState(width, {bits_to_key(bits): one}, one - one)


def _check_qubits(s: SparseState, qubits: Sequence[int]) -> None:
    for q in qubits:
        if not 0 <= q < s.width:
            raise ValueError(f"qubit {q} out of range for width {s.width}")


def _chunks(items: list, workers: int) -> list[list]:
    if workers <= 1 or len(items) < 2 * workers:
        return [items]
    size = -(-len(items) // workers)
    return [items[i : i + size] for i in range(0, len(items), size)]


def _run_partitioned(
    s: SparseState,
    kernel: Callable[[list[tuple[int, ExactScalar]]], dict[int, ExactScalar]],
    workers: int,
    max_terms: int,
) -> SparseState:
    items = list(s._terms.items())
    parts = _chunks(items, workers)
    if len(parts) == 1:
        out = kernel(items)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(kernel, parts))
        out = partials[0]
        for part in partials[1:]:
            for k, v in part.items():
                out[k] = out[k] + v if k in out else v
    if len(out) > max_terms:
        raise ResourceLimitError(f"state has {len(out)} terms, above the cap of {max_terms}")
    return SparseState(s.width, out, s._zero)


def apply_gate1(
    s: SparseState, g: Gate1, *, workers: int = 1, max_terms: int = DEFAULT_MAX_TERMS
) -> SparseState:
    _check_qubits(s, g.qubits)
    mask = 1 << (s.width - 1 - g.target)
    (m00, m01), (m10, m11) = g.matrix
    # (amplitude to |0>, amplitude to |1>) for input bit 0 and input bit 1
    from0 = (m00 if m00 else None, m10 if m10 else None)
    from1 = (m01 if m01 else None, m11 if m11 else None)
    inv = ~mask

    def kernel(items):
        out: dict[int, ExactScalar] = {}
        get = out.get
        for key, amp in items:
            base = key & inv
            c0, c1 = from1 if key & mask else from0
            if c0 is not None:
                v = c0 * amp
                prev = get(base)
                out[base] = v if prev is None else prev + v
            if c1 is not None:
                k1 = base | mask
                v = c1 * amp
                prev = get(k1)
                out[k1] = v if prev is None else prev + v
        return out

    return _run_partitioned(s, kernel, workers, max_terms)


def apply_gate2(
    s: SparseState, g: Gate2, *, workers: int = 1, max_terms: int = DEFAULT_MAX_TERMS
) -> SparseState:
    _check_qubits(s, g.qubits)
    hi = 1 << (s.width - 1 - g.first)
    lo = 1 << (s.width - 1 - g.second)
    spread = (0, lo, hi, hi | lo)
    clear = ~(hi | lo)
    cols = []
    for c in range(4):
        cols.append(tuple((spread[r], g.matrix[r][c]) for r in range(4) if g.matrix[r][c]))

    def kernel(items):
        out: dict[int, ExactScalar] = {}
        get = out.get
        for key, amp in items:
            pattern = (2 if key & hi else 0) | (1 if key & lo else 0)
            base = key & clear
            for offset, coef in cols[pattern]:
                k = base | offset
                v = coef * amp
                prev = get(k)
                out[k] = v if prev is None else prev + v
        return out

    return _run_partitioned(s, kernel, workers, max_terms)


def _extract(key: int, masks: Sequence[int]) -> int:
    v = 0
    for m in masks:
        v = (v << 1) | (1 if key & m else 0)
    return v


def _deposit(pattern: int, masks: Sequence[int]) -> int:
    v = 0
    n = len(masks)
    for i, m in enumerate(masks):
        if (pattern >> (n - 1 - i)) & 1:
            v |= m
    return v


def apply_oracle(s: SparseState, o: ReversibleOracle) -> SparseState:
    """Carry every amplitude along the oracle's bijection on basis states."""
    _check_qubits(s, o.qubits)
    w = s.width
    cmasks = [1 << (w - 1 - q) for q in o.controls]
    tmasks = [1 << (w - 1 - q) for q in o.targets]
    out: dict[int, ExactScalar] = {}
    if isinstance(o, XorOracle):
        cache: dict[int, int] = {}
        for key, amp in s._terms.items():
            c = _extract(key, cmasks)
            flip = cache.get(c)
            if flip is None:
                flip = cache[c] = _deposit(o.function(c), tmasks)
            out[key ^ flip] = amp
    else:
        tclear = ~sum(tmasks)
        deposits = [_deposit(t, tmasks) for t in range(1 << len(tmasks))]
        for key, amp in s._terms.items():
            sel = o.selector(_extract(key, cmasks))
            t = _extract(key, tmasks)
            out[(key & tclear) | deposits[o.permutations[sel][t]]] = amp
    return SparseState(w, out, s._zero)


def apply_layer(
    s: SparseState, layer: Layer, *, workers: int = 1, max_terms: int = DEFAULT_MAX_TERMS
) -> SparseState:
    if isinstance(layer, Gate1):
        return apply_gate1(s, layer, workers=workers, max_terms=max_terms)
    if isinstance(layer, Gate2):
        return apply_gate2(s, layer, workers=workers, max_terms=max_terms)
    if isinstance(layer, (XorOracle, PermOracle)):
        return apply_oracle(s, layer)
    raise TypeError(f"not a layer: {layer!r}")


def amplitude_of(s: SparseState, bits: str) -> ExactScalar:
    if len(bits) != s.width:
        raise ValueError(f"basis state {bits!r} does not have width {s.width}")
    return s._terms.get(bits_to_key(bits), s._zero)


def total_norm_sq(s: SparseState) -> ExactScalar:
    acc = s._zero
    for amp in s._terms.values():
        acc = acc + amp * amp.conjugate()
    return acc


def matches(pattern: str, bits: str) -> bool:
    """``pattern`` uses ``0``/``1`` literally and ``-`` as a wildcard."""
    return len(pattern) == len(bits) and all(p == "-" or p == b for p, b in zip(pattern, bits))


def accepting_terms(s: SparseState, pattern: str) -> list[tuple[str, ExactScalar]]:
    if len(pattern) != s.width or any(c not in "01-" for c in pattern):
        raise ValueError(f"bad accepting pattern {pattern!r} for width {s.width}")
    fixed = int(pattern.replace("-", "0"), 2) if pattern else 0
    care = int("".join("0" if c == "-" else "1" for c in pattern), 2) if pattern else 0
    return [(key_to_bits(k, s.width), a) for k, a in sorted(s._terms.items()) if k & care == fixed]
