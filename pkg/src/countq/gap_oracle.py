"""Witness predicates and their gaps.

A :class:`WitnessPredicate` is a boolean circuit ``P(x, y)`` over ``n`` input
bits and ``m`` witness bits.  Its gap on input ``x`` is

    gap = (A - R) / 2,    A = #{y : P(x, y) = 1},   R = 2**m - A,

computed by exhaustive enumeration.  Enumeration is bitsliced: each wire
carries a ``2**m``-bit Python integer whose bit ``w`` is the wire's value on
witness number ``w``, so one pass over the gate list evaluates every
witness at once.

Witness numbering: ``y0`` is the most significant bit of ``w``, matching the
register layout used by the quantum constructions.
"""

from __future__ import annotations

import itertools
import random
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence, Union

from .errors import ParseError, ResourceLimitError

KINDS = {"AND": 2, "OR": 2, "XOR": 2, "NOT": 1, "CONST0": 0, "CONST1": 0}
DEFAULT_MAX_WITNESS_BITS = 24

_INPUT_RE = re.compile(r"^([xy])(\d+)$")
_ID_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_.]*$")

Bits = Union[str, Sequence[int]]


class Gate(NamedTuple):
    id: str
    kind: str
    args: tuple[str, ...]


@dataclass(frozen=True)
class WitnessPredicate:
    """Boolean circuit over inputs ``x0..x{n-1}`` and witness bits ``y0..y{m-1}``.

    ``gates`` is in evaluation order: every operand is an input bit or an
    earlier gate.  ``output`` names a gate or an input bit.
    """

    n: int
    m: int
    gates: tuple[Gate, ...]
    output: str

    def __post_init__(self) -> None:
        if self.n < 0 or self.m < 0:
            raise ValueError("bit counts must be non-negative")
        seen: set[str] = set()
        for g in self.gates:
            if g.kind not in KINDS:
                raise ValueError(f"unknown gate kind {g.kind!r}")
            if len(g.args) != KINDS[g.kind]:
                raise ValueError(f"gate {g.id}: {g.kind} takes {KINDS[g.kind]} operands")
            if g.id in seen or _INPUT_RE.match(g.id):
                raise ValueError(f"bad or duplicate gate id {g.id!r}")
            for a in g.args:
                if not self._is_input(a) and a not in seen:
                    raise ValueError(f"gate {g.id}: operand {a!r} is not an input or earlier gate")
            seen.add(g.id)
        if not self._is_input(self.output) and self.output not in seen:
            raise ValueError(f"output {self.output!r} is undefined")

    def _is_input(self, ref: str) -> bool:
        mt = _INPUT_RE.match(ref)
        if not mt:
            return False
        limit = self.n if mt.group(1) == "x" else self.m
        return int(mt.group(2)) < limit


@dataclass(frozen=True)
class GapValue:
    accept_count: int
    reject_count: int

    @property
    def m(self) -> int:
        return (self.accept_count + self.reject_count).bit_length() - 1

    @property
    def difference(self) -> int:
        """``A - R``, before the halving."""
        return self.accept_count - self.reject_count

    @property
    def gap(self) -> int:
        d = self.difference
        if d % 2:
            raise ValueError("gap is undefined for m = 0 (A - R is odd)")
        return d // 2

    def __str__(self) -> str:
        return f"A={self.accept_count} R={self.reject_count} gap={self.gap}"


def _bits(v: Bits, width: int, what: str) -> tuple[int, ...]:
    if isinstance(v, str):
        if any(c not in "01" for c in v):
            raise ValueError(f"{what} must be a bit-string, got {v!r}")
        out = tuple(int(c) for c in v)
    else:
        out = tuple(int(b) for b in v)
        if any(b not in (0, 1) for b in out):
            raise ValueError(f"{what} must contain only 0/1")
    if len(out) != width:
        raise ValueError(f"{what} has length {len(out)}, expected {width}")
    return out


def eval_predicate(p: WitnessPredicate, x: Bits, y: Bits) -> int:
    """Evaluate ``P(x, y)`` one gate at a time."""
    xs = _bits(x, p.n, "x")
    ys = _bits(y, p.m, "y")
    val: dict[str, int] = {f"x{i}": b for i, b in enumerate(xs)}
    val.update((f"y{j}", b) for j, b in enumerate(ys))
    for g in p.gates:
        a = [val[r] for r in g.args]
        if g.kind == "AND":
            v = a[0] & a[1]
        elif g.kind == "OR":
            v = a[0] | a[1]
        elif g.kind == "XOR":
            v = a[0] ^ a[1]
        elif g.kind == "NOT":
            v = 1 - a[0]
        elif g.kind == "CONST1":
            v = 1
        else:
            v = 0
        val[g.id] = v
    return val[p.output]


def _witness_pattern(pos: int, nbits: int) -> int:
    """Bitmask over ``2**nbits`` witnesses with bit ``w`` set iff bit ``pos`` of ``w`` is set."""
    n = 1 << nbits
    half = 1 << pos
    period = half << 1
    unit = ((1 << half) - 1) << half
    reps = ((1 << n) - 1) // ((1 << period) - 1)
    return unit * reps


def truth_table(p: WitnessPredicate, x: Bits, fixed_prefix: Sequence[int] = ()) -> int:
    """Bitmask of accepting witnesses.

    With ``fixed_prefix`` the leading witness bits are pinned and the mask
    ranges over the remaining ``m - len(fixed_prefix)`` bits only.
    """
    xs = _bits(x, p.n, "x")
    t = len(fixed_prefix)
    free = p.m - t
    full = (1 << (1 << free)) - 1
    val: dict[str, int] = {f"x{i}": (full if b else 0) for i, b in enumerate(xs)}
    for j in range(p.m):
        if j < t:
            val[f"y{j}"] = full if fixed_prefix[j] else 0
        else:
            val[f"y{j}"] = _witness_pattern(p.m - 1 - j, free)
    for g in p.gates:
        a = [val[r] for r in g.args]
        if g.kind == "AND":
            v = a[0] & a[1]
        elif g.kind == "OR":
            v = a[0] | a[1]
        elif g.kind == "XOR":
            v = a[0] ^ a[1]
        elif g.kind == "NOT":
            v = full ^ a[0]
        elif g.kind == "CONST1":
            v = full
        else:
            v = 0
        val[g.id] = v
    return val[p.output]


def gap(
    p: WitnessPredicate,
    x: Bits = "",
    *,
    max_witness_bits: int = DEFAULT_MAX_WITNESS_BITS,
    workers: int = 1,
) -> GapValue:
    """Exact accept/reject counts over all ``2**m`` witnesses."""
    if p.m > max_witness_bits:
        raise ResourceLimitError(f"m = {p.m} witness bits exceeds the cap of {max_witness_bits}")
    if p.m == 0:
        raise ValueError("gap needs at least one witness bit")
    _bits(x, p.n, "x")
    split = 0
    if workers > 1:
        split = min(p.m, max(1, (workers - 1).bit_length()))
    prefixes = list(itertools.product((0, 1), repeat=split))
    if workers > 1 and len(prefixes) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            counts = list(pool.map(lambda pre: truth_table(p, x, pre).bit_count(), prefixes))
    else:
        counts = [truth_table(p, x, pre).bit_count() for pre in prefixes]
    accept = sum(counts)
    return GapValue(accept, (1 << p.m) - accept)


def negate(p: WitnessPredicate) -> WitnessPredicate:
    gid = _fresh_id(p, "neg")
    return WitnessPredicate(p.n, p.m, p.gates + (Gate(gid, "NOT", (p.output,)),), gid)


def _fresh_id(p: WitnessPredicate, stem: str) -> str:
    ids = {g.id for g in p.gates}
    i = 0
    while f"{stem}{i}" in ids:
        i += 1
    return f"{stem}{i}"


# --------------------------------------------------------------------------
# circuit builder and predicate families
# --------------------------------------------------------------------------


class CircuitBuilder:
    """Incremental construction with structural sharing of identical gates."""

    def __init__(self, n: int, m: int, prefix: str = "g"):
        self.n, self.m = n, m
        self.prefix = prefix
        self.gates: list[Gate] = []
        self._memo: dict[tuple[str, tuple[str, ...]], str] = {}

    def _gate(self, kind: str, *args: str) -> str:
        if kind in ("AND", "OR", "XOR"):
            args = tuple(sorted(args))
        key = (kind, args)
        if key not in self._memo:
            gid = f"{self.prefix}{len(self.gates)}"
            self.gates.append(Gate(gid, kind, args))
            self._memo[key] = gid
        return self._memo[key]

    def const(self, v: int) -> str:
        return self._gate("CONST1" if v else "CONST0")

    def not_(self, a: str) -> str:
        return self._gate("NOT", a)

    def and_(self, a: str, b: str) -> str:
        return self._gate("AND", a, b)

    def or_(self, a: str, b: str) -> str:
        return self._gate("OR", a, b)

    def xor(self, a: str, b: str) -> str:
        return self._gate("XOR", a, b)

    def reduce(self, kind: str, refs: Sequence[str]) -> str:
        """Balanced tree of a binary gate kind; empty AND is 1, empty OR/XOR is 0."""
        refs = list(refs)
        if not refs:
            return self.const(1 if kind == "AND" else 0)
        while len(refs) > 1:
            nxt = [self._gate(kind, refs[i], refs[i + 1]) for i in range(0, len(refs) - 1, 2)]
            if len(refs) % 2:
                nxt.append(refs[-1])
            refs = nxt
        return refs[0]

    def build(self, output: str) -> WitnessPredicate:
        return WitnessPredicate(self.n, self.m, tuple(self.gates), output)


def _ys(m: int) -> list[str]:
    return [f"y{j}" for j in range(m)]


def constant_predicate(n: int, m: int, value: int = 1) -> WitnessPredicate:
    b = CircuitBuilder(n, m)
    return b.build(b.const(value))


def and_predicate(n: int, m: int) -> WitnessPredicate:
    b = CircuitBuilder(n, m)
    return b.build(b.reduce("AND", _ys(m)))


def or_predicate(n: int, m: int) -> WitnessPredicate:
    b = CircuitBuilder(n, m)
    return b.build(b.reduce("OR", _ys(m)))


def parity_predicate(n: int, m: int, include_inputs: bool = False) -> WitnessPredicate:
    b = CircuitBuilder(n, m)
    refs = _ys(m) + ([f"x{i}" for i in range(n)] if include_inputs else [])
    return b.build(b.reduce("XOR", refs))


def xor2_predicate(n: int, m: int) -> WitnessPredicate:
    """``y0 XOR y1`` (needs m >= 2)."""
    b = CircuitBuilder(n, m)
    return b.build(b.xor("y0", "y1"))


def majority_predicate(n: int, m: int) -> WitnessPredicate:
    """1 iff more than half of the witness bits are set (sorting-free threshold circuit)."""
    b = CircuitBuilder(n, m)
    # count[c] = "at least c ones among the bits seen so far"
    need = m // 2 + 1
    count = [b.const(1)] + [b.const(0)] * need
    for y in _ys(m):
        nxt = [count[0]]
        for c in range(1, need + 1):
            nxt.append(b.or_(count[c], b.and_(count[c - 1], y)))
        count = nxt
    return b.build(count[need])


def input_gated_predicate(n: int, m: int) -> WitnessPredicate:
    """``(x0 AND y0) OR (NOT x0 AND parity(y))``: the gap depends on x."""
    b = CircuitBuilder(n, m)
    par = b.reduce("XOR", _ys(m))
    if n == 0:
        return b.build(par)
    left = b.and_("x0", "y0")
    right = b.and_(b.not_("x0"), par)
    return b.build(b.or_(left, right))


def random_predicate(rng: random.Random, n: int, m: int, size: int = 12) -> WitnessPredicate:
    refs = [f"x{i}" for i in range(n)] + _ys(m)
    gates: list[Gate] = []
    for i in range(size):
        kind = rng.choice(("AND", "OR", "XOR", "NOT", "AND", "OR", "XOR"))
        args = tuple(rng.choice(refs) for _ in range(KINDS[kind]))
        gid = f"r{i}"
        gates.append(Gate(gid, kind, args))
        refs.append(gid)
    return WitnessPredicate(n, m, tuple(gates), refs[-1])


FAMILIES = {
    "const0": lambda n, m: constant_predicate(n, m, 0),
    "const1": lambda n, m: constant_predicate(n, m, 1),
    "and": and_predicate,
    "or": or_predicate,
    "xor": lambda n, m: xor2_predicate(n, m) if m >= 2 else parity_predicate(n, m),
    "parity": parity_predicate,
    "majority": majority_predicate,
    "gated": input_gated_predicate,
}


# --------------------------------------------------------------------------
# graphs and the non-isomorphism predicate
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Graph:
    vertex_count: int
    edges: frozenset[tuple[int, int]]

    def __post_init__(self) -> None:
        if self.vertex_count < 1:
            raise ValueError("a graph needs at least one vertex")
        for u, v in self.edges:
            if not (0 <= u < v < self.vertex_count):
                raise ValueError(f"bad edge ({u}, {v})")

    @classmethod
    def from_edges(cls, vertex_count: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        norm = set()
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            e = (min(u, v), max(u, v))
            if e in norm:
                raise ValueError(f"duplicate edge {e}")
            norm.add(e)
        return cls(vertex_count, frozenset(norm))

    def relabel(self, perm: Sequence[int]) -> "Graph":
        return Graph.from_edges(self.vertex_count, ((perm[u], perm[v]) for u, v in self.edges))


def _maps_onto(perm: Sequence[int], src: Graph, dst: Graph) -> bool:
    return {tuple(sorted((perm[u], perm[v]))) for u, v in src.edges} == dst.edges


def count_isomorphisms(g1: Graph, g2: Graph) -> int:
    """Number of vertex permutations carrying ``g1`` onto ``g2`` (brute force)."""
    if g1.vertex_count != g2.vertex_count or len(g1.edges) != len(g2.edges):
        return 0
    return sum(
        1 for perm in itertools.permutations(range(g1.vertex_count)) if _maps_onto(perm, g1, g2)
    )


def count_automorphisms(g: Graph) -> int:
    return count_isomorphisms(g, g)


def are_isomorphic(g1: Graph, g2: Graph) -> bool:
    return count_isomorphisms(g1, g2) > 0


def gni_code_bits(v: int) -> int:
    """Witness bits per vertex index in the permutation encoding."""
    return (v - 1).bit_length()


def build_gni_predicate(g1: Graph, g2: Graph) -> WitnessPredicate:
    """Predicate whose gap is ``#iso(g1 -> g2) - #aut(g1)``.

    Witness layout: ``y0`` is a selector ``s``; then one index of
    ``ceil(log2 v)`` bits per vertex (most significant first), read as the
    image ``pi(u)``.  Accept iff ``s = 0`` and ``pi`` is a valid permutation
    with ``pi(g1) = g2``, or ``s = 1`` and ``pi`` is *not* a valid
    automorphism of ``g1``.  The gap is zero exactly when the graphs are
    isomorphic.  Unequal vertex counts give the constant-1 predicate on one
    witness bit (gap 1).
    """
    v = g1.vertex_count
    if g2.vertex_count != v:
        return constant_predicate(0, 1, 1)
    w = gni_code_bits(v)
    m = 1 + v * w
    b = CircuitBuilder(0, m)

    def code_bit(u: int, i: int) -> str:
        return f"y{1 + u * w + i}"

    eq: dict[tuple[int, int], str] = {}
    for u in range(v):
        for a in range(v):
            lits = []
            for i in range(w):
                bit = (a >> (w - 1 - i)) & 1
                lits.append(code_bit(u, i) if bit else b.not_(code_bit(u, i)))
            eq[u, a] = b.reduce("AND", lits)

    in_range = [b.reduce("OR", [eq[u, a] for a in range(v)]) for u in range(v)]
    distinct = [
        b.not_(b.and_(eq[u, a], eq[t, a])) for u in range(v) for t in range(u + 1, v) for a in range(v)
    ]
    valid = b.reduce("AND", in_range + distinct)

    def maps(src: Graph, dst: Graph) -> str:
        if len(src.edges) != len(dst.edges):
            return b.const(0)
        clauses = []
        for u, t in sorted(src.edges):
            options = []
            for a, c in sorted(dst.edges):
                options.append(b.and_(eq[u, a], eq[t, c]))
                options.append(b.and_(eq[u, c], eq[t, a]))
            clauses.append(b.reduce("OR", options))
        return b.reduce("AND", clauses)

    iso_ok = b.and_(valid, maps(g1, g2))
    aut_ok = b.and_(valid, maps(g1, g1))
    s = "y0"
    out = b.or_(b.and_(b.not_(s), iso_ok), b.and_(s, b.not_(aut_ok)))
    return b.build(out)


# --------------------------------------------------------------------------
# text formats
# --------------------------------------------------------------------------


def _strip(line: str) -> str:
    return line.split("#", 1)[0].strip()


def parse_predicate(text: str) -> WitnessPredicate:
    """Parse ``inputs n m`` / ``gate id KIND a [b]`` / ``output id`` lines.

    Gates may appear in any order; they are sorted topologically and cycles
    or undefined references are reported with the offending line.
    """
    header: tuple[int, int] | None = None
    output: tuple[str, int] | None = None
    defs: dict[str, tuple[Gate, int]] = {}
    order: list[str] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip(raw)
        if not line:
            continue
        toks = line.split()
        head = toks[0]
        if head == "inputs":
            if header is not None:
                raise ParseError("duplicate 'inputs' line", lineno)
            if len(toks) != 3 or not all(t.isdigit() for t in toks[1:]):
                raise ParseError("expected 'inputs <n> <m>'", lineno)
            header = (int(toks[1]), int(toks[2]))
        elif head == "gate":
            if len(toks) < 3:
                raise ParseError("expected 'gate <id> <KIND> [args]'", lineno)
            gid, kind, args = toks[1], toks[2].upper(), tuple(toks[3:])
            if kind not in KINDS:
                raise ParseError(f"unknown gate kind {toks[2]!r}", lineno)
            if len(args) != KINDS[kind]:
                raise ParseError(f"{kind} takes {KINDS[kind]} operand(s), got {len(args)}", lineno)
            if not _ID_RE.match(gid) or _INPUT_RE.match(gid):
                raise ParseError(f"invalid gate id {gid!r}", lineno)
            if gid in defs:
                raise ParseError(f"gate {gid!r} defined twice", lineno)
            defs[gid] = (Gate(gid, kind, args), lineno)
            order.append(gid)
        elif head == "output":
            if len(toks) != 2:
                raise ParseError("expected 'output <id>'", lineno)
            if output is not None:
                raise ParseError("duplicate 'output' line", lineno)
            output = (toks[1], lineno)
        else:
            raise ParseError(f"unknown directive {head!r}", lineno)
    if header is None:
        raise ParseError("missing 'inputs <n> <m>' line")
    if output is None:
        raise ParseError("missing 'output <id>' line")
    n, m = header

    def is_input(ref: str) -> bool:
        mt = _INPUT_RE.match(ref)
        return bool(mt) and int(mt.group(2)) < (n if mt.group(1) == "x" else m)

    for gid in order:
        gate, lineno = defs[gid]
        for a in gate.args:
            if not is_input(a) and a not in defs:
                raise ParseError(f"gate {gid!r} references undefined {a!r}", lineno)
    if not is_input(output[0]) and output[0] not in defs:
        raise ParseError(f"output references undefined {output[0]!r}", output[1])

    # depth-first topological sort in declaration order
    state: dict[str, int] = {}
    sorted_gates: list[Gate] = []
    for root in order:
        if root in state:
            continue
        stack: list[tuple[str, int]] = [(root, 0)]
        state[root] = 1
        while stack:
            gid, i = stack.pop()
            gate, lineno = defs[gid]
            deps = [a for a in gate.args if a in defs]
            if i < len(deps):
                stack.append((gid, i + 1))
                dep = deps[i]
                st = state.get(dep)
                if st == 1:
                    raise ParseError(f"cycle through gate {dep!r}", lineno)
                if st is None:
                    state[dep] = 1
                    stack.append((dep, 0))
            else:
                state[gid] = 2
                sorted_gates.append(gate)
    return WitnessPredicate(n, m, tuple(sorted_gates), output[0])


def format_predicate(p: WitnessPredicate) -> str:
    lines = [f"inputs {p.n} {p.m}"]
    lines += [" ".join(("gate", g.id, g.kind, *g.args)) for g in p.gates]
    lines.append(f"output {p.output}")
    return "\n".join(lines) + "\n"


def parse_graph(text: str) -> Graph:
    lines = [(i, _strip(raw)) for i, raw in enumerate(text.splitlines(), 1)]
    lines = [(i, ln) for i, ln in lines if ln]
    if not lines:
        raise ParseError("empty graph file")
    lineno, first = lines[0]
    if not first.isdigit() or int(first) < 1:
        raise ParseError(f"expected a positive vertex count, got {first!r}", lineno)
    v = int(first)
    edges: set[tuple[int, int]] = set()
    for lineno, ln in lines[1:]:
        toks = ln.split()
        if len(toks) != 2 or not all(t.isdigit() for t in toks):
            raise ParseError(f"expected 'u v', got {ln!r}", lineno)
        a, c = int(toks[0]), int(toks[1])
        if a >= v or c >= v:
            raise ParseError(f"vertex out of range in {ln!r}", lineno)
        if a == c:
            raise ParseError(f"self-loop at vertex {a}", lineno)
        e = (min(a, c), max(a, c))
        if e in edges:
            raise ParseError(f"duplicate edge {a} {c}", lineno)
        edges.add(e)
    return Graph(v, frozenset(edges))


def format_graph(g: Graph) -> str:
    return "\n".join([str(g.vertex_count), *(f"{u} {v}" for u, v in sorted(g.edges))]) + "\n"
