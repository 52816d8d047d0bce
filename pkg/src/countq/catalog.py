"""Reusable workloads: predicate suites, small-graph catalogs, random field circuits."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .algebraic_converse import FieldCircuit
from .exact_scalar import RATIONALS, SQRT2, FieldElement, NumberFieldSpec
from .gap_oracle import FAMILIES, Graph, WitnessPredicate, eval_predicate, random_predicate
from .state_vector import Gate1, Gate2, Layer, PermOracle, XorOracle

SQRT3 = NumberFieldSpec.quadratic(3)


@dataclass(frozen=True)
class SuiteCase:
    name: str
    predicate: WitnessPredicate
    x: str


def predicate_suite(m_values: Sequence[int], random_per_m: int, seed: int = 0) -> list[SuiteCase]:
    """Every structured family at every ``m``, plus random circuits; ``n`` cycles through 0..4."""
    rng = random.Random(seed)
    cases: list[SuiteCase] = []
    for m in m_values:
        for i, (fam, build) in enumerate(FAMILIES.items()):
            n = (m + i) % 5
            x = "".join(rng.choice("01") for _ in range(n))
            cases.append(SuiteCase(f"{fam}/m={m}/n={n}", build(n, m), x))
        for r in range(random_per_m):
            n = rng.randrange(5)
            x = "".join(rng.choice("01") for _ in range(n))
            size = rng.randrange(m + 2, 2 * m + 8)
            cases.append(SuiteCase(f"random{r}/m={m}/n={n}", random_predicate(rng, n, m, size), x))
    return cases


# --------------------------------------------------------------------------
# graphs
# --------------------------------------------------------------------------


def canonical_form(g: Graph) -> tuple[tuple[int, int], ...]:
    return min(
        tuple(sorted(tuple(sorted((p[u], p[v]))) for u, v in g.edges))
        for p in itertools.permutations(range(g.vertex_count))
    )


def all_graphs(v: int) -> list[Graph]:
    pairs = list(itertools.combinations(range(v), 2))
    return [
        Graph(v, frozenset(e for e, keep in zip(pairs, mask) if keep))
        for mask in itertools.product((0, 1), repeat=len(pairs))
    ]


def isomorphism_classes(v: int) -> list[Graph]:
    """One representative per isomorphism class, by brute-force canonical forms."""
    reps: dict[tuple, Graph] = {}
    for g in all_graphs(v):
        reps.setdefault(canonical_form(g), g)
    return list(reps.values())


def gni_pairs(v: int = 4, seed: int = 0) -> list[tuple[Graph, Graph]]:
    """All ordered pairs of class representatives plus one relabeled copy per class."""
    rng = random.Random(seed)
    reps = isomorphism_classes(v)
    pairs = [(a, b) for a in reps for b in reps]
    for g in reps:
        perm = list(range(v))
        rng.shuffle(perm)
        pairs.append((g, g.relabel(perm)))
    return pairs


# --------------------------------------------------------------------------
# gate libraries over Q, Q(sqrt2), Q(sqrt3)
# --------------------------------------------------------------------------

_PYTHAGOREAN = ((3, 4, 5), (5, 12, 13), (8, 15, 17))


def _el(spec: NumberFieldSpec, *coeffs) -> FieldElement:
    v = [Fraction(c) for c in coeffs] + [Fraction(0)] * (spec.degree - len(coeffs))
    return FieldElement(spec, v)


def single_qubit_library(spec: NumberFieldSpec) -> list[tuple[str, tuple]]:
    """Named exact unitaries with entries in ``spec`` (``beta`` is the field generator)."""
    z, o = _el(spec, 0), _el(spec, 1)
    lib: list[tuple[str, tuple]] = [
        ("X", ((z, o), (o, z))),
        ("Z", ((o, z), (z, -o))),
    ]
    for a, b, c in _PYTHAGOREAN:
        ca, cb = _el(spec, Fraction(a, c)), _el(spec, Fraction(b, c))
        lib.append((f"R{a}/{c}", ((ca, -cb), (cb, ca))))
    if spec.degree == 2 and spec.minimal_polynomial == (Fraction(-2), Fraction(0), Fraction(1)):
        h = _el(spec, 0, Fraction(1, 2))
        lib.append(("H", ((h, h), (h, -h))))
        lib.append(("Rpi/4", ((h, -h), (h, h))))
    if spec.degree == 2 and spec.minimal_polynomial == (Fraction(-3), Fraction(0), Fraction(1)):
        c30, s30 = _el(spec, 0, Fraction(1, 2)), _el(spec, Fraction(1, 2))
        lib.append(("Rpi/6", ((c30, -s30), (s30, c30))))
        lib.append(("Rpi/3", ((s30, -c30), (c30, s30))))
        lib.append(("Hpi/3", ((s30, c30), (c30, -s30))))
    return lib


def _controlled(spec: NumberFieldSpec, u) -> tuple:
    z, o = _el(spec, 0), _el(spec, 1)
    return (
        (o, z, z, z),
        (z, o, z, z),
        (z, z, u[0][0], u[0][1]),
        (z, z, u[1][0], u[1][1]),
    )


def _kron(a, b) -> tuple:
    return tuple(
        tuple(a[i][j] * b[k][l] for j in range(2) for l in range(2)) for i in range(2) for k in range(2)
    )


def _dagger(matrix) -> tuple:
    n = len(matrix)
    return tuple(tuple(matrix[j][i].conjugate() for j in range(n)) for i in range(n))


def _inverse_layer(layer: Layer) -> Layer:
    if isinstance(layer, Gate1):
        return Gate1(_dagger(layer.matrix), layer.target, layer.label + "^-1")
    if isinstance(layer, Gate2):
        return Gate2(_dagger(layer.matrix), layer.first, layer.second, layer.label + "^-1")
    if isinstance(layer, PermOracle):
        inv = []
        for p in layer.permutations:
            q = [0] * len(p)
            for i, v in enumerate(p):
                q[v] = i
            inv.append(tuple(q))
        return PermOracle(layer.controls, layer.targets, layer.selector, tuple(inv), layer.label + "^-1")
    return layer  # XOR oracles are involutions


def random_layer(rng: random.Random, spec: NumberFieldSpec, width: int) -> Layer:
    lib = single_qubit_library(spec)
    roll = rng.random()
    if width >= 2 and roll < 0.25:
        q1, q2 = rng.sample(range(width), 2)
        kind = rng.randrange(3)
        if kind == 0:
            name, u = rng.choice(lib)
            return Gate2(_controlled(spec, u), q1, q2, f"C{name}")
        if kind == 1:
            (n1, u1), (n2, u2) = rng.choice(lib), rng.choice(lib)
            return Gate2(_kron(u1, u2), q1, q2, f"{n1}x{n2}")
        _, x = lib[0]
        return Gate2(_controlled(spec, x), q1, q2, "CNOT")
    if width >= 2 and roll < 0.35:
        target = rng.randrange(width)
        others = [q for q in range(width) if q != target]
        controls = tuple(rng.sample(others, rng.randint(1, min(3, len(others)))))
        pred = random_predicate(rng, 0, len(controls), rng.randint(1, 4))
        nc = len(controls)
        fn = lambda c, pred=pred, nc=nc: eval_predicate(pred, "", format(c, f"0{nc}b"))
        return XorOracle(controls, (target,), fn, "oracle")
    name, u = rng.choice(lib)
    return Gate1(u, rng.randrange(width), name)


def random_field_circuit(
    rng: random.Random, spec: NumberFieldSpec, max_width: int = 6, max_layers: int = 12
) -> FieldCircuit:
    """A random exact circuit; about a third are mirrored (U then U^-1) to force cancellation."""
    width = rng.randint(1, max_width)
    if rng.random() < 0.35:
        half = [random_layer(rng, spec, width) for _ in range(rng.randint(1, max_layers // 2))]
        layers = half + [_inverse_layer(g) for g in reversed(half)]
    else:
        layers = [random_layer(rng, spec, width) for _ in range(rng.randint(0, max_layers))]
    init = "".join(rng.choice("01") for _ in range(width))
    accept = "".join(rng.choice("01--") for _ in range(width))
    return FieldCircuit(width, spec, tuple(layers), init, accept)


def deep_rotation_circuit(depth: int = 30, spec: NumberFieldSpec = SQRT2) -> FieldCircuit:
    """One qubit: a pi/4 rotation, then ``depth`` copies of the 3/5-4/5 rotation; accept ``|1>``.

    The accepting amplitude is ``sin(pi/4 + depth*theta)`` with ``cos theta = 3/5``.
    It is irrational and nonzero, with denominator ``2 * 5**depth``.
    """
    lib = dict(single_qubit_library(spec))
    layers = [Gate1(lib["Rpi/4"], 0, "Rpi/4")]
    layers += [Gate1(lib["R3/5"], 0, "R3/5") for _ in range(depth)]
    return FieldCircuit(1, spec, tuple(layers), "0", "1")


FIELDS = {"sqrt2": SQRT2, "sqrt3": SQRT3, "rational": RATIONALS}


def random_circuit_suite(count: int, seed: int = 0, max_width: int = 6, max_layers: int = 12) -> Iterator[FieldCircuit]:
    rng = random.Random(seed)
    specs = list(FIELDS.values())
    for i in range(count):
        yield random_field_circuit(rng, specs[i % len(specs)], max_width, max_layers)
