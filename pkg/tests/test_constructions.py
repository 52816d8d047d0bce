import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from countq.algebraic_converse import simulate_field, verify_unitary
from countq.constructions import (
    A_MATRIX,
    B_MATRIX,
    FLAG_PERMUTATIONS,
    HADAMARD,
    T_PRINTED,
    accepting_basis,
    construction_circuit,
    describe_circuit,
    kron,
    rational_constant,
    run,
    run_rational,
    run_sqrt2,
    transpose,
)
from countq.errors import ResourceLimitError
from countq.exact_scalar import SQRT2, RootTwo
from countq.gap_oracle import and_predicate, constant_predicate, eval_predicate, gap, parse_predicate, random_predicate

XOR2 = parse_predicate("inputs 0 2\ngate g1 XOR y0 y1\noutput g1\n")
F = Fraction


# --------------------------------------------------------------------------
# dense reference: full 2^w x 2^w matrices built from Kronecker products
# --------------------------------------------------------------------------


def _identity(n, one, zero):
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def _on_qubit(g, q, width, one, zero):
    mats = [_identity(2, one, zero)] * width
    mats[q] = g
    out = mats[0]
    for m in mats[1:]:
        out = kron(out, m)
    return out


def _matvec(mat, vec, zero):
    return [sum((mat[r][c] * vec[c] for c in range(len(vec))), zero) for r in range(len(mat))]


def dense_final_state(variant, p, x):
    m = p.m
    width = m + 1 if variant == "sqrt2" else m + 2
    one, zero = (RootTwo(1), RootTwo()) if variant == "sqrt2" else (F(1), F(0))
    n = 1 << width
    vec = [one] + [zero] * (n - 1)
    value = {y: eval_predicate(p, x, format(y, f"0{m}b")) for y in range(1 << m)}
    perm = [[zero] * n for _ in range(n)]
    for src in range(n):
        if variant == "sqrt2":
            y, b = src >> 1, src & 1
            dst = (y << 1) | (b ^ value[y])
        else:
            y, flags = src >> 2, src & 3
            dst = (y << 2) | FLAG_PERMUTATIONS[value[y]][flags]
        perm[dst][src] = one
    if variant == "sqrt2":
        steps = [_on_qubit(HADAMARD, j, width, one, zero) for j in range(m)]
        steps.append(perm)
        steps += [_on_qubit(HADAMARD, j, width, one, zero) for j in range(m + 1)]
    else:
        steps = [_on_qubit(A_MATRIX, j, width, one, zero) for j in range(m)]
        steps += [perm, _on_qubit(A_MATRIX, m, width, one, zero), _on_qubit(B_MATRIX, m + 1, width, one, zero)]
        steps += [_on_qubit(A_MATRIX, j, width, one, zero) for j in range(m)]
    for mat in steps:
        vec = _matvec(mat, vec, zero)
    return {format(i, f"0{width}b"): a for i, a in enumerate(vec) if a}


def random_case(seed, max_m):
    rng = random.Random(seed)
    n, m = rng.randint(0, 3), rng.randint(1, max_m)
    p = random_predicate(rng, n, m, rng.randint(1, 3 * m + 2))
    return p, "".join(rng.choice("01") for _ in range(n))


# --------------------------------------------------------------------------


class TestSqrt2:
    def test_constant_m1(self):
        rep = run_sqrt2(constant_predicate(0, 1))
        assert rep.accepting_basis == "01"
        assert rep.accepting_amplitude == RootTwo(0, -1, 1)
        assert rep.acceptance_probability == F(1, 2)
        assert rep.p == 1

    def test_constant_m2(self):
        assert run_sqrt2(constant_predicate(3, 2), "101").accepting_amplitude == RootTwo(0, -1, 1)

    def test_xor_cancels(self):
        rep = run_sqrt2(XOR2)
        assert not rep.accepting_amplitude
        assert rep.acceptance_probability == 0

    def test_and_m3(self):
        rep = run_sqrt2(and_predicate(0, 3))
        # gap -3: amplitude 3 / (sqrt2 * 4) = 3*sqrt2/8
        assert rep.accepting_amplitude == RootTwo(0, 3, 3)
        assert rep.acceptance_probability == F(9, 32)

    @pytest.mark.parametrize("seed", range(8))
    def test_matches_dense_reference(self, seed):
        p, x = random_case(seed, 4)
        rep = run_sqrt2(p, x)
        assert rep.final_state.as_dict() == dense_final_state("sqrt2", p, x)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 2**32))
    def test_amplitude_law(self, seed):
        p, x = random_case(seed, 9)
        g = gap(p, x).gap
        rep = run_sqrt2(p, x, crosscheck=False)
        assert rep.accepting_amplitude * RootTwo(0, 1 << (p.m - 1)) == -g
        assert rep.acceptance_probability == F(g * g, 1 << (2 * p.m - 1))
        assert bool(rep.accepting_amplitude) == bool(g)

    def test_unique_accepting_term(self):
        rep = run_sqrt2(and_predicate(1, 4), "1")
        acc = [b for b, _ in rep.final_state if b.endswith("1") and b[:-1] == "0000"]
        assert acc == ["00001"]


class TestRational:
    def test_constant_is_two(self):
        assert rational_constant() == 2

    def test_constant_m1(self):
        rep = run_rational(constant_predicate(0, 1))
        assert rep.accepting_basis == "101"
        assert rep.accepting_amplitude == 2 * F(12, 25) ** 2
        assert rep.p == 4

    def test_xor_cancels(self):
        assert run_rational(XOR2).accepting_amplitude == 0

    @pytest.mark.parametrize("seed", range(8))
    def test_matches_dense_reference(self, seed):
        p, x = random_case(seed, 3)
        assert run_rational(p, x).final_state.as_dict() == dense_final_state("rational", p, x)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2**32))
    def test_amplitude_law(self, seed):
        p, x = random_case(seed, 7)
        g = gap(p, x).gap
        rep = run_rational(p, x, crosscheck=False)
        assert rep.accepting_amplitude == 2 * F(12, 25) ** (p.m + 1) * g
        assert rep.acceptance_probability == 4 * F(12, 25) ** (2 * p.m + 2) * g * g


class TestMatrices:
    def test_t_orthogonal(self):
        prod = [[sum(T_PRINTED[i][k] * T_PRINTED[j][k] for k in range(4)) for j in range(4)] for i in range(4)]
        assert prod == [[int(i == j) for j in range(4)] for i in range(4)]

    def test_t_is_transposed_a_kron_b(self):
        assert transpose(T_PRINTED) == kron(A_MATRIX, B_MATRIX)

    def test_gates_unitary(self):
        for g in (A_MATRIX, B_MATRIX, T_PRINTED, HADAMARD):
            assert verify_unitary(g)


class TestPlumbing:
    def test_describe(self):
        assert describe_circuit("sqrt2", 2) == "H y0; H y1; oracle b^=P(x,y); H y0; H y1; H b; accept |00,1⟩"
        assert describe_circuit("rational", 1) == "A y0; oracle flag; A b0; B b1; A y0; accept |1,01⟩"

    def test_bad_variant(self):
        with pytest.raises(ValueError):
            describe_circuit("qutrit", 1)
        with pytest.raises(ValueError):
            run("qutrit", XOR2)

    def test_caps(self):
        with pytest.raises(ResourceLimitError):
            run_sqrt2(constant_predicate(0, 6), max_witness_bits=5)
        with pytest.raises(ValueError):
            run_sqrt2(constant_predicate(0, 0))
        with pytest.raises(ValueError):
            run_sqrt2(constant_predicate(2, 1), "1")

    def test_norm_checked_every_layer(self):
        rep = run_rational(and_predicate(0, 3))
        assert rep.norm_checks == 3 + 1 + 2 + 3

    def test_crosscheck_optional(self):
        assert run_sqrt2(XOR2, crosscheck=False).gap_crosscheck is None
        assert run_sqrt2(XOR2).gap_crosscheck.gap == 0

    def test_trace_callback(self):
        seen = []
        run_sqrt2(XOR2, on_layer=lambda i, layer, s: seen.append((i, layer.label, len(s))))
        assert [label for _, label, _ in seen] == ["H y0", "H y1", "oracle b^=P(x,y)", "H y0", "H y1", "H b"]

    @pytest.mark.parametrize("variant", ["sqrt2", "rational"])
    def test_workers_identical(self, variant):
        p, x = random_case(99, 8)
        a = run(variant, p, x)
        b = run(variant, p, x, workers=4)
        assert list(a.final_state) == list(b.final_state)

    def test_field_circuit_matches(self):
        for m, n in itertools.product((1, 2, 3), (0, 2)):
            p = random_predicate(random.Random(10 * m + n), n, m, 2 * m + 2)
            x = "1" * n
            rep = run_sqrt2(p, x)
            state = simulate_field(construction_circuit("sqrt2", p, x))
            assert state.as_dict() == {b: a.as_field(SQRT2) for b, a in rep.final_state}
            rat = run_rational(p, x)
            state = simulate_field(construction_circuit("rational", p, x))
            assert {b: a.coeffs[0] for b, a in state} == rat.final_state.as_dict()

    def test_accepting_basis(self):
        assert accepting_basis("sqrt2", 3) == "0001"
        assert accepting_basis("rational", 2) == "1101"
