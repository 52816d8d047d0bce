from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from countq.errors import IncompatibleScalarsError, ParseError, RootIsolationError, TranscendentalAmplitudeError
from countq.exact_scalar import (
    RATIONALS,
    SQRT2,
    FieldElement,
    NumberFieldSpec,
    RootTwo,
    add,
    conj,
    count_real_roots,
    format_scalar,
    is_zero,
    mul,
    norm_sq,
    parse_field,
    parse_scalar,
    to_decimal,
)

SQRT3 = NumberFieldSpec.quadratic(3)
GAUSS = NumberFieldSpec.power_basis([1, 0, 1], conjugation=[[1, 0], [0, -1]], name="gauss")
# Q(sqrt2) again, but given by structure constants on the basis (1, sqrt2)
SQRT2_TABLE = NumberFieldSpec.from_structure_constants([[[1, 0], [0, 1]], [[0, 1], [2, 0]]])

small_ints = st.integers(-50, 50)
root_twos = st.builds(RootTwo, small_ints, small_ints, st.integers(0, 6))
fractions = st.fractions(min_value=-20, max_value=20, max_denominator=30)


def field_elements(spec):
    return st.lists(fractions, min_size=spec.degree, max_size=spec.degree).map(lambda c: FieldElement(spec, c))


class TestRootTwo:
    def test_additive_inverse(self):
        z = add(RootTwo(1, 1, 0), RootTwo(-1, -1, 0))
        assert (z.a, z.b, z.k) == (0, 0, 0)

    def test_half_root_plus_itself(self):
        s = RootTwo(0, 1, 1) + RootTwo(0, 1, 1)
        assert (s.a, s.b, s.k) == (0, 1, 0)

    def test_difference_of_squares(self):
        assert mul(RootTwo(1, 1), RootTwo(1, -1)) == RootTwo(-1)

    def test_inverse_root_squared(self):
        p = RootTwo(0, 1, 1) * RootTwo(0, 1, 1)
        assert (p.a, p.b, p.k) == (1, 0, 1)

    def test_canonical_reduction(self):
        r = RootTwo(4, 6, 3)
        assert (r.a, r.b, r.k) == (2, 3, 2)
        assert RootTwo(0, 0, 9).k == 0

    def test_conj_is_identity(self):
        r = RootTwo(3, -5, 2)
        assert conj(r) == r

    def test_norm_sq_minus_inverse_root(self):
        assert norm_sq(RootTwo(0, -1, 1)) == RootTwo(1, 0, 1)

    def test_tiny_is_not_zero(self):
        assert is_zero(RootTwo(0, 0, 0))
        assert not is_zero(RootTwo(1, 0, 200))

    def test_mixed_with_int(self):
        assert RootTwo(0, 1) * RootTwo(0, 1) == 2
        assert 1 - RootTwo(1) == 0

    def test_format(self):
        assert str(RootTwo(0, -1, 1)) == "(0 - 1*sqrt2)/2^1"
        assert parse_scalar("(0 - 1*sqrt2)/2^1") == RootTwo(0, -1, 1)

    @given(root_twos, root_twos, root_twos)
    def test_ring_axioms(self, x, y, z):
        assert (x + y) + z == x + (y + z)
        assert x * y == y * x
        assert (x * y) * z == x * (y * z)
        assert x * (y + z) == x * y + x * z

    @given(root_twos, root_twos)
    def test_canonical_unique(self, x, y):
        assert is_zero(x - y) == ((x.a, x.b, x.k) == (y.a, y.b, y.k))

    @given(root_twos)
    def test_field_image_is_a_homomorphism(self, x):
        fx = x.as_field(SQRT2)
        assert (x * x).as_field(SQRT2) == fx * fx
        assert (x + x).as_field(SQRT2) == fx + fx


class TestFieldElement:
    def test_coordinatewise_add(self):
        s = add(FieldElement(SQRT2, [1, 0]), FieldElement(SQRT2, [0, 1]))
        assert s.coeffs == (1, 1)

    def test_minimal_polynomial_reduction(self):
        beta = FieldElement(SQRT2, [0, 1])
        assert mul(beta, beta).coeffs == (2, 0)

    def test_incompatible_specs(self):
        with pytest.raises(IncompatibleScalarsError):
            add(FieldElement(SQRT2, [1, 0]), FieldElement(SQRT3, [1, 0]))
        with pytest.raises(IncompatibleScalarsError):
            mul(RootTwo(1), FieldElement(SQRT2, [1, 0]))

    def test_gaussian_conjugate(self):
        assert conj(FieldElement(GAUSS, [0, 1])).coeffs == (0, -1)
        i = FieldElement(GAUSS, [0, 1])
        assert norm_sq(i) == FieldElement.one(GAUSS)

    def test_norm_sq_values(self):
        assert norm_sq(Fraction(3, 5)) == Fraction(9, 25)
        assert is_zero(norm_sq(FieldElement.zero(SQRT3)))

    def test_zero_iff_all_coeffs_zero(self):
        assert is_zero(FieldElement(SQRT3, [0, 0]))
        assert not is_zero(FieldElement(SQRT3, [0, Fraction(1, 10**40)]))

    def test_structure_constants_consistent(self):
        assert SQRT2_TABLE.structure_is_consistent()
        with pytest.raises(ValueError):
            # beta_1 * beta_1 = beta_0 + beta_1 but beta_1 * beta_0 = 0: no unit
            NumberFieldSpec.from_structure_constants([[[1, 0], [0, 0]], [[0, 0], [1, 1]]])

    def test_conjugation_must_be_involution(self):
        with pytest.raises(ValueError):
            NumberFieldSpec.power_basis([1, 0, 1], conjugation=[[1, 0], [0, 2]])

    @given(field_elements(SQRT2), field_elements(SQRT2))
    def test_structure_table_agrees_with_polynomial(self, x, y):
        tx, ty = FieldElement(SQRT2_TABLE, x.coeffs), FieldElement(SQRT2_TABLE, y.coeffs)
        assert (tx * ty).coeffs == (x * y).coeffs

    @settings(max_examples=60)
    @given(field_elements(SQRT3), field_elements(SQRT3), field_elements(SQRT3))
    def test_ring_axioms(self, x, y, z):
        assert (x * y) * z == x * (y * z)
        assert x * (y + z) == x * y + x * z
        assert x * y == y * x

    @given(field_elements(GAUSS))
    def test_conj_involution_and_real_norm(self, x):
        assert conj(conj(x)) == x
        n = norm_sq(x)
        assert conj(n) == n


class TestDecimal:
    def test_inverse_root(self):
        assert to_decimal(RootTwo(0, 1, 1), 6) == "0.707106"

    def test_rationals(self):
        assert to_decimal(-1, 3) == "-1.000"
        assert to_decimal(Fraction(12, 25), 4) == "0.4800"
        assert to_decimal(FieldElement(RATIONALS, [Fraction(-1, 3)]), 5) == "-0.33333"

    def test_truncates_toward_zero(self):
        assert to_decimal(Fraction(2, 3), 3) == "0.666"
        assert to_decimal(RootTwo(0, -1, 1), 3) == "-0.707"

    def test_sqrt3(self):
        assert to_decimal(FieldElement(SQRT3, [0, 1]), 12) == "1.732050807568"

    def test_matches_mpmath(self):
        mpmath = pytest.importorskip("mpmath")
        mpmath.mp.dps = 60
        x = FieldElement(SQRT3, [Fraction(-7, 11), Fraction(5, 13)])
        ref = mpmath.mpf(-7) / 11 + mpmath.mpf(5) / 13 * mpmath.sqrt(3)
        got = to_decimal(x, 40)
        assert abs(mpmath.mpf(got) - ref) < mpmath.mpf(10) ** -40

    def test_ambiguous_root_interval(self):
        bad = NumberFieldSpec.power_basis([-2, 0, 1], root=(-2, 2))
        with pytest.raises(RootIsolationError):
            to_decimal(FieldElement(bad, [0, 1]), 4)

    def test_missing_root_interval(self):
        bare = NumberFieldSpec.power_basis([-5, 0, 1])
        with pytest.raises(RootIsolationError):
            to_decimal(FieldElement(bare, [0, 1]), 4)

    def test_sturm_counts(self):
        assert count_real_roots([-2, 0, 1], -2, 2) == 2
        assert count_real_roots([-2, 0, 1], 1, 2) == 1
        assert count_real_roots([1, 0, 1], -10, 10) == 0


class TestParsing:
    def test_builtin_fields(self):
        assert parse_field("field sqrt2") is SQRT2
        assert parse_field("field rational") is RATIONALS

    def test_poly_field(self):
        spec = parse_field("field poly -3 0 1 root 1 2")
        assert spec == SQRT3

    def test_poly_field_with_conj(self):
        spec = parse_field("field poly 1 0 1 root 0 1 conj 1 0 0 -1")
        assert spec.conjugation is not None and not spec.is_real

    def test_scalar_forms(self):
        assert parse_scalar("[1/2, -3]", SQRT2).coeffs == (Fraction(1, 2), -3)
        assert parse_scalar("3/5", RATIONALS).coeffs == (Fraction(3, 5),)
        assert parse_scalar("(1 + 1*sqrt2)/2^1", SQRT2).coeffs == (Fraction(1, 2), Fraction(1, 2))

    @pytest.mark.parametrize("text", ["pi", "exp(1)", "sin(1/3)", "e"])
    def test_transcendental_rejected(self, text):
        with pytest.raises(TranscendentalAmplitudeError):
            parse_scalar(text, SQRT2, lineno=4)

    def test_error_carries_line(self):
        with pytest.raises(ParseError, match="line 7"):
            parse_scalar("[1, 2, 3]", SQRT2, lineno=7)

    @given(field_elements(SQRT3))
    def test_round_trip(self, x):
        assert parse_scalar(format_scalar(x), SQRT3) == x
