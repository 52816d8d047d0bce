"""Exact amplitudes: the dyadic ring Z[sqrt2, 1/2], rationals, and number fields.

Three concrete scalar types share one duck-typed protocol (``+``, ``-``,
``*``, ``conjugate()``, ``bool()``):

* :class:`RootTwo` -- ``(a + b*sqrt2) / 2**k`` with integer ``a, b``.
* :class:`fractions.Fraction` -- plain rationals.
* :class:`FieldElement` -- a rational coordinate vector over the basis of a
  :class:`NumberFieldSpec`.

Nothing here ever rounds.  Zero tests are structural; decimal rendering
(:func:`to_decimal`) is output only and is computed by bisection.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence, Union

from .errors import (
    IncompatibleScalarsError,
    ParseError,
    RootIsolationError,
    TranscendentalAmplitudeError,
)

Rational = Union[int, Fraction]


# --------------------------------------------------------------------------
# Z[sqrt2, 1/2]
# --------------------------------------------------------------------------


class RootTwo:
    """The real number ``(a + b*sqrt2) / 2**k``, kept in canonical form.

    Canonical means ``k == 0`` or ``a`` and ``b`` are not both even, and zero
    is always ``(0, 0, 0)``.  Two canonical values are equal iff their
    triples are equal.
    """

    __slots__ = ("a", "b", "k")

    a: int
    b: int
    k: int

    def __init__(self, a: int = 0, b: int = 0, k: int = 0):
        a, b, k = int(a), int(b), int(k)
        if k < 0:
            a, b, k = a << -k, b << -k, 0
        self.a, self.b, self.k = _canonical(a, b, k)

    @classmethod
    def _raw(cls, a: int, b: int, k: int) -> "RootTwo":
        obj = object.__new__(cls)
        obj.a, obj.b, obj.k = _canonical(a, b, k)
        return obj

    @classmethod
    def inv_sqrt2(cls) -> "RootTwo":
        return cls(0, 1, 1)

    # -- protocol ----------------------------------------------------------

    def __bool__(self) -> bool:
        return bool(self.a or self.b)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, RootTwo):
            return self.a == other.a and self.b == other.b and self.k == other.k
        if isinstance(other, int):
            return self.b == 0 and self.k == 0 and self.a == other
        if isinstance(other, Fraction):
            return self.b == 0 and Fraction(self.a, 1 << self.k) == other
        return NotImplemented

    def __hash__(self) -> int:
        return hash((RootTwo, self.a, self.b, self.k))

    def __neg__(self) -> "RootTwo":
        obj = object.__new__(RootTwo)
        obj.a, obj.b, obj.k = -self.a, -self.b, self.k
        return obj

    def __add__(self, other: object) -> "RootTwo":
        if isinstance(other, int):
            other = RootTwo(other)
        elif not isinstance(other, RootTwo):
            return NotImplemented
        k1, k2 = self.k, other.k
        if k1 == k2:
            return RootTwo._raw(self.a + other.a, self.b + other.b, k1)
        if k1 > k2:
            s = k1 - k2
            return RootTwo._raw(self.a + (other.a << s), self.b + (other.b << s), k1)
        s = k2 - k1
        return RootTwo._raw((self.a << s) + other.a, (self.b << s) + other.b, k2)

    __radd__ = __add__

    def __sub__(self, other: object) -> "RootTwo":
        if isinstance(other, int):
            other = RootTwo(other)
        elif not isinstance(other, RootTwo):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other: object) -> "RootTwo":
        return (-self) + other

    def __mul__(self, other: object) -> "RootTwo":
        if isinstance(other, int):
            return RootTwo._raw(self.a * other, self.b * other, self.k)
        if not isinstance(other, RootTwo):
            return NotImplemented
        a1, b1, a2, b2 = self.a, self.b, other.a, other.b
        return RootTwo._raw(a1 * a2 + 2 * b1 * b2, a1 * b2 + b1 * a2, self.k + other.k)

    __rmul__ = __mul__

    def conjugate(self) -> "RootTwo":
        # Every element of this ring is real.
        return self

    def __float__(self) -> float:
        return (self.a + self.b * 2**0.5) / 2.0**self.k

    def __repr__(self) -> str:
        return f"RootTwo({self.a}, {self.b}, {self.k})"

    def __str__(self) -> str:
        sign = "-" if self.b < 0 else "+"
        return f"({self.a} {sign} {abs(self.b)}*sqrt2)/2^{self.k}"

    def as_field(self, spec: "NumberFieldSpec | None" = None) -> "FieldElement":
        """Same value as an element of Q(beta), beta**2 = 2."""
        spec = SQRT2 if spec is None else spec
        if spec.degree != 2 or spec.minimal_polynomial != (Fraction(-2), Fraction(0), Fraction(1)):
            raise IncompatibleScalarsError(f"{spec.name} is not Q(sqrt2) in power basis")
        den = 1 << self.k
        return FieldElement(spec, (Fraction(self.a, den), Fraction(self.b, den)))


def _canonical(a: int, b: int, k: int) -> tuple[int, int, int]:
    if not (a or b):
        return 0, 0, 0
    if k:
        ab = a | b
        tz = (ab & -ab).bit_length() - 1
        if tz:
            s = tz if tz < k else k
            return a >> s, b >> s, k - s
    return a, b, k


# --------------------------------------------------------------------------
# polynomial helpers (coefficient lists, low degree first)
# --------------------------------------------------------------------------


def _poly_eval(p: Sequence[Fraction], x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def _poly_trim(p: list[Fraction]) -> list[Fraction]:
    while p and p[-1] == 0:
        p.pop()
    return p


def _poly_rem(num: Sequence[Fraction], den: Sequence[Fraction]) -> list[Fraction]:
    r = list(num)
    d = list(den)
    while len(r) >= len(d) and any(r):
        coef = r[-1] / d[-1]
        shift = len(r) - len(d)
        for i, c in enumerate(d):
            r[shift + i] -= coef * c
        r.pop()
        _poly_trim(r)
    return _poly_trim(r)


def _poly_deriv(p: Sequence[Fraction]) -> list[Fraction]:
    return [i * c for i, c in enumerate(p)][1:]


def _sturm_chain(p: Sequence[Fraction]) -> list[list[Fraction]]:
    chain = [_poly_trim(list(p)), _poly_trim(_poly_deriv(p))]
    while chain[-1]:
        rem = _poly_rem(chain[-2], chain[-1])
        if not rem:
            break
        chain.append([-c for c in rem])
    return [c for c in chain if c]


def _sign_changes(chain: list[list[Fraction]], x: Fraction) -> int:
    signs = [v for v in (_poly_eval(c, x) for c in chain) if v != 0]
    return sum(1 for u, v in zip(signs, signs[1:]) if (u > 0) != (v > 0))


def count_real_roots(p: Sequence[Rational], lo: Rational, hi: Rational) -> int:
    """Distinct real roots of ``p`` in the half-open interval ``(lo, hi]`` (Sturm)."""
    p = [Fraction(c) for c in p]
    chain = _sturm_chain(p)
    return _sign_changes(chain, Fraction(lo)) - _sign_changes(chain, Fraction(hi))


# --------------------------------------------------------------------------
# number fields
# --------------------------------------------------------------------------

_Table = tuple[tuple[tuple[tuple[int, Fraction], ...], ...], ...]


@dataclass(frozen=True)
class NumberFieldSpec:
    """A finite extension of Q with an explicit basis.

    Presented either by a monic minimal polynomial (basis ``1, beta, ...,
    beta**(k-1)``, optional ``root_interval`` pinning a real root) or by a
    structure-constant table ``q[i][j][l]`` with ``beta_i * beta_j =
    sum_l q[i][j][l] * beta_l`` and ``beta_0 == 1``.

    ``conjugation[i][j]`` is the coefficient of ``beta_i`` in
    ``conj(beta_j)``; ``None`` means the field is real.
    """

    degree: int
    minimal_polynomial: tuple[Fraction, ...] | None = None
    root_interval: tuple[Fraction, Fraction] | None = None
    structure_constants: tuple[tuple[tuple[Fraction, ...], ...], ...] | None = None
    conjugation: tuple[tuple[Fraction, ...], ...] | None = None
    name: str = field(default="", compare=False)
    _table: _Table = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        k = self.degree
        if k < 1:
            raise ValueError("field degree must be positive")
        if self.minimal_polynomial is None and self.structure_constants is None:
            raise ValueError("need a minimal polynomial or a structure-constant table")
        if self.minimal_polynomial is not None:
            mp = self.minimal_polynomial
            if len(mp) != k + 1 or mp[-1] != 1:
                raise ValueError("minimal polynomial must be monic of the field degree")
        if self.structure_constants is not None:
            q = self.structure_constants
            if len(q) != k or any(len(r) != k or any(len(c) != k for c in r) for r in q):
                raise ValueError("structure constants must be a k x k x k table")
            table = q
        else:
            table = _power_basis_table(self.minimal_polynomial)
        sparse = tuple(
            tuple(tuple((l, c) for l, c in enumerate(table[i][j]) if c) for j in range(k))
            for i in range(k)
        )
        object.__setattr__(self, "_table", sparse)
        if self.structure_constants is not None:
            if not self.structure_is_consistent():
                raise ValueError("structure constants are not commutative/associative with unit beta_0")
        if self.conjugation is not None:
            m = self.conjugation
            if len(m) != k or any(len(r) != k for r in m):
                raise ValueError("conjugation must be a k x k matrix")
            if _matmul(m, m) != _identity(k):
                raise ValueError("conjugation matrix is not an involution")

    # -- construction ------------------------------------------------------

    @classmethod
    def power_basis(
        cls,
        minimal_polynomial: Sequence[Rational],
        root: tuple[Rational, Rational] | None = None,
        conjugation: Sequence[Sequence[Rational]] | None = None,
        name: str = "",
    ) -> "NumberFieldSpec":
        mp = tuple(Fraction(c) for c in minimal_polynomial)
        return cls(
            degree=len(mp) - 1,
            minimal_polynomial=mp,
            root_interval=None if root is None else (Fraction(root[0]), Fraction(root[1])),
            conjugation=_frac_matrix(conjugation),
            name=name or "poly " + " ".join(str(c) for c in mp),
        )

    @classmethod
    def from_structure_constants(
        cls,
        table: Sequence[Sequence[Sequence[Rational]]],
        conjugation: Sequence[Sequence[Rational]] | None = None,
        name: str = "",
    ) -> "NumberFieldSpec":
        q = tuple(tuple(tuple(Fraction(c) for c in row) for row in plane) for plane in table)
        return cls(
            degree=len(q),
            structure_constants=q,
            conjugation=_frac_matrix(conjugation),
            name=name or f"structure-constant field of degree {len(q)}",
        )

    @classmethod
    def quadratic(cls, n: int) -> "NumberFieldSpec":
        """Q(sqrt n) for a positive non-square ``n``, beta the positive root."""
        hi = 1
        while hi * hi <= n:
            hi += 1
        return cls.power_basis([-n, 0, 1], root=(hi - 1, hi), name=f"sqrt{n}")

    # -- queries -----------------------------------------------------------

    @property
    def is_power_basis(self) -> bool:
        return self.minimal_polynomial is not None and self.structure_constants is None

    @property
    def is_real(self) -> bool:
        return self.conjugation is None or self.conjugation == _identity(self.degree)

    def product_coefficients(self, i: int, j: int) -> tuple[Fraction, ...]:
        """Coordinates of ``beta_i * beta_j``."""
        out = [Fraction(0)] * self.degree
        for l, c in self._table[i][j]:
            out[l] = c
        return tuple(out)

    def structure_is_consistent(self) -> bool:
        """Exhaustive check of commutativity, associativity and ``beta_0 = 1``."""
        k = self.degree
        basis = [FieldElement(self, _unit_vector(k, i)) for i in range(k)]
        one = basis[0]
        for x in basis:
            if one * x != x:
                return False
        for x in basis:
            for y in basis:
                if x * y != y * x:
                    return False
                for z in basis:
                    if (x * y) * z != x * (y * z):
                        return False
        return True

    def beta_interval(self, width: Fraction) -> tuple[Fraction, Fraction]:
        """An interval of width <= ``width`` holding the isolated real root."""
        if not self.is_power_basis or self.root_interval is None:
            raise RootIsolationError(f"field {self.name!r} has no root-isolating interval")
        mp = self.minimal_polynomial
        lo, hi = self.root_interval
        if lo > hi:
            lo, hi = hi, lo
        if self.degree == 1:
            r = -mp[0]
            return r, r
        chain = _sturm_chain(mp)
        if _sign_changes(chain, lo) - _sign_changes(chain, hi) != 1:
            raise RootIsolationError(
                f"interval [{lo}, {hi}] does not isolate exactly one root of {self.name!r}"
            )
        if _poly_eval(mp, hi) == 0:
            return hi, hi
        while hi - lo > width:
            mid = (lo + hi) / 2
            if _sign_changes(chain, lo) - _sign_changes(chain, mid) == 1:
                hi = mid
            else:
                lo = mid
            if _poly_eval(mp, hi) == 0:
                return hi, hi
        return lo, hi

    def format(self) -> str:
        """Render in the ``field ...`` text syntax (power-basis fields only)."""
        if self == SQRT2:
            return "field sqrt2"
        if self == RATIONALS:
            return "field rational"
        if not self.is_power_basis or self.root_interval is None:
            raise ValueError("only power-basis fields with a root interval have a text form")
        parts = ["field", "poly", *(str(c) for c in self.minimal_polynomial)]
        parts += ["root", str(self.root_interval[0]), str(self.root_interval[1])]
        if self.conjugation is not None:
            parts.append("conj")
            parts += [str(c) for row in self.conjugation for c in row]
        return " ".join(parts)


def _power_basis_table(mp: Sequence[Fraction]) -> list[list[list[Fraction]]]:
    k = len(mp) - 1
    # powers[e] = coordinates of beta**e for e < 2k - 1
    powers: list[list[Fraction]] = [_unit_vector(k, e) for e in range(k)]
    for e in range(k, 2 * k - 1):
        prev = powers[-1]
        nxt = [Fraction(0)] + prev[:-1]
        top = prev[-1]
        if top:
            for i in range(k):
                nxt[i] -= top * mp[i]
        powers.append(nxt)
    return [[powers[i + j] for j in range(k)] for i in range(k)]


def _unit_vector(k: int, i: int) -> list[Fraction]:
    v = [Fraction(0)] * k
    v[i] = Fraction(1)
    return v


def _identity(k: int) -> tuple[tuple[Fraction, ...], ...]:
    return tuple(tuple(Fraction(int(i == j)) for j in range(k)) for i in range(k))


def _matmul(a, b) -> tuple[tuple[Fraction, ...], ...]:
    n, inner, m = len(a), len(b), len(b[0])
    return tuple(
        tuple(sum((a[i][t] * b[t][j] for t in range(inner)), Fraction(0)) for j in range(m))
        for i in range(n)
    )


def _frac_matrix(m) -> tuple[tuple[Fraction, ...], ...] | None:
    if m is None:
        return None
    return tuple(tuple(Fraction(c) for c in row) for row in m)


SQRT2 = NumberFieldSpec.power_basis([-2, 0, 1], root=(1, 2), name="sqrt2")
RATIONALS = NumberFieldSpec.power_basis([0, 1], root=(-1, 1), name="rational")


class FieldElement:
    """An element of a :class:`NumberFieldSpec`, as rational coordinates."""

    __slots__ = ("spec", "coeffs")

    spec: NumberFieldSpec
    coeffs: tuple[Fraction, ...]

    def __init__(self, spec: NumberFieldSpec, coeffs: Sequence[Rational]):
        if len(coeffs) != spec.degree:
            raise ValueError(f"expected {spec.degree} coefficients, got {len(coeffs)}")
        self.spec = spec
        self.coeffs = tuple(c if type(c) is Fraction else Fraction(c) for c in coeffs)

    @classmethod
    def _raw(cls, spec: NumberFieldSpec, coeffs: tuple[Fraction, ...]) -> "FieldElement":
        obj = object.__new__(cls)
        obj.spec = spec
        obj.coeffs = coeffs
        return obj

    @classmethod
    def from_rational(cls, spec: NumberFieldSpec, q: Rational) -> "FieldElement":
        v = [Fraction(0)] * spec.degree
        v[0] = Fraction(q)
        return cls._raw(spec, tuple(v))

    @classmethod
    def zero(cls, spec: NumberFieldSpec) -> "FieldElement":
        return cls.from_rational(spec, 0)

    @classmethod
    def one(cls, spec: NumberFieldSpec) -> "FieldElement":
        return cls.from_rational(spec, 1)

    def _coerce(self, other: object) -> "FieldElement | None":
        if isinstance(other, FieldElement):
            if other.spec is not self.spec and other.spec != self.spec:
                raise IncompatibleScalarsError(
                    f"cannot combine elements of {self.spec.name!r} and {other.spec.name!r}"
                )
            return other
        if isinstance(other, (int, Fraction)):
            return FieldElement.from_rational(self.spec, other)
        return None

    def __bool__(self) -> bool:
        return any(self.coeffs)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, FieldElement):
            return self.coeffs == other.coeffs and (other.spec is self.spec or other.spec == self.spec)
        if isinstance(other, (int, Fraction)):
            return self.coeffs[0] == other and not any(self.coeffs[1:])
        return NotImplemented

    def __hash__(self) -> int:
        return hash((FieldElement, self.coeffs))

    def __neg__(self) -> "FieldElement":
        return FieldElement._raw(self.spec, tuple(-c for c in self.coeffs))

    def __add__(self, other: object) -> "FieldElement":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FieldElement._raw(self.spec, tuple(x + y for x, y in zip(self.coeffs, o.coeffs)))

    __radd__ = __add__

    def __sub__(self, other: object) -> "FieldElement":
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return FieldElement._raw(self.spec, tuple(x - y for x, y in zip(self.coeffs, o.coeffs)))

    def __rsub__(self, other: object) -> "FieldElement":
        return (-self) + other

    def __mul__(self, other: object) -> "FieldElement":
        if isinstance(other, (int, Fraction)):
            return FieldElement._raw(self.spec, tuple(c * other for c in self.coeffs))
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        k = self.spec.degree
        table = self.spec._table
        out = [Fraction(0)] * k
        for i, a in enumerate(self.coeffs):
            if not a:
                continue
            row = table[i]
            for j, b in enumerate(o.coeffs):
                if not b:
                    continue
                ab = a * b
                for l, q in row[j]:
                    out[l] += ab * q
        return FieldElement._raw(self.spec, tuple(out))

    __rmul__ = __mul__

    def conjugate(self) -> "FieldElement":
        m = self.spec.conjugation
        if m is None:
            return self
        c = self.coeffs
        return FieldElement._raw(
            self.spec, tuple(sum((m[i][j] * c[j] for j in range(len(c)) if c[j]), Fraction(0)) for i in range(len(c)))
        )

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def __repr__(self) -> str:
        return f"FieldElement({self.spec.name!r}, {list(map(str, self.coeffs))})"

    def __str__(self) -> str:
        return "[" + ", ".join(str(c) for c in self.coeffs) + "]"


ExactScalar = Union[RootTwo, Fraction, FieldElement]


# --------------------------------------------------------------------------
# module-level operations
# --------------------------------------------------------------------------


def _check_same(x: object, y: object) -> None:
    tx, ty = type(x), type(y)
    if tx is int:
        tx = Fraction if ty is Fraction else ty
    if ty is int:
        ty = tx
    if tx is not ty:
        raise IncompatibleScalarsError(f"cannot combine {type(x).__name__} and {type(y).__name__}")
    if tx is FieldElement and x.spec != y.spec:
        raise IncompatibleScalarsError(f"cannot combine elements of {x.spec.name!r} and {y.spec.name!r}")


def add(x: ExactScalar, y: ExactScalar) -> ExactScalar:
    _check_same(x, y)
    return x + y


def mul(x: ExactScalar, y: ExactScalar) -> ExactScalar:
    _check_same(x, y)
    return x * y


def conj(x: ExactScalar) -> ExactScalar:
    return x.conjugate()


def norm_sq(x: ExactScalar) -> ExactScalar:
    """``x * conj(x)``: the probability carried by amplitude ``x``."""
    return x * x.conjugate()


def is_zero(x: ExactScalar) -> bool:
    return not x


def scalar_zero_like(x: ExactScalar) -> ExactScalar:
    if isinstance(x, RootTwo):
        return RootTwo()
    if isinstance(x, FieldElement):
        return FieldElement.zero(x.spec)
    return Fraction(0)


def to_decimal(x: ExactScalar | int, digits: int) -> str:
    """Decimal expansion of ``x`` truncated toward zero after ``digits`` places.

    Every printed digit is a digit of the true expansion.  Irrational
    values are bracketed by bisecting the field generator until the
    truncation is determined.
    """
    if digits < 1:
        raise ValueError("digits must be positive")
    if isinstance(x, RootTwo):
        x = x.as_field()
    if isinstance(x, (int, Fraction)):
        return _format_truncated(Fraction(x), digits)
    spec = x.spec
    if x.is_rational():
        # basis element 0 is 1 in both presentations
        return _format_truncated(x.coeffs[0], digits)
    if not spec.is_real:
        raise RootIsolationError(f"cannot render a non-rational element of complex field {spec.name!r}")
    scale = 10**digits
    width = Fraction(1, 4)
    for _ in range(4096):
        lo, hi = spec.beta_interval(width)
        vlo, vhi = _interval_value(x.coeffs, lo, hi)
        if vlo == vhi:
            return _format_truncated(vlo, digits)
        if vlo > 0 or vhi < 0:
            tlo, thi = int(vlo * scale), int(vhi * scale)
            if tlo == thi:
                return _format_digits(tlo, vlo < 0, digits)
        width /= 16
    raise RootIsolationError("bisection did not converge; is the minimal polynomial irreducible?")


def _interval_value(coeffs: Sequence[Fraction], lo: Fraction, hi: Fraction) -> tuple[Fraction, Fraction]:
    vlo = vhi = Fraction(0)
    plo = phi = Fraction(1)  # range of beta**i on [lo, hi]
    for i, c in enumerate(coeffs):
        if i:
            ends = (lo**i, hi**i)
            plo, phi = min(ends), max(ends)
            if i % 2 == 0 and lo < 0 < hi:
                plo = Fraction(0)
        if c:
            a, b = c * plo, c * phi
            vlo += min(a, b)
            vhi += max(a, b)
    return vlo, vhi


def _format_truncated(q: Fraction, digits: int) -> str:
    return _format_digits(int(q * 10**digits), q < 0, digits)


def _format_digits(t: int, negative: bool, digits: int) -> str:
    s = str(abs(t)).rjust(digits + 1, "0")
    return ("-" if negative else "") + s[:-digits] + "." + s[-digits:]


# --------------------------------------------------------------------------
# text formats
# --------------------------------------------------------------------------

_TRANSCENDENTAL = re.compile(r"(?i)\b(pi|e|exp|sin|cos|tan|log|ln|euler|tau)\b")
_ROOTTWO_RE = re.compile(r"^\(\s*(-?\d+)\s*([+-])\s*(\d+)\s*\*\s*sqrt2\s*\)\s*/\s*2\^(\d+)$")


def parse_rational(text: str, lineno: int | None = None) -> Fraction:
    t = text.strip()
    if _TRANSCENDENTAL.search(t):
        raise TranscendentalAmplitudeError(f"transcendental amplitude {t!r} is not allowed", lineno)
    try:
        return Fraction(t)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"bad rational {t!r}", lineno) from None


def parse_field(text: str, lineno: int | None = None) -> NumberFieldSpec:
    """Parse ``field sqrt2`` / ``field rational`` / ``field poly c0 .. ck root lo hi [conj ...]``."""
    toks = text.split()
    if toks and toks[0] == "field":
        toks = toks[1:]
    if not toks:
        raise ParseError("empty field description", lineno)
    kind = toks[0]
    if kind == "sqrt2":
        return SQRT2
    if kind == "rational":
        return RATIONALS
    if kind != "poly":
        raise ParseError(f"unknown field kind {kind!r}", lineno)
    try:
        r = toks.index("root")
    except ValueError:
        raise ParseError("field poly needs 'root lo hi'", lineno) from None
    coeffs = [parse_rational(t, lineno) for t in toks[1:r]]
    if len(coeffs) < 2:
        raise ParseError("minimal polynomial needs degree >= 1", lineno)
    rest = toks[r + 1 :]
    if len(rest) < 2:
        raise ParseError("root needs two endpoints", lineno)
    lo, hi = parse_rational(rest[0], lineno), parse_rational(rest[1], lineno)
    conjugation = None
    rest = rest[2:]
    if rest:
        if rest[0] != "conj":
            raise ParseError(f"unexpected token {rest[0]!r}", lineno)
        k = len(coeffs) - 1
        vals = [parse_rational(t, lineno) for t in rest[1:]]
        if len(vals) != k * k:
            raise ParseError(f"conj needs {k * k} entries, got {len(vals)}", lineno)
        conjugation = [vals[i * k : (i + 1) * k] for i in range(k)]
    try:
        return NumberFieldSpec.power_basis(coeffs, root=(lo, hi), conjugation=conjugation)
    except ValueError as exc:
        raise ParseError(str(exc), lineno) from None


def parse_scalar(text: str, spec: NumberFieldSpec | None = None, lineno: int | None = None) -> ExactScalar:
    """Parse one scalar.

    With ``spec`` the result is a :class:`FieldElement` and the accepted
    forms are ``[c0, ..., c_{k-1}]``, a rational ``p/q``, or (for Q(sqrt2))
    ``(a + b*sqrt2)/2^k``.  Without ``spec`` the last two forms give a
    :class:`Fraction` or :class:`RootTwo`.
    """
    t = text.strip()
    if _TRANSCENDENTAL.search(t):
        raise TranscendentalAmplitudeError(f"transcendental amplitude {t!r} is not allowed", lineno)
    m = _ROOTTWO_RE.match(t)
    if m:
        b = int(m.group(3)) * (-1 if m.group(2) == "-" else 1)
        r2 = RootTwo(int(m.group(1)), b, int(m.group(4)))
        return r2 if spec is None else r2.as_field(spec)
    if t.startswith("["):
        if not t.endswith("]"):
            raise ParseError(f"unterminated coefficient vector {t!r}", lineno)
        parts = [p for p in t[1:-1].replace(",", " ").split()]
        coeffs = [parse_rational(p, lineno) for p in parts]
        if spec is None:
            raise ParseError("coefficient vector needs a field", lineno)
        if len(coeffs) != spec.degree:
            raise ParseError(f"expected {spec.degree} coefficients, got {len(coeffs)}", lineno)
        return FieldElement(spec, coeffs)
    q = parse_rational(t, lineno)
    return q if spec is None else FieldElement.from_rational(spec, q)


def format_scalar(x: ExactScalar | int) -> str:
    if isinstance(x, (int, Fraction)):
        return str(Fraction(x))
    return str(x)
