"""Exact arithmetic in Z[q, q^-1] and Q(q).

``LaurentPolynomial`` is a plain exponent -> coefficient map.  ``RationalFunction``
is the workhorse for all module computations; it keeps a canonical reduced form

    f = q^e * N(q) / D(q),   N(0) != 0,  D(0) == 1,  gcd(N, D) == 1

so that equality and hashing are structural.  Univariate polynomial products and
gcds are delegated to FLINT (``python-flint``).
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, Mapping, Union

from flint import fmpq, fmpq_poly

__all__ = [
    "LaurentPolynomial",
    "RationalFunction",
    "QFieldZeroDivision",
    "NotRegularAtInfinity",
    "ParseError",
    "Q",
    "ZERO",
    "ONE",
    "qpow",
    "q_integer",
    "q_factorial",
    "q_binomial",
    "qint",
    "qfact",
    "bar",
    "infinity_valuation",
    "value_at_infinity",
    "parse",
    "render",
]

Number = Union[int, Fraction]


class QFieldZeroDivision(ZeroDivisionError):
    """Division by the zero rational function."""


class NotRegularAtInfinity(ValueError):
    """Raised by value_at_infinity for functions with a pole at q = oo."""


class ParseError(ValueError):
    def __init__(self, message: str, text: str, pos: int, line: int = 1):
        self.text = text
        self.pos = pos
        self.line = line
        self.column = pos + 1
        super().__init__(f"{message} (line {line}, column {pos + 1})")


def _frac(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, fmpq):
        return Fraction(int(c.p), int(c.q))
    return Fraction(c)


class LaurentPolynomial:
    """Element of Q[q, q^-1] stored as {exponent: nonzero coefficient}."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[int, Number] | None = None):
        clean: Dict[int, Fraction] = {}
        if terms:
            for k, c in terms.items():
                c = _frac(c)
                if c:
                    clean[int(k)] = c
        self._terms = clean
        self._hash = None

    @classmethod
    def monomial(cls, k: int, c: Number = 1) -> "LaurentPolynomial":
        return cls({k: c})

    @property
    def terms(self) -> Dict[int, Fraction]:
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def degree(self) -> int:
        if not self._terms:
            raise ValueError("degree of the zero polynomial")
        return max(self._terms)

    def low_degree(self) -> int:
        if not self._terms:
            raise ValueError("low degree of the zero polynomial")
        return min(self._terms)

    def coefficient(self, k: int) -> Fraction:
        return self._terms.get(k, Fraction(0))

    def has_integer_coefficients(self) -> bool:
        return all(c.denominator == 1 for c in self._terms.values())

    def bar(self) -> "LaurentPolynomial":
        return LaurentPolynomial({-k: c for k, c in self._terms.items()})

    def __add__(self, other):
        other = _as_laurent(other)
        if other is NotImplemented:
            return NotImplemented
        out = dict(self._terms)
        for k, c in other._terms.items():
            out[k] = out.get(k, 0) + c
        return LaurentPolynomial(out)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPolynomial({k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        other = _as_laurent(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = _as_laurent(other)
        if other is NotImplemented:
            return NotImplemented
        out: Dict[int, Fraction] = {}
        for k1, c1 in self._terms.items():
            for k2, c2 in other._terms.items():
                out[k1 + k2] = out.get(k1 + k2, 0) + c1 * c2
        return LaurentPolynomial(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            if len(self._terms) == 1:
                (k, c), = self._terms.items()
                return LaurentPolynomial({k * n: c ** n})
            raise ValueError("negative power of a non-monomial Laurent polynomial")
        out = LaurentPolynomial({0: 1})
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        other = _as_laurent(other)
        if other is NotImplemented:
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __bool__(self):
        return bool(self._terms)

    def to_rational(self) -> "RationalFunction":
        return RationalFunction(self)

    def __str__(self):
        return _render_terms(self._terms)

    def __repr__(self):
        return f"LaurentPolynomial({self})"


def _as_laurent(x):
    if isinstance(x, LaurentPolynomial):
        return x
    if isinstance(x, (int, Fraction)):
        return LaurentPolynomial({0: x})
    return NotImplemented


# ---------------------------------------------------------------------------
# rational functions


def _low_index(p: fmpq_poly) -> int:
    k = 0
    for c in p.coeffs():
        if c != 0:
            return k
        k += 1
    raise ValueError("zero polynomial")


_POLY_ONE = fmpq_poly([1])
_POLY_ZERO = fmpq_poly([])


class RationalFunction:
    """Element of Q(q) in canonical reduced form."""

    __slots__ = ("_n", "_d", "_e", "_hash")

    def __init__(self, numerator=0, denominator=1):
        if isinstance(numerator, RationalFunction) and denominator == 1:
            self._n, self._d, self._e, self._hash = numerator._n, numerator._d, numerator._e, numerator._hash
            return
        num = _coerce(numerator)
        den = _coerce(denominator)
        if den.is_zero():
            raise QFieldZeroDivision("zero denominator")
        r = num / den
        self._n, self._d, self._e, self._hash = r._n, r._d, r._e, None

    @classmethod
    def _raw(cls, n: fmpq_poly, d: fmpq_poly, e: int) -> "RationalFunction":
        obj = object.__new__(cls)
        obj._n = n
        obj._d = d
        obj._e = e
        obj._hash = None
        return obj

    @classmethod
    def _normalize(cls, n: fmpq_poly, d: fmpq_poly, e: int) -> "RationalFunction":
        if n.is_zero():
            return ZERO
        k = _low_index(n)
        if k:
            n = n.right_shift(k)
            e += k
        k = _low_index(d)
        if k:
            d = d.right_shift(k)
            e -= k
        if d.degree() > 0 and n.degree() > 0:
            g = n.gcd(d)
            if g.degree() > 0:
                n = n // g
                d = d // g
        c = d.coeffs()[0]
        if c != 1:
            n = n / c
            d = d / c
        return cls._raw(n, d, e)

    @classmethod
    def from_laurent(cls, p: LaurentPolynomial) -> "RationalFunction":
        terms = p._terms
        if not terms:
            return ZERO
        lo = min(terms)
        hi = max(terms)
        coeffs = [fmpq(0)] * (hi - lo + 1)
        for k, c in terms.items():
            coeffs[k - lo] = fmpq(c.numerator, c.denominator)
        return cls._raw(fmpq_poly(coeffs), _POLY_ONE, lo)

    # -- structure -----------------------------------------------------------

    def is_zero(self) -> bool:
        return self._n.is_zero()

    def __bool__(self):
        return not self._n.is_zero()

    def is_laurent(self) -> bool:
        return self._d.degree() <= 0

    def in_A(self) -> bool:
        """Membership in Z[q, q^-1]."""
        return self.is_laurent() and all(c.q == 1 for c in self._n.coeffs())

    @property
    def numerator(self) -> LaurentPolynomial:
        return LaurentPolynomial({self._e + k: _frac(c) for k, c in enumerate(self._n.coeffs())})

    @property
    def denominator(self) -> LaurentPolynomial:
        return LaurentPolynomial({k: _frac(c) for k, c in enumerate(self._d.coeffs())})

    def _key(self):
        return (self._e, tuple((int(c.p), int(c.q)) for c in self._n.coeffs()),
                tuple((int(c.p), int(c.q)) for c in self._d.coeffs()))

    def __eq__(self, other):
        if not isinstance(other, RationalFunction):
            try:
                other = _coerce(other)
            except TypeError:
                return NotImplemented
        return self._e == other._e and self._n == other._n and self._d == other._d

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self._key())
        return self._hash

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, RationalFunction):
            other = _coerce_or_none(other)
            if other is None:
                return NotImplemented
        if self._n.is_zero():
            return other
        if other._n.is_zero():
            return self
        e1, e2 = self._e, other._e
        m = e1 if e1 < e2 else e2
        n1 = self._n.left_shift(e1 - m) if e1 > m else self._n
        n2 = other._n.left_shift(e2 - m) if e2 > m else other._n
        d1, d2 = self._d, other._d
        if d1.degree() == 0 and d2.degree() == 0:
            n = n1 + n2
            if n.is_zero():
                return ZERO
            k = _low_index(n)
            if k:
                n = n.right_shift(k)
            return RationalFunction._raw(n, _POLY_ONE, m + k)
        if d1 == d2:
            return RationalFunction._normalize(n1 + n2, d1, m)
        return RationalFunction._normalize(n1 * d2 + n2 * d1, d1 * d2, m)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction._raw(-self._n, self._d, self._e)

    def __sub__(self, other):
        if not isinstance(other, RationalFunction):
            other = _coerce_or_none(other)
            if other is None:
                return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, RationalFunction):
            other = _coerce_or_none(other)
            if other is None:
                return NotImplemented
        if self._n.is_zero() or other._n.is_zero():
            return ZERO
        n1, d1, n2, d2 = self._n, self._d, other._n, other._d
        e = self._e + other._e
        if d1.degree() == 0 and d2.degree() == 0:
            return RationalFunction._raw(n1 * n2, _POLY_ONE, e)
        if d2.degree() > 0 and n1.degree() > 0:
            g = n1.gcd(d2)
            if g.degree() > 0:
                n1 = n1 // g
                d2 = d2 // g
        if d1.degree() > 0 and n2.degree() > 0:
            g = n2.gcd(d1)
            if g.degree() > 0:
                n2 = n2 // g
                d1 = d1 // g
        n = n1 * n2
        d = d1 * d2
        c = d.coeffs()[0]
        if c != 1:
            n = n / c
            d = d / c
        return RationalFunction._raw(n, d, e)

    __rmul__ = __mul__

    def inverse(self) -> "RationalFunction":
        if self._n.is_zero():
            raise QFieldZeroDivision("inverse of zero")
        n, d = self._d, self._n
        c = d.coeffs()[0]
        if c != 1:
            n = n / c
            d = d / c
        return RationalFunction._raw(n, d, -self._e)

    def __truediv__(self, other):
        if not isinstance(other, RationalFunction):
            other = _coerce_or_none(other)
            if other is None:
                return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = _coerce_or_none(other)
        if other is None:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        if self._d.degree() == 0:
            if self._n.is_zero():
                return ONE if n == 0 else ZERO
            return RationalFunction._raw(self._n ** n, _POLY_ONE, self._e * n)
        return RationalFunction._raw(self._n ** n, self._d ** n, self._e * n)

    # -- involution and valuation --------------------------------------------

    def bar(self) -> "RationalFunction":
        """Substitute q -> q^-1."""
        if self._n.is_zero():
            return self
        nc = self._n.coeffs()
        dc = self._d.coeffs()
        n = fmpq_poly(nc[::-1])
        d = fmpq_poly(dc[::-1])
        e = -self._e - (len(nc) - 1) + (len(dc) - 1)
        c = dc[-1]
        if c != 1:
            n = n / c
            d = d / c
        return RationalFunction._raw(n, d, e)

    def valuation_at_infinity(self):
        if self._n.is_zero():
            return -math.inf
        return self._n.degree() + self._e - self._d.degree()

    def value_at_infinity(self) -> Fraction:
        v = self.valuation_at_infinity()
        if v > 0:
            raise NotRegularAtInfinity(f"{self} has a pole at q = oo")
        if v < 0:
            return Fraction(0)
        return _frac(self._n.leading_coefficient()) / _frac(self._d.leading_coefficient())

    def is_regular_at_infinity(self) -> bool:
        return self.valuation_at_infinity() <= 0

    def constant_value(self) -> Fraction:
        """The rational number this function equals; error if not constant."""
        if self._e != 0 or self._n.degree() > 0 or self._d.degree() > 0:
            raise ValueError(f"{self} is not a constant")
        if self._n.is_zero():
            return Fraction(0)
        return _frac(self._n.coeffs()[0])

    def complexity(self) -> int:
        """Rough size measure (number of stored coefficients)."""
        return self._n.length() + self._d.length()

    # -- text ------------------------------------------------------------------

    def __str__(self):
        return render(self)

    def __repr__(self):
        return f"RationalFunction({render(self)!r})"


def _coerce(x) -> RationalFunction:
    if isinstance(x, RationalFunction):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a field element")
    if isinstance(x, int):
        if x == 0:
            return ZERO
        return RationalFunction._raw(fmpq_poly([x]), _POLY_ONE, 0)
    if isinstance(x, Fraction):
        if x == 0:
            return ZERO
        return RationalFunction._raw(fmpq_poly([fmpq(x.numerator, x.denominator)]), _POLY_ONE, 0)
    if isinstance(x, LaurentPolynomial):
        return RationalFunction.from_laurent(x)
    if isinstance(x, str):
        return parse(x)
    raise TypeError(f"cannot convert {type(x).__name__} to RationalFunction")


def _coerce_or_none(x):
    if isinstance(x, (int, Fraction, LaurentPolynomial)) and not isinstance(x, bool):
        return _coerce(x)
    return None


ZERO = RationalFunction._raw(_POLY_ZERO, _POLY_ONE, 0)
ONE = RationalFunction._raw(_POLY_ONE, _POLY_ONE, 0)
Q = RationalFunction._raw(_POLY_ONE, _POLY_ONE, 1)


@lru_cache(maxsize=None)
def qpow(k: int) -> RationalFunction:
    return RationalFunction._raw(_POLY_ONE, _POLY_ONE, k)


def bar(f):
    return f.bar()


def infinity_valuation(f: RationalFunction):
    """deg(num) - deg(den); ``-inf`` for zero so that 0 counts as regular."""
    return f.valuation_at_infinity()


def value_at_infinity(f: RationalFunction) -> Fraction:
    return f.value_at_infinity()


# ---------------------------------------------------------------------------
# q-integers


def q_integer(n: int, d: int = 1) -> LaurentPolynomial:
    """[n]_i with q_i = q^d; [-n] = -[n]."""
    if d < 1:
        raise ValueError("d must be a positive integer")
    if n < 0:
        return -q_integer(-n, d)
    return LaurentPolynomial({d * (n - 1 - 2 * k): 1 for k in range(n)})


def q_factorial(n: int, d: int = 1) -> LaurentPolynomial:
    if n < 0:
        raise ValueError("q-factorial of a negative integer")
    out = LaurentPolynomial({0: 1})
    for k in range(1, n + 1):
        out = out * q_integer(k, d)
    return out


def q_binomial(m: int, n: int, d: int = 1) -> LaurentPolynomial:
    """[m+n]! / ([m]! [n]!) as a Laurent polynomial (exact division)."""
    if m < 0 or n < 0:
        raise ValueError("q-binomial needs nonnegative arguments")
    quot = RationalFunction(q_factorial(m + n, d)) / (RationalFunction(q_factorial(m, d)) * RationalFunction(q_factorial(n, d)))
    if not quot.is_laurent():
        raise ArithmeticError("q-binomial is not a Laurent polynomial")
    return quot.numerator


@lru_cache(maxsize=None)
def qint(n: int, d: int = 1) -> RationalFunction:
    return RationalFunction.from_laurent(q_integer(n, d))


@lru_cache(maxsize=None)
def qfact(n: int, d: int = 1) -> RationalFunction:
    return RationalFunction.from_laurent(q_factorial(n, d))


# ---------------------------------------------------------------------------
# text rendering and parsing


def _render_coeff(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _render_terms(terms: Mapping[int, Fraction]) -> str:
    if not terms:
        return "0"
    parts = []
    for i, k in enumerate(sorted(terms, reverse=True)):
        c = terms[k]
        neg = c < 0
        a = -c if neg else c
        if k == 0:
            body = _render_coeff(a)
        else:
            mono = "q" if k == 1 else f"q^{k}"
            body = mono if a == 1 else f"{_render_coeff(a)}*{mono}"
        if i == 0:
            parts.append(("-" if neg else "") + body)
        else:
            parts.append((" - " if neg else " + ") + body)
    return "".join(parts)


def render(f: RationalFunction) -> str:
    """Canonical text: ``N`` or ``(N)/(D)``, exponents descending."""
    f = _coerce(f)
    num = _render_terms(f.numerator._terms)
    if f.is_laurent():
        return num
    return f"({num})/({_render_terms(f.denominator._terms)})"


_TOKEN = re.compile(r"\s*(?:(\d+)|(q)|([-+*/^()]))")


def _tokenize(text: str):
    pos = 0
    toks = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            j = pos
            while j < len(text) and text[j].isspace():
                j += 1
            raise ParseError(f"unexpected character {text[j]!r}", text, j)
        start = m.start(m.lastindex)
        if m.group(1):
            toks.append(("num", int(m.group(1)), start))
        elif m.group(2):
            toks.append(("q", None, start))
        else:
            toks.append((m.group(3), None, start))
        pos = m.end()
    toks.append(("end", None, len(text)))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i][0]

    def take(self, kind=None):
        tok = self.toks[self.i]
        if kind is not None and tok[0] != kind:
            raise ParseError(f"expected {kind!r}, found {tok[0]!r}", self.text, tok[2])
        self.i += 1
        return tok

    def expr(self):
        val = self.term()
        while self.peek() in ("+", "-"):
            op = self.take()[0]
            rhs = self.term()
            val = val + rhs if op == "+" else val - rhs
        return val

    def term(self):
        val = self.unary()
        while self.peek() in ("*", "/"):
            op, _, pos = self.take()
            rhs = self.unary()
            if op == "*":
                val = val * rhs
            else:
                if rhs.is_zero():
                    raise ParseError("division by zero", self.text, pos)
                val = val / rhs
        return val

    def unary(self):
        if self.peek() == "-":
            self.take()
            return -self.unary()
        if self.peek() == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek() == "^":
            _, _, pos = self.take()
            sign = 1
            if self.peek() in ("-", "+"):
                sign = -1 if self.take()[0] == "-" else 1
            tok = self.take("num")
            n = sign * tok[1]
            if n < 0 and base.is_zero():
                raise ParseError("negative power of zero", self.text, pos)
            base = base ** n
        return base

    def atom(self):
        kind, val, pos = self.toks[self.i]
        if kind == "num":
            self.i += 1
            return _coerce(val)
        if kind == "q":
            self.i += 1
            return Q
        if kind == "(":
            self.i += 1
            v = self.expr()
            self.take(")")
            return v
        raise ParseError(f"unexpected token {kind!r}", self.text, pos)


def parse(text: str) -> RationalFunction:
    """Parse a rational expression in q (inverse of :func:`render`)."""
    p = _Parser(text)
    if p.peek() == "end":
        raise ParseError("empty expression", text, 0)
    val = p.expr()
    if p.peek() != "end":
        raise ParseError(f"trailing input {p.peek()!r}", text, p.toks[p.i][2])
    return val


def to_rf(x) -> RationalFunction:
    return _coerce(x)


def product(values: Iterable[RationalFunction]) -> RationalFunction:
    out = ONE
    for v in values:
        out = out * v
    return out
