"""Exact scalars: rationals plus sums of rational multiples of square roots.

Positions and times are ``Fraction`` values. Waiting times of RNZ with an
irrational competitive factor involve square roots, so those are
represented by :class:`Surd`. A ``Surd`` with no irrational part is always
collapsed back to a ``Fraction``. Different radicands may be mixed (an
instance built against one factor can be replayed under another).
"""
from __future__ import annotations

import ast
import math
from fractions import Fraction
from typing import Union

Scalar = Union[Fraction, "Surd"]

ZERO = Fraction(0)
ONE = Fraction(1)


def _squarefree(n: int) -> tuple[int, int]:
    """Split ``n > 0`` as ``k*k*m`` with ``m`` squarefree; returns ``(k, m)``."""
    k, m = 1, n
    f = 2
    while f * f <= m:
        while m % (f * f) == 0:
            m //= f * f
            k *= f
        f += 1
    return k, m


def _as_fraction(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int):
        return Fraction(v)
    raise TypeError(f"not an exact rational: {v!r}")


def _primes(m: int) -> list[int]:
    out, f = [], 2
    while f * f <= m:
        if m % f == 0:
            out.append(f)
            m //= f
        f += 1
    if m > 1:
        out.append(m)
    return out


def _make(terms: dict[int, Fraction]) -> Scalar:
    terms = {m: c for m, c in terms.items() if c != 0}
    if not terms:
        return ZERO
    if set(terms) == {1}:
        return terms[1]
    return Surd(terms)


def surd(a, b, d: int) -> Scalar:
    """``a + b*sqrt(d)`` for an integer ``d >= 0``."""
    a, b = _as_fraction(a), _as_fraction(b)
    if b == 0 or d == 0:
        return a
    k, m = _squarefree(d)
    return _make({1: a, m: b * k} if m != 1 else {1: a + b * k})


def _terms(v) -> dict[int, Fraction] | None:
    if isinstance(v, Surd):
        return v.terms
    if isinstance(v, (int, Fraction)):
        return {1: Fraction(v)}
    return None


class Surd:
    """A finite sum of rational multiples of square roots of squarefree integers.

    ``terms`` maps each squarefree radicand (1 for the rational part) to a
    non-zero coefficient. Square roots of distinct squarefree integers are
    linearly independent over the rationals, so this form is canonical and
    equality is coefficient-wise. The common case is a single radicand,
    ``a + b*sqrt(d)``.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: dict[int, Fraction]):
        self.terms = dict(sorted(terms.items()))

    @property
    def a(self) -> Fraction:
        return self.terms.get(1, ZERO)

    @property
    def radicands(self) -> tuple[int, ...]:
        return tuple(m for m in self.terms if m != 1)

    def __add__(self, other):
        o = _terms(other)
        if o is None:
            return NotImplemented
        out = dict(self.terms)
        for m, c in o.items():
            out[m] = out.get(m, ZERO) + c
        return _make(out)

    __radd__ = __add__

    def __neg__(self):
        return Surd({m: -c for m, c in self.terms.items()})

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = _terms(other)
        if o is None:
            return NotImplemented
        return self + _make({m: -c for m, c in o.items()})

    def __rsub__(self, other):
        o = _terms(other)
        if o is None:
            return NotImplemented
        return _make(o) + (-self)

    def __mul__(self, other):
        o = _terms(other)
        if o is None:
            return NotImplemented
        out: dict[int, Fraction] = {}
        for m, c in self.terms.items():
            for n, e in o.items():
                g = math.gcd(m, n)
                key = (m // g) * (n // g)
                out[key] = out.get(key, ZERO) + c * e * g
        return _make(out)

    __rmul__ = __mul__

    def _split(self) -> tuple[int, Scalar, Scalar]:
        """``self = u + v*sqrt(p)`` with ``u, v`` free of the largest prime ``p`` present."""
        p = max(q for m in self.radicands for q in _primes(m))
        u, v = {}, {}
        for m, c in self.terms.items():
            if m % p:
                u[m] = c
            else:
                v[m // p] = c
        return p, _make(u), _make(v)

    def _inverse(self) -> Scalar:
        # (u + v*sqrt(p)) * (u - v*sqrt(p)) = u^2 - p*v^2, one prime fewer
        p, u, v = self._split()
        return (u - v * surd(0, 1, p)) / (u * u - p * v * v)

    def __truediv__(self, other):
        if isinstance(other, Surd):
            return self * other._inverse()
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by zero")
            return _make({m: c / other for m, c in self.terms.items()})
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self._inverse() * other
        return NotImplemented

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def sign(self) -> int:
        p, u, v = self._split()
        su, sv = _sign(u), _sign(v)
        if su == 0 or su == sv:
            return sv
        if sv == 0:
            return su
        # opposite signs: compare u^2 with p*v^2
        return su * _sign(u * u - p * v * v)

    def _cmp(self, other) -> int:
        return _sign(self - other)

    def __eq__(self, other):
        o = _terms(other)
        if o is None:
            return NotImplemented
        return self.terms == {m: c for m, c in o.items() if c != 0}

    def __lt__(self, other):
        if _terms(other) is None:
            return NotImplemented
        return self._cmp(other) < 0

    def __le__(self, other):
        if _terms(other) is None:
            return NotImplemented
        return self._cmp(other) <= 0

    def __gt__(self, other):
        if _terms(other) is None:
            return NotImplemented
        return self._cmp(other) > 0

    def __ge__(self, other):
        if _terms(other) is None:
            return NotImplemented
        return self._cmp(other) >= 0

    def __hash__(self):
        return hash(tuple(self.terms.items()))

    def __float__(self):
        return math.fsum(float(c) * math.sqrt(m) for m, c in self.terms.items())

    def __repr__(self):
        return f"Surd({fmt(self)})"

    __str__ = __repr__


def _sign(v) -> int:
    if isinstance(v, Surd):
        return v.sign()
    return (v > 0) - (v < 0)


def sqrt(v) -> Scalar:
    """Exact square root of a non-negative rational."""
    q = _as_fraction(v)
    if q < 0:
        raise ValueError("square root of a negative number")
    num, den = q.numerator, q.denominator
    # sqrt(n/d) = sqrt(n*d)/d
    k, m = _squarefree(num * den) if num else (0, 1)
    return surd(ZERO, Fraction(k, den), m) if m != 1 else Fraction(k, den)


def is_exact(v) -> bool:
    return isinstance(v, (int, Fraction, Surd))


def fmt(v) -> str:
    """Canonical text: ``p/q`` in lowest terms, or ``a+b*sqrt(d)``."""
    if isinstance(v, Surd):
        parts = []
        for m, c in v.terms.items():
            text = fmt(c) if m == 1 else f"{fmt(c)}*sqrt({m})"
            parts.append(text if not parts or c < 0 else "+" + text)
        return "".join(parts)
    q = _as_fraction(v)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def _eval(node, src: str) -> Scalar:
    if isinstance(node, ast.Expression):
        return _eval(node.body, src)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
        # decimals are reparsed from the source text so 0.1 stays exactly 1/10
        return Fraction(ast.get_source_segment(src, node))
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        v = _eval(node.operand, src)
        return -v if isinstance(node.op, ast.USub) else v
    if isinstance(node, ast.BinOp) and isinstance(node.op, (ast.Add, ast.Sub, ast.Mult, ast.Div)):
        lhs, rhs = _eval(node.left, src), _eval(node.right, src)
        if isinstance(node.op, ast.Add):
            return lhs + rhs
        if isinstance(node.op, ast.Sub):
            return lhs - rhs
        if isinstance(node.op, ast.Mult):
            return lhs * rhs
        if rhs == 0:
            raise ZeroDivisionError(f"division by zero in {src!r}")
        return lhs / rhs
    if (
        isinstance(node, ast.Call)
        and isinstance(node.func, ast.Name)
        and node.func.id == "sqrt"
        and len(node.args) == 1
    ):
        return sqrt(_eval(node.args[0], src))
    raise ValueError(f"unsupported scalar expression: {src!r}")


def parse(text) -> Scalar:
    """Parse ``"3"``, ``"-1/1000"``, ``"0.25"``, ``"1e-6"`` or ``"(9+sqrt(177))/16"``."""
    if isinstance(text, (int, Fraction, Surd)):
        return Fraction(text) if isinstance(text, int) else text
    src = str(text).strip()
    try:
        return Fraction(src)
    except ValueError:
        pass
    try:
        tree = ast.parse(src, mode="eval")
    except SyntaxError as exc:
        raise ValueError(f"cannot parse scalar {src!r}") from exc
    return _eval(tree, src)
