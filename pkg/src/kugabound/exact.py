"""Exact rational arithmetic and linear expressions over named variables.

Every invariant in this package is a :class:`fractions.Fraction`; there is no
floating point path anywhere.  ``Rational`` is an alias kept so call sites read
as the domain does.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational as _AbstractRational
from types import MappingProxyType
from typing import Iterable, Mapping, Union

Rational = Fraction

Number = Union[int, Fraction]


def rational(num: int, den: int = 1) -> Fraction:
    """Build a canonical rational ``num/den``.

    >>> rational(6, 28)
    Fraction(3, 14)
    >>> rational(-2, -4)
    Fraction(1, 2)
    """
    if isinstance(num, bool) or isinstance(den, bool):
        raise TypeError("rational() takes integers, not booleans")
    if not isinstance(num, int) or not isinstance(den, int):
        raise TypeError("rational() takes integer numerator and denominator")
    if den == 0:
        raise ZeroDivisionError(f"rational({num}, 0): zero denominator")
    return Fraction(num, den)


def as_rational(value) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings; reject floats."""
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rational(value)
    if isinstance(value, _AbstractRational):
        return Fraction(value.numerator, value.denominator)
    raise TypeError(f"cannot use {type(value).__name__} {value!r} as an exact rational")


def parse_rational(text: str) -> Fraction:
    """Parse the wire form ``"p/q"`` or ``"p"``."""
    raw = text.strip()
    num, sep, den = raw.partition("/")
    try:
        p = int(num)
        q = int(den) if sep else 1
    except ValueError:
        raise ValueError(f"not a rational literal: {text!r}") from None
    return rational(p, q)


def format_rational(value: Number) -> str:
    """Wire form: ``"p/q"``, with ``q`` omitted when it is 1."""
    value = as_rational(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def vname(kind: str, index: int | None = None) -> str:
    """Structured variable name, e.g. ``vname("delta", 2) == "delta[2]"``."""
    return kind if index is None else f"{kind}[{index}]"


class EvaluationError(KeyError):
    """A variable of the expression has no value in the assignment."""


class LinearExpr:
    """Immutable ``constant + sum(coeff * var)`` with exact coefficients.

    Zero coefficients are never stored, so two expressions are equal exactly
    when they denote the same affine function.
    """

    __slots__ = ("_terms", "_constant", "_hash")

    def __init__(self, terms: Mapping[str, Number] | None = None, constant: Number = 0):
        clean = {}
        for name, coeff in (terms or {}).items():
            c = as_rational(coeff)
            if c:
                clean[name] = c
        self._terms = clean
        self._constant = as_rational(constant)
        self._hash = None

    @classmethod
    def _clean(cls, terms: dict, constant: Fraction) -> "LinearExpr":
        # terms and constant already exact; only zero coefficients are dropped
        e = object.__new__(cls)
        e._terms = {k: v for k, v in terms.items() if v}
        e._constant = constant
        e._hash = None
        return e

    @classmethod
    def var(cls, name: str, coeff: Number = 1) -> "LinearExpr":
        return cls._clean({name: as_rational(coeff)}, Fraction(0))

    @classmethod
    def const(cls, value: Number) -> "LinearExpr":
        return cls(None, value)

    @classmethod
    def sum(cls, exprs: Iterable["LinearExpr"]) -> "LinearExpr":
        terms: dict[str, Fraction] = {}
        constant = Fraction(0)
        for e in exprs:
            for name, c in e._terms.items():
                terms[name] = terms.get(name, 0) + c
            constant += e._constant
        return cls._clean(terms, constant)

    @property
    def terms(self) -> Mapping[str, Fraction]:
        return MappingProxyType(self._terms)

    @property
    def constant(self) -> Fraction:
        return self._constant

    def variables(self) -> tuple[str, ...]:
        return tuple(self._terms)

    def coeff(self, name: str) -> Fraction:
        return self._terms.get(name, Fraction(0))

    def is_constant(self) -> bool:
        return not self._terms

    def evaluate(self, assignment: Mapping[str, Number]) -> Fraction:
        total = self._constant
        for name, c in self._terms.items():
            try:
                value = assignment[name]
            except KeyError:
                raise EvaluationError(f"no value for variable {name!r}") from None
            total += c * as_rational(value)
        return total

    def substitute(self, name: str, replacement: "LinearExpr") -> "LinearExpr":
        c = self._terms.get(name)
        if c is None:
            return self
        rest = {k: v for k, v in self._terms.items() if k != name}
        return LinearExpr(rest, self._constant) + replacement * c

    def __add__(self, other):
        if not isinstance(other, LinearExpr):
            other = LinearExpr.const(as_rational(other))
        return LinearExpr.sum((self, other))

    __radd__ = __add__

    def __neg__(self):
        return LinearExpr._clean({k: -v for k, v in self._terms.items()}, -self._constant)

    def __sub__(self, other):
        if not isinstance(other, LinearExpr):
            other = LinearExpr.const(as_rational(other))
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, scalar):
        if isinstance(scalar, LinearExpr):
            if scalar.is_constant():
                scalar = scalar.constant
            elif self.is_constant():
                return scalar * self._constant
            else:
                raise TypeError("product of two non-constant expressions is not linear")
        s = as_rational(scalar)
        return LinearExpr._clean({k: v * s for k, v in self._terms.items()}, self._constant * s)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        s = as_rational(scalar)
        if s == 0:
            raise ZeroDivisionError("division of a linear expression by zero")
        return self * (1 / s)

    def __eq__(self, other):
        if isinstance(other, LinearExpr):
            return self._terms == other._terms and self._constant == other._constant
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return not self._terms and self._constant == other
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((frozenset(self._terms.items()), self._constant))
        return self._hash

    def __repr__(self):
        return f"LinearExpr({str(self)!r})"

    def __str__(self):
        parts = []
        for name in sorted(self._terms, key=_name_key):
            c = self._terms[name]
            mag = abs(c)
            body = name if mag == 1 else f"{format_rational(mag)}*{name}"
            parts.append(("-" if c < 0 else "+", body))
        if self._constant or not parts:
            parts.append(("-" if self._constant < 0 else "+", format_rational(abs(self._constant))))
        sign, body = parts[0]
        out = ("-" if sign == "-" else "") + body
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out


def _name_key(name: str):
    kind, _, rest = name.partition("[")
    if rest:
        try:
            return (kind, int(rest.rstrip("]")))
        except ValueError:
            pass
    return (kind, -1)


variable_sort_key = _name_key
