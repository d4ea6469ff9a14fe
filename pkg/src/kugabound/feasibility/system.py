"""Exact linear systems over the rationals and Fourier-Motzkin elimination.

A system is a list of constraints ``expr >= 0``, ``expr > 0`` or ``expr == 0``.
:func:`fourier_motzkin` always decides it and returns a :class:`Certificate`:
either a rational point satisfying every constraint, or nonnegative
multipliers whose combination collapses to a false constant relation.  Both
are re-checked by substitution before they are returned.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from ..exact import LinearExpr, as_rational, format_rational, variable_sort_key


class Relation(str, Enum):
    GE = ">="
    GT = ">"
    EQ = "=="


class SystemDefinitionError(ValueError):
    pass


class CertificateError(AssertionError):
    """A certificate failed exact re-verification."""


@dataclass(frozen=True)
class Constraint:
    expr: LinearExpr
    relation: Relation
    label: str = ""

    def holds_at(self, point: Mapping[str, Fraction]) -> bool:
        value = self.expr.evaluate(point)
        if self.relation is Relation.GE:
            return value >= 0
        if self.relation is Relation.GT:
            return value > 0
        return value == 0

    def __str__(self):
        return f"{self.expr} {self.relation.value} 0"


def ge(lhs, rhs=0, label: str = "") -> Constraint:
    return Constraint(_difference(lhs, rhs), Relation.GE, label)


def gt(lhs, rhs=0, label: str = "") -> Constraint:
    return Constraint(_difference(lhs, rhs), Relation.GT, label)


def eq(lhs, rhs=0, label: str = "") -> Constraint:
    return Constraint(_difference(lhs, rhs), Relation.EQ, label)


def _difference(lhs, rhs) -> LinearExpr:
    if type(rhs) is int and rhs == 0:
        return _as_expr(lhs)
    return _as_expr(lhs) - _as_expr(rhs)


def _as_expr(value) -> LinearExpr:
    if type(value) is LinearExpr:
        return value
    if isinstance(value, str):
        return LinearExpr.var(value)
    return LinearExpr.const(as_rational(value))


@dataclass(frozen=True)
class LinearSystem:
    variables: tuple[str, ...]
    constraints: tuple[Constraint, ...]

    def __post_init__(self):
        declared = set(self.variables)
        if len(declared) != len(self.variables):
            raise SystemDefinitionError("duplicate variable declaration")
        for c in self.constraints:
            missing = [v for v in c.expr.variables() if v not in declared]
            if missing:
                raise SystemDefinitionError(f"constraint {c.label or c} uses undeclared {missing}")

    @classmethod
    def of(cls, constraints: Iterable[Constraint], variables: Sequence[str] | None = None):
        constraints = tuple(constraints)
        if variables is None:
            seen = {}
            for c in constraints:
                for v in c.expr.variables():
                    seen.setdefault(v, None)
            variables = sorted(seen, key=variable_sort_key)
        return cls(tuple(variables), constraints)

    def with_constraints(self, *extra: Constraint) -> "LinearSystem":
        return LinearSystem(self.variables, self.constraints + tuple(extra))

    def find(self, label: str) -> list[Constraint]:
        return [c for c in self.constraints if c.label == label or c.label.startswith(label + " ")]

    def is_satisfied_by(self, point: Mapping[str, Fraction]) -> bool:
        return all(c.holds_at(point) for c in self.constraints)

    def describe(self) -> str:
        lines = [f"variables: {', '.join(self.variables)}"]
        for n, c in enumerate(self.constraints):
            lines.append(f"  [{n}] {c}" + (f"    # {c.label}" if c.label else ""))
        return "\n".join(lines)


@dataclass(frozen=True)
class RefutationStep:
    index: int
    label: str
    expr: LinearExpr
    strict: bool
    multiplier: Fraction
    equality: bool = False


@dataclass(frozen=True)
class Certificate:
    verdict: str
    witness: Mapping[str, Fraction] | None = None
    refutation: tuple[RefutationStep, ...] | None = None
    elimination_order: tuple[str, ...] = field(default=(), compare=False)

    @property
    def feasible(self) -> bool:
        return self.verdict == "feasible"

    def combination(self) -> tuple[LinearExpr, bool]:
        """Sum of the weighted refutation rows and whether it is strict."""
        if self.refutation is None:
            raise ValueError("feasible certificates have no refutation")
        total = LinearExpr.sum(s.expr * s.multiplier for s in self.refutation)
        return total, any(s.strict for s in self.refutation)

    def verify(self, system: LinearSystem) -> None:
        if self.verdict == "feasible":
            _verify_witness(system, self.witness)
        elif self.verdict == "infeasible":
            _verify_refutation(system, self.refutation)
        else:
            raise CertificateError(f"unknown verdict {self.verdict!r}")

    def to_dict(self) -> dict:
        out: dict = {"verdict": self.verdict}
        if self.witness is not None:
            out["witness"] = {k: format_rational(v)
                              for k, v in sorted(self.witness.items(), key=lambda kv: variable_sort_key(kv[0]))}
        if self.refutation is not None:
            out["refutation"] = [
                {"constraint": s.index, "label": s.label, "row": str(s.expr),
                 "relation": "==" if s.equality else (">" if s.strict else ">="),
                 "multiplier": format_rational(s.multiplier)}
                for s in self.refutation
            ]
            total, strict = self.combination()
            out["combination"] = f"{total} {'>' if strict else '>='} 0"
        return out

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        tag = hashlib.sha256(blob.encode()).hexdigest()[:12]
        if self.feasible:
            nonzero = sum(1 for v in self.witness.values() if v)
            return f"witness/{nonzero}nz/{tag}"
        return f"refutation/{len(self.refutation)}rows/{tag}"


def _verify_witness(system: LinearSystem, witness) -> None:
    if witness is None:
        raise CertificateError("feasible verdict without a witness")
    missing = [v for v in system.variables if v not in witness]
    if missing:
        raise CertificateError(f"witness leaves {missing} unassigned")
    for n, c in enumerate(system.constraints):
        if not c.holds_at(witness):
            raise CertificateError(f"witness violates constraint [{n}] {c.label}: {c}")


def _verify_refutation(system: LinearSystem, steps) -> None:
    if not steps:
        raise CertificateError("infeasible verdict without refutation rows")
    for s in steps:
        if s.multiplier <= 0:
            raise CertificateError(f"non-positive multiplier on row {s.index}")
        if not 0 <= s.index < len(system.constraints):
            raise CertificateError(f"row {s.index} names no constraint of the system")
        c = system.constraints[s.index]
        if s.equality != (c.relation is Relation.EQ):
            raise CertificateError(f"row {s.index} misreports whether its constraint is an equality")
        if s.expr != c.expr and not (s.equality and s.expr == -c.expr):
            raise CertificateError(f"row {s.index} is not a consequence of constraint {c.label}")
        if s.strict != (c.relation is Relation.GT):
            raise CertificateError(f"row {s.index} strictness does not match its constraint")
    total = LinearExpr.sum(s.expr * s.multiplier for s in steps)
    if not total.is_constant():
        raise CertificateError(f"refutation leaves variables {total.variables()}")
    strict = any(s.strict for s in steps)
    c = total.constant
    if not (c < 0 or (c == 0 and strict)):
        raise CertificateError(f"refutation combines to {format_rational(c)} {'>' if strict else '>='} 0, which is true")


# -- elimination ------------------------------------------------------------
#
# Internally a row is ``sum(coeffs[v] * v) + const`` with a primitive integer
# coefficient vector, so combining rows is integer arithmetic.  Each row
# remembers how it was derived; the multipliers of a refutation are rebuilt
# exactly from that derivation only once a contradiction is found.

class _Row:
    __slots__ = ("coeffs", "const", "strict", "support", "origin")

    def __init__(self, coeffs, const, strict, support, origin):
        self.coeffs = coeffs
        self.const = const
        self.strict = strict
        # inequality constraints contributing to the row (Chernikov's index set)
        self.support = support
        # ("base", n, k): row = k * constraint n;  ("lin", parts, div): row = sum(w * r) / div
        self.origin = origin

    def contradictory(self) -> bool:
        return not self.coeffs and (self.const < 0 or (self.const == 0 and self.strict))

    def trivial(self) -> bool:
        return not self.coeffs and not self.contradictory()


def _make(coeffs: dict, const: int, strict: bool, support: frozenset, parts) -> _Row:
    g = abs(const)
    for v in coeffs.values():
        g = math.gcd(g, v)
    if g > 1:
        coeffs = {k: v // g for k, v in coeffs.items()}
        const //= g
    else:
        g = 1
    return _Row(coeffs, const, strict, support, ("lin", parts, g))


def _combine(p: _Row, n: _Row, var: str) -> _Row:
    a, b = p.coeffs[var], -n.coeffs[var]
    pc, nc = p.coeffs, n.coeffs
    coeffs = {}
    for k, v in pc.items():
        if k != var:
            coeffs[k] = b * v
    for k, v in nc.items():
        if k != var:
            coeffs[k] = coeffs.get(k, 0) + a * v
    coeffs = {k: v for k, v in coeffs.items() if v}
    return _make(coeffs, b * p.const + a * n.const, p.strict or n.strict,
                 p.support | n.support, ((b, p), (a, n)))


def _substitute(row: _Row, var: str, pivot: _Row) -> _Row:
    # row is an inequality or equality, pivot an equality containing var
    c = row.coeffs.get(var)
    if c is None:
        return row
    a = pivot.coeffs[var]
    wr, wp = abs(a), -c if a > 0 else c
    coeffs = {k: wr * v for k, v in row.coeffs.items()}
    for k, v in pivot.coeffs.items():
        coeffs[k] = coeffs.get(k, 0) + wp * v
    coeffs = {k: v for k, v in coeffs.items() if v}
    return _make(coeffs, wr * row.const + wp * pivot.const, row.strict,
                 row.support | pivot.support, ((wr, row), (wp, pivot)))


def _multipliers(row: _Row) -> dict[int, Fraction]:
    """Exact weights of the original constraints that sum to ``row``."""
    # each node maps to (integer weights, common denominator)
    memo: dict[int, tuple[dict[int, int], int]] = {}
    order = []
    seen = set()
    stack = [(row, False)]
    while stack:
        r, expanded = stack.pop()
        if expanded:
            order.append(r)
            continue
        if id(r) in seen:
            continue
        seen.add(id(r))
        stack.append((r, True))
        if r.origin[0] == "lin":
            stack.extend((sub, False) for _, sub in r.origin[1] if id(sub) not in seen)
    for r in order:
        if r.origin[0] == "base":
            _, n, k = r.origin
            memo[id(r)] = ({n: k.numerator}, k.denominator)
            continue
        _, parts, div = r.origin
        den = 1
        for _, sub in parts:
            d = memo[id(sub)][1]
            den = den * d // math.gcd(den, d)
        out: dict[int, int] = {}
        for w, sub in parts:
            h, d = memo[id(sub)]
            f = w * (den // d)
            for n, m in h.items():
                out[n] = out.get(n, 0) + f * m
        out = {n: m for n, m in out.items() if m}
        den *= div
        g = den
        for m in out.values():
            g = math.gcd(g, m)
        if g > 1:
            out = {n: m // g for n, m in out.items()}
            den //= g
        memo[id(r)] = (out, den)
    h, den = memo[id(row)]
    return {n: Fraction(m, den) for n, m in h.items()}


def _prune(rows: list[_Row], eliminated: int) -> list[_Row]:
    # Chernikov: after k eliminations a row built from more than k+1 inequality
    # rows is implied by the others.  Equalities are substituted away first and
    # do not count towards either side.
    limit = eliminated + 1
    best: dict = {}
    for r in rows:
        if len(r.support) > limit or r.trivial():
            continue
        gc = 0
        for v in r.coeffs.values():
            gc = math.gcd(gc, v)
        key = tuple(sorted((k, v // gc) for k, v in r.coeffs.items()))
        cur = best.get(key)
        if cur is None or _stronger(r, gc, *cur):
            best[key] = (r, gc)
    return [r for r, _ in best.values()]


def _stronger(r: _Row, rg: int, s: _Row, sg: int) -> bool:
    # same direction; compare constants per unit of the primitive direction
    a, b = r.const * sg, s.const * rg
    if a != b:
        return a < b
    if r.strict != s.strict:
        return r.strict
    return len(r.support) < len(s.support)


def _base_row(n: int, c: Constraint) -> _Row:
    terms = c.expr.terms
    lcm = c.expr.constant.denominator
    for v in terms.values():
        lcm = lcm * v.denominator // math.gcd(lcm, v.denominator)
    if lcm == 1:
        coeffs = {k: v.numerator for k, v in terms.items()}
        const = c.expr.constant.numerator
    else:
        coeffs = {k: (v.numerator * lcm) // v.denominator for k, v in terms.items()}
        const = (c.expr.constant.numerator * lcm) // c.expr.constant.denominator
    g = abs(const)
    for v in coeffs.values():
        g = math.gcd(g, v)
    if g > 1:
        coeffs = {k: v // g for k, v in coeffs.items()}
        const //= g
    k = Fraction(lcm, g or 1)
    support = frozenset() if c.relation is Relation.EQ else frozenset((n,))
    return _Row(coeffs, const, c.relation is Relation.GT, support, ("base", n, k))


def _choose(rows: list[_Row], candidates: set[str]) -> str:
    pos: dict[str, int] = {}
    neg: dict[str, int] = {}
    for r in rows:
        for k, v in r.coeffs.items():
            if k in candidates:
                if v > 0:
                    pos[k] = pos.get(k, 0) + 1
                else:
                    neg[k] = neg.get(k, 0) + 1
    present = pos.keys() | neg.keys()
    if not present:
        return min(candidates, key=variable_sort_key)

    def cost(k):
        p, m = pos.get(k, 0), neg.get(k, 0)
        return (p * m - p - m, variable_sort_key(k))

    return min(present, key=cost)


def _false_equality(row: _Row) -> _Row:
    # ``0 == c`` with c != 0, oriented so that it reads ``0 >= negative``
    if row.const > 0:
        return _Row({}, -row.const, False, row.support, ("lin", ((-1, row),), 1))
    return row


class _Elimination:
    def __init__(self, rows, equalities, stages, contradiction):
        self.rows = rows
        self.equalities = equalities
        self.stages = stages
        self.contradiction = contradiction


def _eliminate(system: LinearSystem, keep: frozenset[str] = frozenset()) -> _Elimination:
    rows, eqs = [], []
    for n, c in enumerate(system.constraints):
        (eqs if c.relation is Relation.EQ else rows).append(_base_row(n, c))
    stages: list[tuple[str, list[_Row], bool]] = []
    remaining = {v for v in system.variables if v not in keep}

    # equalities: exact substitution
    kept_eqs = []
    while eqs:
        e = eqs.pop(0)
        if not e.coeffs:
            if e.const != 0:
                return _Elimination(rows, kept_eqs, stages, _false_equality(e))
            continue
        pivots = [k for k in e.coeffs if k in remaining]
        if not pivots:
            kept_eqs.append(e)
            continue
        var = min(pivots, key=variable_sort_key)
        remaining.discard(var)
        stages.append((var, [e], True))
        eqs = [_substitute(r, var, e) if var in r.coeffs else r for r in eqs]
        kept_eqs = [_substitute(r, var, e) if var in r.coeffs else r for r in kept_eqs]
        rows = [_substitute(r, var, e) if var in r.coeffs else r for r in rows]

    for r in rows:
        if r.contradictory():
            return _Elimination(rows, kept_eqs, stages, r)
    count = 0
    rows = _prune(rows, count)
    while remaining:
        var = _choose(rows, remaining)
        remaining.discard(var)
        pos = [r for r in rows if r.coeffs.get(var, 0) > 0]
        neg = [r for r in rows if r.coeffs.get(var, 0) < 0]
        rest = [r for r in rows if var not in r.coeffs]
        stages.append((var, pos + neg, False))
        new = [_combine(p, n, var) for p in pos for n in neg]
        for r in new:
            if r.contradictory():
                return _Elimination(rows, kept_eqs, stages, r)
        count += 1
        rows = _prune(rest + new, count)
    return _Elimination(rows, kept_eqs, stages, None)


def _refutation(system: LinearSystem, row: _Row) -> tuple[RefutationStep, ...]:
    weights = _multipliers(row)
    # present the weights as coprime integers
    lcm, g = 1, 0
    for m in weights.values():
        lcm = lcm * m.denominator // math.gcd(lcm, m.denominator)
        g = math.gcd(g, m.numerator)
    scale = Fraction(lcm, g)
    steps = []
    for n in sorted(weights):
        m = weights[n] * scale
        c = system.constraints[n]
        if m < 0 and c.relation is not Relation.EQ:
            raise CertificateError(f"negative weight on inequality {c.label}")
        expr = c.expr if m > 0 else -c.expr
        steps.append(RefutationStep(n, c.label, expr, c.relation is Relation.GT, abs(m),
                                    c.relation is Relation.EQ))
    return tuple(steps)


def _back_substitute(system: LinearSystem, stages) -> dict[str, Fraction]:
    values: dict[str, Fraction] = {}
    for var, rows, is_equality in reversed(stages):
        if is_equality:
            (e,) = rows
            rest = e.const + sum(c * values[k] for k, c in e.coeffs.items() if k != var)
            values[var] = Fraction(-rest) / e.coeffs[var]
            continue
        lo = hi = None
        lo_open = hi_open = False
        for r in rows:
            a = r.coeffs[var]
            rest = r.const + sum(c * values[k] for k, c in r.coeffs.items() if k != var)
            bound = Fraction(-rest) / a
            if a > 0:
                if lo is None or bound > lo or (bound == lo and r.strict):
                    lo, lo_open = bound, r.strict
            else:
                if hi is None or bound < hi or (bound == hi and r.strict):
                    hi, hi_open = bound, r.strict
        values[var] = simplest_between(lo, hi, lo_open, hi_open)
    for v in system.variables:
        values.setdefault(v, Fraction(0))
    return values


def fourier_motzkin(system: LinearSystem) -> Certificate:
    """Decide ``system`` exactly and return a verified certificate."""
    run = _eliminate(system)
    order = tuple(v for v, _, _ in run.stages)
    if run.contradiction is not None:
        cert = Certificate("infeasible", refutation=_refutation(system, run.contradiction),
                           elimination_order=order)
    else:
        cert = Certificate("feasible", witness=_back_substitute(system, run.stages),
                           elimination_order=order)
    cert.verify(system)
    return cert


def project(system: LinearSystem, keep: Iterable[str]) -> LinearSystem:
    """Constraints on ``keep`` implied by the system (the projection).

    If the system is infeasible the result contains a single false constant
    constraint.
    """
    keep = frozenset(keep)
    run = _eliminate(system, keep)
    out = []
    if run.contradiction is not None:
        r = run.contradiction
        out.append(Constraint(LinearExpr.const(r.const), Relation.GT if r.strict else Relation.GE,
                              "projected"))
    else:
        for r in run.rows:
            out.append(Constraint(LinearExpr(r.coeffs, r.const),
                                  Relation.GT if r.strict else Relation.GE, "projected"))
        for r in run.equalities:
            out.append(Constraint(LinearExpr(r.coeffs, r.const), Relation.EQ, "projected"))
    out.sort(key=lambda c: (str(c.expr), c.relation.value))
    return LinearSystem.of(out, sorted(keep, key=variable_sort_key))


def implies(system: LinearSystem, consequence: Constraint) -> bool:
    """Whether every solution of ``system`` satisfies ``consequence``.

    Decided by refuting the system together with the negated consequence.
    """
    e = consequence.expr
    if consequence.relation is Relation.EQ:
        return (implies(system, Constraint(e, Relation.GE))
                and implies(system, Constraint(-e, Relation.GE)))
    negated_rel = Relation.GE if consequence.relation is Relation.GT else Relation.GT
    negated = Constraint(-e, negated_rel, "negated consequence")
    return not fourier_motzkin(system.with_constraints(negated)).feasible


# -- witness selection ------------------------------------------------------

def simplest_between(lo: Fraction | None, hi: Fraction | None,
                     lo_open: bool = False, hi_open: bool = False) -> Fraction:
    """Rational of least denominator in the interval, nearest zero on ties.

    ``None`` marks an unbounded side.  Raises ``ValueError`` on an empty
    interval.
    """
    if lo is not None and hi is not None:
        if lo > hi or (lo == hi and (lo_open or hi_open)):
            raise ValueError(f"empty interval between {lo} and {hi}")
        if lo == hi:
            return Fraction(lo)
    if (lo is None or lo < 0 or (lo == 0 and not lo_open)) and (hi is None or hi > 0 or (hi == 0 and not hi_open)):
        return Fraction(0)
    if hi is not None and hi <= 0:
        # mirror into the positive half-line
        return -simplest_between(-hi, None if lo is None else -lo, hi_open, lo_open)
    candidates = [_simplest_open(Fraction(lo), None if hi is None else Fraction(hi))]
    if not lo_open:
        candidates.append(Fraction(lo))
    if hi is not None and not hi_open:
        candidates.append(Fraction(hi))
    candidates = [c for c in candidates if c is not None]
    return min(candidates, key=lambda c: (c.denominator, abs(c), c < 0))


def _simplest_open(lo: Fraction, hi: Fraction | None) -> Fraction | None:
    """Simplest rational strictly between ``0 <= lo < hi`` (hi may be None)."""
    if hi is not None and hi <= lo:
        return None
    fl = lo.numerator // lo.denominator
    if hi is None or fl + 1 < hi:
        return Fraction(fl + 1)
    # lo and hi share the integer part fl: recurse on reciprocals of the fractional parts
    lo_frac, hi_frac = lo - fl, hi - fl
    inner_lo = 1 / hi_frac
    inner_hi = None if lo_frac == 0 else 1 / lo_frac
    return fl + 1 / _simplest_open(inner_lo, inner_hi)
