"""Closed-form equalities and inequalities among the invariants of a family.

All functions are exact.  Per-index arguments (``delta``, ``xi``) are mappings
from index to count; a plain sequence is read as indexed from 0, so
``delta[0]`` is the type-0 count and ``xi[0]`` the irreducible-node count.
Missing indices are zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, NamedTuple, Sequence, Union

from .exact import as_rational

Counts = Union[Mapping[int, object], Sequence[object], None]


class DomainError(ValueError):
    pass


def _counts(values: Counts, top: int, label: str, lowest: int = 0) -> dict[int, Fraction]:
    if values is None:
        return {}
    items = values.items() if isinstance(values, Mapping) else enumerate(values)
    out = {}
    for k, v in items:
        v = as_rational(v)
        if v == 0:
            continue
        if not lowest <= k <= top:
            raise DomainError(f"{label} index {k} outside {lowest}..{top}")
        if v < 0:
            raise DomainError(f"{label}[{k}] = {v} is negative")
        out[k] = v
    return out


def _check_genus(g: int) -> None:
    if g < 2:
        raise DomainError(f"genus must be >= 2, got {g}")


@dataclass(frozen=True)
class InequalityVerdict:
    lhs: Fraction
    rhs: Fraction
    strict_required: bool
    holds: bool
    slack: Fraction

    @classmethod
    def ge(cls, lhs, rhs, strict: bool = False) -> "InequalityVerdict":
        lhs, rhs = as_rational(lhs), as_rational(rhs)
        slack = lhs - rhs
        return cls(lhs, rhs, strict, slack > 0 if strict else slack >= 0, slack)

    @classmethod
    def le(cls, lhs, rhs, strict: bool = False) -> "InequalityVerdict":
        # slack is oriented so that a satisfied inequality has slack >= 0
        lhs, rhs = as_rational(lhs), as_rational(rhs)
        slack = rhs - lhs
        return cls(lhs, rhs, strict, slack > 0 if strict else slack >= 0, slack)


def ch_degree(g: int, xi0=0, delta: Counts = None, xi: Counts = None) -> Fraction:
    """Hodge degree of a hyperelliptic family from its boundary census (Cornalba-Harris)."""
    _check_genus(g)
    xi0 = as_rational(xi0)
    if xi0 < 0:
        raise DomainError("xi[0] is negative")
    d = _counts(delta, g // 2, "delta")
    x = _counts(xi, (g - 1) // 2, "xi")
    total = Fraction(g, 4 * (2 * g + 1)) * xi0
    total += sum((Fraction(i * (g - i), 2 * g + 1) * v for i, v in d.items() if i >= 1), Fraction(0))
    total += sum((Fraction((j + 1) * (g - j), 2 * (2 * g + 1)) * v for j, v in x.items() if j >= 1),
                 Fraction(0))
    return total


def ch_omega_sq(g: int, xi0=0, delta: Counts = None, xi: Counts = None) -> Fraction:
    """Relative canonical self-intersection of a hyperelliptic family from its census."""
    _check_genus(g)
    xi0 = as_rational(xi0)
    if xi0 < 0:
        raise DomainError("xi[0] is negative")
    d = _counts(delta, g // 2, "delta")
    x = _counts(xi, (g - 1) // 2, "xi")
    total = Fraction(g - 1, 2 * g + 1) * xi0
    for i, v in d.items():
        if i >= 1:
            total += (Fraction(12 * i * (g - i), 2 * g + 1) - 1) * v
    for j, v in x.items():
        if j >= 1:
            total += (Fraction(6 * (j + 1) * (g - j), 2 * g + 1) - 2) * v
    return total


def hyperelliptic_delta_f(g: int, xi0=0, delta: Counts = None, xi: Counts = None) -> Fraction:
    """Total node count through the double-cover census."""
    d = _counts(delta, g // 2, "delta")
    x = _counts(xi, (g - 1) // 2, "xi")
    return (as_rational(xi0) + sum((v for i, v in d.items() if i >= 1), Fraction(0))
            + 2 * sum((v for j, v in x.items() if j >= 1), Fraction(0)))


def moriwaki_slope(g: int, lambda_, delta: Counts) -> InequalityVerdict:
    """Sharp slope inequality ``(8g+4) lambda >= g delta_0 + sum 4i(g-i) delta_i``."""
    _check_genus(g)
    d = _counts(delta, g // 2, "delta")
    rhs = g * d.get(0, 0) + sum((4 * i * (g - i) * v for i, v in d.items() if i >= 1), Fraction(0))
    return InequalityVerdict.ge((8 * g + 4) * as_rational(lambda_), rhs)


def lower_bound_general(g: int, lambda_, delta_1, delta_h) -> Fraction:
    """Lower bound for omega^2 valid for every non-isotrivial semi-stable family."""
    _check_genus(g)
    return (Fraction(4 * (g - 1), g) * as_rational(lambda_)
            + Fraction(3 * g - 4, g) * as_rational(delta_1)
            + Fraction(7 * g - 16, g) * as_rational(delta_h))


class UpperBound(NamedTuple):
    value: Fraction
    strict: bool


def upper_bound(g: int, log_canon_base, delta_1_c, delta_h_c, strict: bool) -> UpperBound:
    """Upper bound for omega^2 from compact-fiber nodes.

    ``strict`` must be true when some fiber has non-compact Jacobian or when
    the family is smooth; the caller knows which.
    """
    _check_genus(g)
    value = ((2 * g - 2) * as_rational(log_canon_base)
             + 2 * as_rational(delta_1_c) + 3 * as_rational(delta_h_c))
    return UpperBound(value, bool(strict))


def arakelov_degree(g: int, q_f: int, log_canon_base) -> Fraction:
    """Hodge degree forced by Arakelov equality when the flat part has rank ``q_f``."""
    if not 0 <= q_f <= g:
        raise DomainError(f"q_f must lie in 0..{g}, got {q_f}")
    return Fraction(g - q_f, 2) * as_rational(log_canon_base)


def hyperelliptic_nc_coefficients(g: int, q_f: int) -> tuple[Fraction, Fraction, Fraction]:
    """(lambda, delta_1, delta_h) coefficients of the hyperelliptic lower bound
    when some fiber has non-compact Jacobian."""
    den = (g + 1) * (g - q_f)
    return (Fraction(4 * (g - 1), g - q_f),
            Fraction(3 * g * g - (8 * q_f + 1) * g + 10 * q_f - 4, den),
            Fraction(7 * g * g - (16 * q_f + 9) * g + 34 * q_f - 16, den))


def hyperelliptic_compact_coefficient(g: int, q_f: int, i: int) -> Fraction:
    """Per-index delta coefficient of the hyperelliptic lower bound when all
    fibers have compact Jacobian."""
    return Fraction(4 * (2 * g + 1 - 3 * q_f) * i * (g - i), (2 * g + 1) * (g - q_f)) - 1


def lower_bound_hyperelliptic(g: int, q_f: int, lambda_, delta: Counts, nc_empty: bool) -> Fraction:
    """Lower bound for omega^2 of a hyperelliptic family with relative irregularity ``q_f``."""
    _check_genus(g)
    if not 0 <= q_f < g:
        raise DomainError(f"q_f must lie in 0..{g - 1}, got {q_f}")
    d = _counts(delta, g // 2, "delta")
    lam_coeff = Fraction(4 * (g - 1), g - q_f)
    total = lam_coeff * as_rational(lambda_)
    if nc_empty:
        for i, v in d.items():
            if i >= 1:
                total += hyperelliptic_compact_coefficient(g, q_f, i) * v
        return total
    _, c1, ch = hyperelliptic_nc_coefficients(g, q_f)
    delta_h = sum((v for i, v in d.items() if i >= 2), Fraction(0))
    return total + c1 * d.get(1, 0) + ch * delta_h


def xi_lhs_weight(g: int, i: int) -> Fraction:
    return Fraction((2 * i + 1) * (2 * g + 1 - 2 * i), g + 1)


def xi_constraint(g: int, q_f: int, delta: Counts, xi: Counts) -> InequalityVerdict:
    """Restriction on the boundary census of a hyperelliptic family with ``q_f > 0``."""
    _check_genus(g)
    if q_f < 1:
        raise DomainError("the census restriction needs q_f >= 1")
    d = _counts(delta, g // 2, "delta")
    x = _counts(xi, (g - 1) // 2, "xi")
    lhs = Fraction(0)
    rhs = x.get(0, Fraction(0))
    for i, v in d.items():
        if i < 1:
            continue
        if i >= q_f:
            lhs += xi_lhs_weight(g, i) * v
        else:
            rhs += 4 * i * (2 * i + 1) * v
    for j, v in x.items():
        if j < 1:
            continue
        if j >= q_f:
            lhs += Fraction(2 * (j + 1) * (g - j), g + 1) * v
        else:
            rhs += 2 * (j + 1) * (2 * j + 1) * v
    return InequalityVerdict.ge(lhs, rhs)


def sigma0_constraint(g: int, q_f: int, delta: Counts) -> InequalityVerdict:
    """The census restriction specialised to families without non-compact fibers."""
    _check_genus(g)
    if q_f < 2:
        raise DomainError("this restriction is stated for q_f >= 2")
    d = _counts(delta, g // 2, "delta")
    lhs = sum((xi_lhs_weight(g, i) * v for i, v in d.items() if i >= q_f), Fraction(0))
    rhs = sum((4 * i * (2 * i + 1) * v for i, v in d.items() if 1 <= i < q_f), Fraction(0))
    return InequalityVerdict.ge(lhs, rhs)


def qf_bound(g: int, d: int) -> Fraction:
    """Upper bound ``(g-1)/d + 1`` on q_f given the Albanese-fibre degree ``d``."""
    if d < 2:
        raise DomainError(f"degree d must be >= 2 for a non-isotrivial family, got {d}")
    return Fraction(g - 1, d) + 1


def qf_admissible(q_f: int, g: int, d: int, strict: bool = True) -> bool:
    """Whether ``q_f`` respects the degree bound; ``strict`` excludes equality,
    which only isotrivial families attain."""
    bound = qf_bound(g, d)
    return q_f < bound if strict else q_f <= bound


class CoeffQuad(NamedTuple):
    a: Fraction
    b: Fraction
    c: Fraction
    d: Fraction


def coeff_quad(g: int, q_f: int, index: int) -> CoeffQuad:
    """Coefficients of delta_i (a below q_f, b from q_f on) and xi_j (c, d) in
    the lower bound obtained by feeding the census restriction into the
    Cornalba-Harris expression for ``omega^2 - 4(g-1)/(g-q_f) lambda``."""
    _check_genus(g)
    if not 1 <= q_f < g:
        raise DomainError(f"q_f must lie in 1..{g - 1}, got {q_f}")
    i = j = index
    base = (2 * g + 1) * (g - q_f)
    shift = Fraction((g - 1) * q_f, base)
    delta_part = Fraction(4 * (2 * g - 3 * q_f + 1) * i * (g - i), base) - 1
    xi_part = Fraction(2 * (2 * g - 3 * q_f + 1) * (j + 1) * (g - j), base) - 2
    return CoeffQuad(
        a=delta_part + shift * 4 * i * (2 * i + 1),
        b=delta_part - shift * xi_lhs_weight(g, i),
        c=xi_part + shift * 2 * (j + 1) * (2 * j + 1),
        d=xi_part - shift * Fraction(2 * (j + 1) * (g - j), g + 1),
    )


def f_gq(g, q_f) -> Fraction:
    """``4 q (13 g - 21 q + 8) - 50 g - 51``; positive on the large-irregularity regime."""
    g, q = as_rational(g), as_rational(q_f)
    return 4 * q * (13 * g - 21 * q + 8) - 50 * g - 51


class LargeIrregularityCoefficients(NamedTuple):
    theta: Fraction
    a: Fraction
    b: Fraction


def large_irregularity_coefficients(g: int, q_f: int, i: int) -> LargeIrregularityCoefficients:
    """Coefficients used to rule out q_f >= 3 when the Albanese degree is >= 3.

    ``theta`` is the delta_1 coefficient after clearing denominators; ``a``
    applies to 2 <= i < q_f and ``b`` to q_f <= i <= g/2.
    """
    theta = Fraction(-2 * g * g + (7 + 6 * q_f) * g + 4 - 15 * q_f)
    core = 4 * ((2 * g + 1 - 3 * q_f) * i * (g - i) - (2 * g + 1) * (g - q_f))
    a = core + theta / 3 * i * (2 * i + 1)
    b = core - theta / 12 * xi_lhs_weight(g, i)
    return LargeIrregularityCoefficients(theta, Fraction(a), Fraction(b))
