"""Genus-bound arguments as linear systems over the nonnegative invariants.

A :class:`Scenario` fixes the discrete data (genus, relative irregularity,
family kind, whether some Jacobian is non-compact).  :func:`build_system`
collects every inequality proved for such a family, with the Hodge degree
pinned by the Arakelov equality, and :func:`decide` runs exact elimination on
it.  An infeasible verdict is a nonexistence proof for those discrete data;
a feasible one only says the inequalities alone do not obstruct.

The boundary degree ``2b - 2 + s_nc`` is an even-or-odd integer in reality
but is relaxed to a nonnegative rational here, which keeps infeasibility
verdicts sound.
"""

from __future__ import annotations

import hashlib
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .. import __version__
from .. import formulas as F
from ..exact import LinearExpr, format_rational, vname
from .system import Certificate, LinearSystem, eq, fourier_motzkin, ge, gt

GENERAL = "general-strictly-maximal"
HYPERELLIPTIC = "hyperelliptic-kuga"
FAMILY_KINDS = (GENERAL, HYPERELLIPTIC)

NC_NONEMPTY = "nonempty"
NC_EMPTY = "empty"
NC_NO_NODES = "empty-and-delta-empty"
NC_STATES = (NC_NONEMPTY, NC_EMPTY, NC_NO_NODES)

D_TWO = "2"
D_AT_LEAST_THREE = ">=3"

LAMBDA = "lambda"
OMEGA_SQ = "omega_sq"
LOGDEG = "logdeg"


class ScenarioError(ValueError):
    pass


@dataclass(frozen=True)
class Scenario:
    g: int
    q_f: int
    family_kind: str
    delta_nc_state: str
    d_regime: str | None = None
    # Off only for the experiment asking whether inequalities alone rule out
    # q_f >= 2 when some Jacobian is non-compact.
    cap_noncompact_irregularity: bool = True

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        g, q = self.g, self.q_f
        if self.family_kind not in FAMILY_KINDS:
            raise ScenarioError(f"unknown family kind {self.family_kind!r}")
        if self.delta_nc_state not in NC_STATES:
            raise ScenarioError(f"unknown Delta_nc state {self.delta_nc_state!r}")
        if g < 2:
            raise ScenarioError(f"genus must be >= 2, got {g}")
        if not 0 <= q < g:
            raise ScenarioError(f"q_f = {q} outside 0..{g - 1}")
        if self.family_kind == GENERAL:
            if q != 0:
                raise ScenarioError("a strictly maximal Higgs field has no flat part, so q_f = 0")
            if self.d_regime is not None:
                raise ScenarioError("the Albanese degree regime applies to hyperelliptic families only")
            return
        if 2 * q > g:
            raise ScenarioError(f"q_f = {q} exceeds g/2 for a non-isotrivial family")
        if self.cap_noncompact_irregularity and self.delta_nc_state == NC_NONEMPTY and q > 1:
            raise ScenarioError("q_f <= 1 when some Jacobian is non-compact")
        if self.d_regime not in (None, D_TWO, D_AT_LEAST_THREE):
            raise ScenarioError(f"unknown Albanese degree regime {self.d_regime!r}")
        if self.d_regime is not None and q < 1:
            raise ScenarioError("the Albanese degree is only defined when q_f >= 1")
        if self.d_regime == D_AT_LEAST_THREE and not F.qf_admissible(q, g, 3, strict=False):
            raise ScenarioError(f"q_f = {q} exceeds (g+1)/3 when the Albanese degree is >= 3")

    @property
    def hyperelliptic(self) -> bool:
        return self.family_kind == HYPERELLIPTIC

    @property
    def regime(self) -> str:
        base = {NC_NONEMPTY: "nc-nonempty", NC_EMPTY: "nc-empty",
                NC_NO_NODES: "nc-empty,no-nodes"}[self.delta_nc_state]
        if self.d_regime is not None:
            base += f",d{'=' if self.d_regime == D_TWO else ''}{self.d_regime}"
        return base

    @property
    def assumptions(self) -> tuple[str, ...]:
        out = ["Arakelov equality with flat part of rank q_f",
               "boundary degree relaxed to a nonnegative rational"]
        if self.family_kind == GENERAL:
            out.append("strictly maximal Higgs field, so q_f = 0")
        else:
            out.append("q_f <= g/2 for non-isotrivial hyperelliptic families (Xiao)")
            if self.delta_nc_state == NC_NONEMPTY and self.cap_noncompact_irregularity:
                out.append("q_f <= 1 when some Jacobian is non-compact")
            if self.d_regime == D_TWO:
                out.append("Albanese degree 2: no nodes of index below q_f")
            elif self.d_regime == D_AT_LEAST_THREE:
                out.append("Albanese degree >= 3: q_f <= (g+1)/3")
        if self.delta_nc_state != NC_NONEMPTY:
            out.append("all Jacobians compact forces base genus >= 2")
        return tuple(out)


def _delta(i: int) -> str:
    return vname("delta", i)


def _delta_c(i: int) -> str:
    return vname("delta_c", i)


def _xi(j: int) -> str:
    return vname("xi", j)


def _linear(coeffs: dict[str, Fraction]) -> LinearExpr:
    return LinearExpr(coeffs)


def variables_for(g: int, hyperelliptic: bool) -> tuple[str, ...]:
    names = [LAMBDA, OMEGA_SQ, LOGDEG]
    idx = range(1, g // 2 + 1)
    names += [_delta(i) for i in idx]
    names += [_delta_c(i) for i in idx]
    if hyperelliptic:
        names += [_xi(j) for j in range((g - 1) // 2 + 1)]
    return tuple(names)


def build_system(s: Scenario) -> LinearSystem:
    """All proven constraints for the scenario's discrete data."""
    s.validate()
    g, q = s.g, s.q_f
    idx = range(1, g // 2 + 1)
    xidx = range((g - 1) // 2 + 1) if s.hyperelliptic else range(0)
    names = variables_for(g, s.hyperelliptic)
    lam, w2, L = (LinearExpr.var(n) for n in (LAMBDA, OMEGA_SQ, LOGDEG))
    delta = {i: LinearExpr.var(_delta(i)) for i in idx}
    delta_c = {i: LinearExpr.var(_delta_c(i)) for i in idx}
    xi = {j: LinearExpr.var(_xi(j)) for j in xidx}
    delta_h = LinearExpr.sum(delta[i] for i in idx if i >= 2)
    delta_h_c = LinearExpr.sum(delta_c[i] for i in idx if i >= 2)
    nc_empty = s.delta_nc_state != NC_NONEMPTY

    cs = [ge(n, 0, f"nonnegativity of {n}") for n in names]

    cs.append(eq(lam, L * F.arakelov_degree(g, q, 1), "Arakelov equality"))

    if not s.hyperelliptic:
        lower = (F.lower_bound_general(g, 1, 0, 0) * lam
                 + F.lower_bound_general(g, 0, 1, 0) * delta.get(1, LinearExpr())
                 + F.lower_bound_general(g, 0, 0, 1) * delta_h)
        cs.append(ge(w2, lower, "general lower bound on omega^2"))
    elif not nc_empty:
        c_lam, c_1, c_h = F.hyperelliptic_nc_coefficients(g, q)
        lower = c_lam * lam + c_1 * delta.get(1, LinearExpr()) + c_h * delta_h
        cs.append(ge(w2, lower, "hyperelliptic lower bound on omega^2 (non-compact Jacobian)"))
    else:
        lower = F.lower_bound_hyperelliptic(g, q, 1, {}, True) * lam + LinearExpr.sum(
            F.hyperelliptic_compact_coefficient(g, q, i) * delta[i] for i in idx)
        cs.append(ge(w2, lower, "hyperelliptic lower bound on omega^2 (compact Jacobians)"))

    strict_upper = s.delta_nc_state in (NC_NONEMPTY, NC_NO_NODES)
    upper = (F.upper_bound(g, 1, 0, 0, strict_upper).value * L
             + F.upper_bound(g, 0, 1, 0, strict_upper).value * delta_c.get(1, LinearExpr())
             + F.upper_bound(g, 0, 0, 1, strict_upper).value * delta_h_c)
    cs.append((gt if strict_upper else ge)(upper, w2, "upper bound on omega^2"))

    for i in idx:
        if nc_empty:
            cs.append(eq(delta_c[i], delta[i], f"all nodes of index {i} on compact fibers"))
        else:
            cs.append(ge(delta[i], delta_c[i], f"compact-fiber nodes of index {i} bounded by all"))

    cs.append(gt(lam, 0, "non-isotriviality"))
    if nc_empty:
        for j in xidx:
            cs.append(eq(xi[j], 0, f"no xi-nodes of index {j} on compact fibers"))
        cs.append(ge(L, 2, "base genus at least 2"))
        all_delta = LinearExpr.sum(delta.values())
        if s.delta_nc_state == NC_EMPTY:
            cs.append(gt(all_delta, 0, "some singular fiber"))
        else:
            for i in idx:
                cs.append(eq(delta[i], 0, f"no nodes of index {i}"))
    elif s.hyperelliptic:
        node0 = xi[0] + LinearExpr.sum(2 * xi[j] for j in xidx if j >= 1)
        cs.append(gt(node0, 0, "some fiber with non-compact Jacobian"))
    if s.hyperelliptic:
        census = LinearExpr.sum(list(delta.values()) + list(xi.values()))
        cs.append(gt(census, 0, "some singular fiber (Cornalba-Harris degree positive)"))

    if s.hyperelliptic and q >= 1:
        coeffs = {}
        for i in idx:
            coeffs[_delta(i)] = F.xi_constraint(g, q, {i: 1}, {}).slack
        for j in xidx:
            coeffs[_xi(j)] = F.xi_constraint(g, q, {}, {j: 1}).slack
        cs.append(ge(_linear(coeffs), 0, "census restriction for q_f >= 1"))
    if s.hyperelliptic and q >= 2 and nc_empty:
        coeffs = {_delta(i): F.sigma0_constraint(g, q, {i: 1}).slack for i in idx}
        cs.append(ge(_linear(coeffs), 0, "census restriction without non-compact fibers"))
    if s.d_regime == D_TWO:
        for i in range(1, q):
            if i in delta:
                cs.append(eq(delta[i], 0, f"Albanese degree 2: delta[{i}] vanishes"))
            if i in xi:
                cs.append(eq(xi[i], 0, f"Albanese degree 2: xi[{i}] vanishes"))

    return LinearSystem(names, tuple(cs))


def decide(s: Scenario) -> Certificate:
    return fourier_motzkin(build_system(s))


def fixture_point(fam) -> dict[str, Fraction]:
    """The invariant vector of a concrete family, named as in :func:`build_system`."""
    from ..invariants import totals

    t = totals(fam)
    point = {LAMBDA: Fraction(fam.lambda_), OMEGA_SQ: Fraction(fam.omega_sq),
             LOGDEG: Fraction(fam.log_canon_base)}
    for i in range(1, fam.g // 2 + 1):
        point[_delta(i)] = Fraction(t.delta[i])
        point[_delta_c(i)] = Fraction(t.delta_c[i])
    if t.xi is not None:
        for j, v in enumerate(t.xi):
            point[_xi(j)] = Fraction(v)
    return point


# -- scans ------------------------------------------------------------------
#
# A scan cell is (g, q_f, whether some Jacobian is non-compact).  Without
# non-compact fibers the argument splits into branches (some node / no node
# at all, and for q_f >= 3 the two Albanese degree regimes); the cell is
# feasible when any branch is, so an infeasible cell needs every branch refuted.


@dataclass(frozen=True)
class ScanCell:
    g: int
    q_f: int
    nc_group: str
    branches: tuple[tuple[Scenario, Certificate], ...]

    @property
    def feasible(self) -> bool:
        return any(c.feasible for _, c in self.branches)

    @property
    def verdict(self) -> str:
        return "feasible" if self.feasible else "infeasible"

    @property
    def regime(self) -> str:
        d = sorted({s.d_regime for s, _ in self.branches if s.d_regime})
        if d:
            return f"{self.nc_group},d in {{{'|'.join(d)}}}"
        return self.nc_group

    @property
    def column(self) -> str:
        return f"{self.nc_group} q_f={self.q_f}"

    def digest(self) -> str:
        for s, c in self.branches:
            if c.feasible:
                return f"{s.regime}:{c.digest()}"
        if len(self.branches) == 1:
            return self.branches[0][1].digest()
        blob = "|".join(c.digest() for _, c in self.branches)
        return f"refutations/{len(self.branches)}branches/{hashlib.sha256(blob.encode()).hexdigest()[:12]}"


@dataclass(frozen=True)
class ScanTable:
    family_kind: str
    cells: tuple[ScanCell, ...]

    def max_feasible_g(self, column: str | None = None) -> int | None:
        gs = [c.g for c in self.cells if c.feasible and (column is None or c.column == column)]
        return max(gs) if gs else None

    def column_bounds(self) -> dict[str, int | None]:
        out: dict[str, int | None] = {}
        for c in self.cells:
            out.setdefault(c.column, None)
            if c.feasible and (out[c.column] is None or c.g > out[c.column]):
                out[c.column] = c.g
        return out

    def certificates(self):
        for cell in self.cells:
            yield from cell.branches

    def to_tsv(self) -> str:
        lines = [f"# kugabound {__version__} scan {self.family_kind}",
                 "g\tq_f\tregime\tverdict\tdigest"]
        for c in self.cells:
            lines.append(f"{c.g}\t{c.q_f}\t{c.regime}\t{c.verdict}\t{c.digest()}")
        return "\n".join(lines) + "\n"

    def summary(self) -> str:
        best = self.max_feasible_g()
        return f"max feasible g = {'none' if best is None else best}"

    def to_json(self) -> dict:
        return {
            "family_kind": self.family_kind,
            "max_feasible_g": self.max_feasible_g(),
            "column_bounds": self.column_bounds(),
            "cells": [
                {"g": c.g, "q_f": c.q_f, "regime": c.regime, "verdict": c.verdict,
                 "branches": [
                     {"scenario": s.regime, "assumptions": list(s.assumptions),
                      "certificate": cert.to_dict()}
                     for s, cert in c.branches]}
                for c in self.cells
            ],
        }

    def dumps_json(self) -> str:
        return json.dumps({"version": __version__, **self.to_json()}, indent=2, sort_keys=True) + "\n"


def scenarios_for(kind: str, g: int, nc_state: str = "all") -> list[tuple[int, str, list[Scenario]]]:
    """The scan cells at genus ``g`` as ``(q_f, group, branch scenarios)``."""
    if nc_state not in ("all", "nc-nonempty", "nc-empty"):
        raise ScenarioError(f"unknown regime filter {nc_state!r}")
    if kind not in FAMILY_KINDS:
        raise ScenarioError(f"unknown family kind {kind!r}")
    out = []
    if nc_state in ("all", "nc-nonempty"):
        top = 0 if kind == GENERAL else min(1, g // 2)
        for q in range(top + 1):
            out.append((q, "nc-nonempty", [Scenario(g, q, kind, NC_NONEMPTY)]))
    if nc_state in ("all", "nc-empty"):
        top = 0 if kind == GENERAL else g // 2
        for q in range(top + 1):
            if q < 3:
                branches = [Scenario(g, q, kind, st) for st in (NC_EMPTY, NC_NO_NODES)]
            else:
                branches = [Scenario(g, q, kind, st, D_TWO) for st in (NC_EMPTY, NC_NO_NODES)]
                if F.qf_admissible(q, g, 3, strict=False):
                    branches += [Scenario(g, q, kind, st, D_AT_LEAST_THREE)
                                 for st in (NC_EMPTY, NC_NO_NODES)]
            out.append((q, "nc-empty", branches))
    return out


def _kind(kind: str) -> str:
    return {"general": GENERAL, "hyperelliptic": HYPERELLIPTIC}.get(kind, kind)


def genus_scan(kind: str, g_range: Iterable[int], nc_state: str = "all", jobs: int = 1) -> ScanTable:
    """Decide every admissible cell for each genus in ``g_range``.

    Cells are independent, so ``jobs > 1`` farms them out to worker processes;
    the table is assembled in a fixed order either way.
    """
    kind = _kind(kind)
    layout = [(g, q, group, branches) for g in g_range
              for q, group, branches in scenarios_for(kind, g, nc_state)]
    flat = [s for *_, branches in layout for s in branches]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            certs = list(pool.map(decide, flat, chunksize=8))
    else:
        certs = [decide(s) for s in flat]
    it = iter(certs)
    cells = []
    for g, q, group, branches in layout:
        cells.append(ScanCell(g, q, group, tuple((s, next(it)) for s in branches)))
    cells.sort(key=lambda c: (c.g, c.q_f, c.nc_group != "nc-nonempty"))
    return ScanTable(kind, tuple(cells))
