"""Brute-force feasibility oracle for small linear systems.

Written independently of the elimination engine: it shares no code with
``kugabound.feasibility``.  A system is a list of ``(coeffs, const, rel)``
meaning ``sum(coeffs[i] * x[i]) + const  rel  0`` with ``rel`` one of
``">="``, ``">"``, ``"=="``.

Two stages:

* grid search over rationals with denominator <= 8 in a small box, using
  integer arithmetic after scaling by lcm(1..8) = 840;
* if the grid finds nothing, exhaustive vertex enumeration of the closure
  intersected with a large box.  The closure is empty, or the average of its
  vertices (which lies in its relative interior) decides the strict rows.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np

SCALE = 840  # lcm(1..8)
GRID_BOX = 2
VERTEX_BOX = 1000


def _grid_values(box: int = GRID_BOX) -> np.ndarray:
    vals = {Fraction(p, q) for q in range(1, 9) for p in range(-box * q, box * q + 1)}
    return np.array(sorted(int(v * SCALE) for v in vals), dtype=np.int64)


_GRID = _grid_values()


def grid_point(system, nvars: int):
    """A grid point satisfying every row, or None."""
    axes = np.meshgrid(*([_GRID] * nvars), indexing="ij")
    pts = np.stack([a.ravel() for a in axes])  # nvars x N, scaled by SCALE
    ok = np.ones(pts.shape[1], dtype=bool)
    for coeffs, const, rel in system:
        val = np.asarray(coeffs, dtype=np.int64) @ pts + const * SCALE
        if rel == ">=":
            ok &= val >= 0
        elif rel == ">":
            ok &= val > 0
        else:
            ok &= val == 0
    hits = np.flatnonzero(ok)
    if not len(hits):
        return None
    return [Fraction(int(v), SCALE) for v in pts[:, hits[0]]]


def _solve(rows, rhs):
    """Exact Gauss-Jordan; None when singular."""
    n = len(rows)
    m = [[Fraction(v) for v in row] + [Fraction(b)] for row, b in zip(rows, rhs)]
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            return None
        m[col], m[piv] = m[piv], m[col]
        p = m[col][col]
        m[col] = [v / p for v in m[col]]
        for r in range(n):
            if r != col and m[r][col] != 0:
                f = m[r][col]
                m[r] = [a - f * b for a, b in zip(m[r], m[col])]
    return [m[r][n] for r in range(n)]


def _value(coeffs, const, x) -> Fraction:
    return sum((Fraction(c) * v for c, v in zip(coeffs, x)), Fraction(const))


def satisfies(system, x) -> bool:
    for coeffs, const, rel in system:
        v = _value(coeffs, const, x)
        if (rel == ">=" and v < 0) or (rel == ">" and v <= 0) or (rel == "==" and v != 0):
            return False
    return True


def closure_vertices(system, nvars: int, box: int = VERTEX_BOX):
    """Vertices of {rows with > relaxed to >=} intersected with |x_i| <= box."""
    closed = []
    for coeffs, const, rel in system:
        closed.append((list(coeffs), const))
        if rel == "==":
            closed.append(([-c for c in coeffs], -const))
    for i in range(nvars):
        unit = [1 if k == i else 0 for k in range(nvars)]
        closed.append((unit, box))
        closed.append(([-u for u in unit], box))
    found = set()
    for subset in itertools.combinations(closed, nvars):
        x = _solve([c for c, _ in subset], [-k for _, k in subset])
        if x is None:
            continue
        if all(_value(c, k, x) >= 0 for c, k in closed):
            found.add(tuple(x))
    return sorted(found)


def oracle_feasible(system, nvars: int) -> bool:
    if grid_point(system, nvars) is not None:
        return True
    verts = closure_vertices(system, nvars)
    if not verts:
        return False
    centroid = [sum(col, Fraction(0)) / len(verts) for col in zip(*verts)]
    return satisfies(system, centroid)


def random_system(rng, max_vars: int = 3, max_rows: int = 6, span: int = 3):
    """A random small system: (nvars, rows)."""
    nvars = rng.randint(1, max_vars)
    rows = []
    for _ in range(rng.randint(1, max_rows)):
        coeffs = [rng.randint(-span, span) for _ in range(nvars)]
        const = rng.randint(-span, span)
        rel = rng.choices([">=", ">", "=="], weights=[5, 4, 1])[0]
        rows.append((coeffs, const, rel))
    return nvars, rows


def to_linear_system(nvars: int, rows):
    """Translate an oracle system into the package's representation."""
    from kugabound.exact import LinearExpr
    from kugabound.feasibility.system import Constraint, LinearSystem, Relation

    names = [f"x{i}" for i in range(nvars)]
    rel = {">=": Relation.GE, ">": Relation.GT, "==": Relation.EQ}
    cons = [Constraint(LinearExpr(dict(zip(names, coeffs)), const), rel[r], f"row{n}")
            for n, (coeffs, const, r) in enumerate(rows)]
    return LinearSystem.of(cons, names)


def agreement(n_systems: int = 500, seed: int = 20240917):
    """Run both deciders on ``n_systems`` random systems; return (agree, total, mismatches)."""
    import random

    from kugabound.feasibility.system import fourier_motzkin

    rng = random.Random(seed)
    mismatches = []
    for _ in range(n_systems):
        nvars, rows = random_system(rng)
        expected = oracle_feasible(rows, nvars)
        system = to_linear_system(nvars, rows)
        cert = fourier_motzkin(system)
        cert.verify(system)
        if cert.feasible != expected:
            mismatches.append((nvars, rows, expected))
    return n_systems - len(mismatches), n_systems, mismatches
