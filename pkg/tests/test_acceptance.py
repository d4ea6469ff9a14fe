"""Acceptance gate: one test per criterion, each reporting a PASS/FAIL line."""

from __future__ import annotations

import random
import time
from fractions import Fraction

from kugabound import formulas as F
from kugabound.cli import check_family
from kugabound.feasibility import build_system, genus_scan
from kugabound.invariants import load_family, totals

from oracle import agreement


def _check(fixture, arakelov=True):
    start = time.perf_counter()
    fam = load_family(fixture)
    report = check_family(fam, arakelov=arakelov)
    t = totals(fam)
    return fam, report, t, time.perf_counter() - start


def test_criterion_1_genus3_fixture(genus3_path, report_line):
    fam, report, t, elapsed = _check(genus3_path)
    derived = report.derived
    facts = {
        "xi_0": (t.xi[0], 8), "delta_1": (t.delta[1], 4), "delta_f": (t.delta_f, 12),
        "degree": (F.ch_degree(3, t.xi[0], {1: t.delta[1]}), 2),
        "omega^2": (F.ch_omega_sq(3, t.xi[0], {1: t.delta[1]}), 12),
        "inferred q_f": (derived.get("q_f_inferred"), 1),
    }
    wrong = {k: v for k, (v, want) in facts.items() if v != want}
    failed = [c.name for c in report.checks if c.status == "fail"]
    ok = not wrong and not failed and report.status == "consistent" and elapsed < 1
    report_line(1, ok, f"genus-3 fixture reproduces exactly, {len(report.checks)} checks pass, "
                       f"{elapsed:.3f}s (limit 1s)" if ok else f"mismatch {wrong} failed {failed} "
                       f"time {elapsed:.3f}s")
    assert ok


def test_criterion_2_genus4_fixture(genus4_path, report_line):
    fam, report, t, elapsed = _check(genus4_path)
    upper = next(c for c in report.checks if c.name.startswith("upper bound"))
    arakelov = next(c for c in report.checks if c.name.startswith("Arakelov"))
    ok = (t.delta[1] == 12 and t.delta_f == 12
          and F.ch_degree(4, 0, {1: 12}) == 4 and F.ch_omega_sq(4, 0, {1: 12}) == 36
          and fam.q_f == 0 and arakelov.status == "pass" and upper.slack == 0
          and report.status == "consistent" and elapsed < 1)
    report_line(2, ok, f"genus-4 fixture: Arakelov equality at q_f=0, upper-bound slack "
                       f"{upper.slack}, {elapsed:.3f}s (limit 1s)")
    assert ok


def test_criterion_3_general_scan(report_line):
    start = time.perf_counter()
    table = genus_scan("general", range(2, 51))
    elapsed = time.perf_counter() - start
    for s, cert in table.certificates():
        cert.verify(build_system(s))
    bad = [(c.g, c.nc_group) for c in table.cells
           if c.feasible and (c.g >= 5 or (c.g >= 4 and c.nc_group == "nc-nonempty"))]
    refuted = sum(1 for c in table.cells if not c.feasible)
    ok = not bad and table.max_feasible_g() == 4 and elapsed < 5
    report_line(3, ok, f"general scan 2..50: max feasible g = {table.max_feasible_g()}, "
                       f"{refuted} cells refuted with verified certificates, "
                       f"{elapsed:.2f}s (limit 5s)" + (f"; unexpected feasible {bad}" if bad else ""))
    assert ok


EXPECTED_COLUMNS = {
    "nc-nonempty q_f=0": 3, "nc-nonempty q_f=1": 7,
    "nc-empty q_f=0": 4, "nc-empty q_f=1": 5, "nc-empty q_f=2": 5, "nc-empty q_f=3": 6,
}


def test_criterion_4_hyperelliptic_scan(report_line):
    start = time.perf_counter()
    table = genus_scan("hyperelliptic", range(2, 51))
    elapsed = time.perf_counter() - start
    for s, cert in table.certificates():
        cert.verify(build_system(s))
    bounds = table.column_bounds()
    wrong = {k: bounds.get(k) for k, v in EXPECTED_COLUMNS.items() if bounds.get(k) != v}
    extra = {k: v for k, v in bounds.items() if k not in EXPECTED_COLUMNS and v is not None}
    late = [(c.g, c.column) for c in table.cells if c.feasible and c.g >= 8]
    ok = not wrong and not extra and not late and elapsed < 30
    report_line(4, ok, f"hyperelliptic scan 2..50: max feasible g = {table.max_feasible_g()}, "
                       f"all {len(EXPECTED_COLUMNS)} column bounds match, "
                       f"{elapsed:.2f}s (limit 30s)" if ok else
                f"columns wrong {wrong} extra {extra} late {late[:5]} time {elapsed:.2f}s")
    assert ok


def test_criterion_5_identities(report_line):
    rng = random.Random(1729)
    mismatches = 0
    for _ in range(1000):
        g = rng.randint(2, 30)
        xi0 = rng.randint(0, 100)
        delta = {i: rng.randint(0, 100) for i in range(1, g // 2 + 1)}
        xi = {j: rng.randint(0, 100) for j in range(1, (g - 1) // 2 + 1)}
        lhs = F.ch_omega_sq(g, xi0, delta, xi)
        rhs = 12 * F.ch_degree(g, xi0, delta, xi) - (xi0 + sum(delta.values()) + 2 * sum(xi.values()))
        mismatches += lhs != rhs
    reductions = sum(
        F.hyperelliptic_nc_coefficients(g, 0)
        != (Fraction(4 * (g - 1), g), Fraction(3 * g - 4, g), Fraction(7 * g - 16, g))
        for g in range(2, 31))
    ok = mismatches == 0 and reductions == 0
    report_line(5, ok, f"omega^2 identity exact on 1000/1000 random censuses; irregularity-0 "
                       f"bound equals the general bound term by term for g=2..30"
                if ok else f"{mismatches} identity mismatches, {reductions} reduction mismatches")
    assert ok


def test_criterion_6_oracle(report_line):
    agree, total, mismatches = agreement(500)
    ok = agree == total
    report_line(6, ok, f"elimination agrees with the brute-force oracle on {agree}/{total} "
                       "random systems")
    assert ok, mismatches[:3]


def test_criterion_7_signs(report_line):
    bad = []
    cases = 0
    for g in range(2, 61):
        for q in range(2, (g + 1) // 3 + 1):
            for i in range(1, q):
                quad = F.coeff_quad(g, q, i)
                cases += 2
                if quad.a <= 0:
                    bad.append(("a", g, q, i))
                if quad.c < 0:
                    bad.append(("c", g, q, i))
            for j in range(q, (g - 1) // 2 + 1):
                cases += 1
                if F.coeff_quad(g, q, j).d < 0:
                    bad.append(("d", g, q, j))
    rng = random.Random(60)
    points = rng.sample(range(-1000, 1000), 50)
    poly_bad = [g for g in points
                if F.f_gq(g, 3) != 106 * g - 711
                or 3 * F.f_gq(g, Fraction(g + 1, 3)) != 24 * g * g - 122 * g - 149]
    ok = not bad and not poly_bad
    report_line(7, ok, f"{cases} coefficient sign cases hold for 2<=g<=60; both f identities "
                       f"exact at 50 points" if ok else f"sign failures {bad[:5]}, "
                       f"polynomial failures at {poly_bad[:5]}")
    assert ok
