"""Check curve families against exact invariant formulas and decide genus bounds.

    kugabound check FAMILY.json [--json OUT] [--no-arakelov]
    kugabound scan {general,hyperelliptic} --g-max N [--regime R] [--certificates OUT]

Exit status: 0 consistent / scan finished, 1 a formula is violated,
2 usage, parse or schema error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from . import __version__
from . import formulas as F
from .exact import format_rational
from .invariants import (FamilyInvariants, InconsistencyError, ValidationError,
                         family_to_dict, load_family, noether_complete, totals)

EXIT_OK, EXIT_VIOLATED, EXIT_USAGE = 0, 1, 2


@dataclass
class Check:
    name: str
    status: str  # pass | fail | skipped
    lhs: Fraction | None = None
    relation: str = ""
    rhs: Fraction | None = None
    slack: Fraction | None = None
    note: str = ""

    def to_dict(self) -> dict:
        out = {"name": self.name, "status": self.status}
        for key in ("lhs", "rhs", "slack"):
            value = getattr(self, key)
            if value is not None:
                out[key] = format_rational(value)
        if self.relation:
            out["relation"] = self.relation
        if self.note:
            out["note"] = self.note
        return out

    def render(self) -> str:
        tag = {"pass": "PASS", "fail": "FAIL", "skipped": "SKIP"}[self.status]
        line = f"  {tag}  {self.name}"
        if self.lhs is not None:
            line += f": {format_rational(self.lhs)} {self.relation} {format_rational(self.rhs)}"
        if self.slack is not None:
            line += f"  (slack {format_rational(self.slack)})"
        if self.note:
            line += f"  [{self.note}]"
        return line


@dataclass
class Report:
    family: dict
    derived: dict[str, Fraction] = field(default_factory=dict)
    checks: list[Check] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def violations(self) -> list[str]:
        return [c.name for c in self.checks if c.status == "fail"]

    @property
    def status(self) -> str:
        return "violated" if self.violations else "consistent"

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "derived": {k: format_rational(v) for k, v in self.derived.items()},
            "checks": [c.to_dict() for c in self.checks],
            "notes": list(self.notes),
            "status": self.status,
            "violations": self.violations,
        }

    def render(self) -> str:
        lines = [f"# kugabound {__version__}"]
        fam = self.family
        kind = "hyperelliptic" if fam["hyperelliptic"] else "general"
        nc = sum(1 for f in fam["fibers"] if not f["compact_jacobian"])
        lines.append(f"family: genus {fam['genus']}, base genus {fam['base_genus']}, {kind}, "
                     f"{len(fam['fibers'])} singular fibers ({nc} with non-compact Jacobian)")
        lines.append("derived:")
        lines += [f"  {k} = {format_rational(v)}" for k, v in self.derived.items()]
        lines.append("checks:")
        lines += [c.render() for c in self.checks]
        lines += [f"note: {n}" for n in self.notes]
        lines.append(f"status: {self.status}")
        if self.violations:
            lines.append("violated: " + "; ".join(self.violations))
        return "\n".join(lines) + "\n"


def _equality(name: str, lhs, rhs, note: str = "") -> Check:
    lhs, rhs = Fraction(lhs), Fraction(rhs)
    return Check(name, "pass" if lhs == rhs else "fail", lhs, "==", rhs, rhs - lhs, note)


def _verdict(name: str, v: F.InequalityVerdict, relation: str, note: str = "") -> Check:
    if not note and v.slack == 0:
        note = "equality case"
    return Check(name, "pass" if v.holds else "fail", v.lhs, relation, v.rhs, v.slack, note)


def check_family(fam: FamilyInvariants, arakelov: bool = True) -> Report:
    """Run every formula applicable to the family and collect the results."""
    g = fam.g
    t = totals(fam)
    report = Report(family_to_dict(fam))
    d = report.derived
    checks = report.checks
    L = fam.log_canon_base
    d["delta_f"] = Fraction(t.delta_f)
    d["delta_1"] = Fraction(t.delta[1]) if len(t.delta) > 1 else Fraction(0)
    d["delta_h"] = Fraction(t.delta_h)
    d["delta_1_c"] = Fraction(t.delta_c[1]) if len(t.delta_c) > 1 else Fraction(0)
    d["delta_h_c"] = Fraction(t.delta_h_c)
    d["s_nc"] = Fraction(t.s_nc)
    d["log_canon_base"] = Fraction(L)

    delta_counts = dict(enumerate(t.delta))
    lam, w2 = fam.lambda_, fam.omega_sq
    if fam.hyperelliptic:
        xi0 = t.xi[0]
        xi_counts = dict(enumerate(t.xi))
        for j, v in enumerate(t.xi):
            d[f"xi[{j}]"] = Fraction(v)
        lam_ch = F.ch_degree(g, xi0, delta_counts, xi_counts)
        w2_ch = F.ch_omega_sq(g, xi0, delta_counts, xi_counts)
        checks.append(_equality("node count through the double cover (delta_f)",
                                F.hyperelliptic_delta_f(g, xi0, delta_counts, xi_counts), t.delta_f))
        if lam is not None:
            checks.append(_equality("Cornalba-Harris degree formula (lambda)", lam, lam_ch))
        if w2 is not None:
            checks.append(_equality("Cornalba-Harris omega^2 formula", w2, w2_ch))
        checks.append(_equality("omega^2 formula is 12*degree - delta_f",
                                w2_ch, 12 * lam_ch - t.delta_f))
        lam = lam_ch if lam is None else lam
        w2 = w2_ch if w2 is None else w2
    else:
        try:
            if lam is None and w2 is not None:
                lam = noether_complete(omega_sq=w2, delta_f=t.delta_f).lambda_
                report.notes.append("lambda completed from Noether's formula")
            elif w2 is None and lam is not None:
                w2 = noether_complete(lambda_=lam, delta_f=t.delta_f).omega_sq
                report.notes.append("omega^2 completed from Noether's formula")
        except InconsistencyError as exc:
            checks.append(Check("Noether formula", "fail", note=str(exc)))
            lam = w2 = None

    if lam is not None:
        d["lambda"] = Fraction(lam)
    if w2 is not None:
        d["omega_sq"] = Fraction(w2)
    if lam is None or w2 is None:
        report.notes.append("lambda and omega^2 unknown: give one of them for a general family")
        checks.append(Check("Noether formula", "skipped", note="needs lambda or omega^2"))
        return report

    checks.append(_equality("Noether formula (12*lambda = omega^2 + delta_f)", 12 * lam, w2 + t.delta_f))
    checks.append(Check("non-isotriviality (lambda > 0)", "pass" if lam > 0 else "fail",
                        Fraction(lam), ">", Fraction(0), Fraction(lam)))
    checks.append(_verdict("Moriwaki slope inequality", F.moriwaki_slope(g, lam, delta_counts), ">="))
    lower = F.lower_bound_general(g, lam, d["delta_1"], d["delta_h"])
    checks.append(_verdict("general lower bound on omega^2", F.InequalityVerdict.ge(w2, lower), ">="))

    strict = t.s_nc > 0 or t.n_fibers == 0
    ub = F.upper_bound(g, L, d["delta_1_c"], d["delta_h_c"], strict)
    up = F.InequalityVerdict.le(w2, ub.value, strict=ub.strict)

    q = fam.q_f
    arakelov_ok = False
    if arakelov:
        if L <= 0:
            checks.append(Check("Arakelov equality", "fail", note=(
                f"log canonical degree of the base is {L}; no family with positive degree saturates it")))
        else:
            q_inferred = g - 2 * Fraction(lam) / L
            if q is None:
                if q_inferred.denominator == 1 and 0 <= q_inferred <= g:
                    q = int(q_inferred)
                    d["q_f_inferred"] = Fraction(q)
                    report.notes.append(f"q_f = {q} inferred from the Arakelov equality")
                    checks.append(Check("Arakelov equality", "pass", Fraction(lam), "==",
                                        F.arakelov_degree(g, q, L), Fraction(0), "q_f inferred"))
                    arakelov_ok = True
                else:
                    checks.append(Check("Arakelov equality", "fail", note=(
                        f"no admissible q_f: the equality would need q_f = {format_rational(q_inferred)}")))
            else:
                c = _equality("Arakelov equality", lam, F.arakelov_degree(g, q, L))
                if c.status == "fail":
                    c.note = f"the degree corresponds to q_f = {format_rational(q_inferred)}"
                arakelov_ok = c.status == "pass"
                checks.append(c)
    note = "Arakelov-sharp, equality case" if up.slack == 0 and arakelov_ok else ""
    checks.append(_verdict("upper bound on omega^2", up, "<" if strict else "<=", note))

    if fam.hyperelliptic and q is not None:
        nc_empty = t.s_nc == 0
        checks.append(Check("q_f <= g/2 for hyperelliptic families (Xiao)",
                            "pass" if 2 * q <= g else "fail", Fraction(q), "<=", Fraction(g, 2),
                            Fraction(g, 2) - q))
        if q < g:
            lb = F.lower_bound_hyperelliptic(g, q, lam, delta_counts, nc_empty)
            branch = "compact Jacobians" if nc_empty else "some non-compact Jacobian"
            checks.append(_verdict(f"hyperelliptic lower bound on omega^2 ({branch})",
                                   F.InequalityVerdict.ge(w2, lb), ">="))
        if 1 <= q:
            checks.append(_verdict("census restriction for q_f >= 1",
                                   F.xi_constraint(g, q, delta_counts, xi_counts), ">="))
        if 2 <= q and nc_empty:
            checks.append(_verdict("census restriction without non-compact fibers",
                                   F.sigma0_constraint(g, q, delta_counts), ">="))
    elif fam.hyperelliptic:
        report.notes.append("q_f unknown: hyperelliptic lower bound and census restrictions skipped")
    return report


def cmd_check(args) -> int:
    try:
        fam = load_family(args.file)
        report = check_family(fam, arakelov=not args.no_arakelov)
    except FileNotFoundError:
        print(f"error: {args.file}: no such file", file=sys.stderr)
        return EXIT_USAGE
    except ValidationError as exc:
        print(f"error: {args.file}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    sys.stdout.write(report.render())
    if args.json:
        Path(args.json).write_text(
            json.dumps({"version": __version__, **report.to_dict()}, indent=2, sort_keys=True) + "\n",
            encoding="utf-8")
    return EXIT_OK if report.status == "consistent" else EXIT_VIOLATED


def cmd_scan(args) -> int:
    from .feasibility.scenarios import genus_scan

    table = genus_scan(args.kind, range(args.g_min, args.g_max + 1), args.regime, jobs=args.jobs)
    out = [table.to_tsv()]
    for column, best in table.column_bounds().items():
        out.append(f"# column {column}: max feasible g = {'none' if best is None else best}\n")
    if any(s.d_regime for s, _ in table.certificates()):
        out.append("# q_f >= 3 without non-compact fibers: both Albanese degree regimes are "
                   "listed; a genus is excluded only when every regime is infeasible\n")
    out.append(table.summary() + "\n")
    sys.stdout.write("".join(out))
    if args.certificates:
        Path(args.certificates).write_text(table.dumps_json(), encoding="utf-8")
    return EXIT_OK


def _g_max(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 2:
        raise argparse.ArgumentTypeError("genus must be at least 2")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kugabound", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"kugabound {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="validate a family document against every applicable formula")
    p.add_argument("file")
    p.add_argument("--json", metavar="OUT", help="also write the report as JSON")
    p.add_argument("--no-arakelov", action="store_true",
                   help="do not assume the family saturates the Arakelov inequality")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("scan", help="decide the genus-bound systems over a range of genera")
    p.add_argument("kind", choices=["general", "hyperelliptic"])
    p.add_argument("--g-max", type=_g_max, required=True)
    p.add_argument("--g-min", type=_g_max, default=2)
    p.add_argument("--regime", choices=["nc-nonempty", "nc-empty", "all"], default="all")
    p.add_argument("--certificates", metavar="OUT", help="write every certificate as JSON")
    p.add_argument("--jobs", type=int, default=1, help="worker processes (default 1)")
    p.set_defaults(func=cmd_scan)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "scan" and args.g_min > args.g_max:
        parser.error("--g-min exceeds --g-max")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
