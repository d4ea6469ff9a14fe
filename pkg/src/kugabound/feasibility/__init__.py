"""Linear feasibility over the rationals and the genus-bound scenarios built on it."""

from .scenarios import (GENERAL, HYPERELLIPTIC, Scenario, ScenarioError, ScanTable,
                        build_system, decide, genus_scan, scenarios_for)
from .system import (Certificate, CertificateError, Constraint, LinearSystem, Relation,
                     fourier_motzkin, implies, project, simplest_between)

__all__ = [
    "GENERAL", "HYPERELLIPTIC", "Scenario", "ScenarioError", "ScanTable", "build_system",
    "decide", "genus_scan", "scenarios_for", "Certificate", "CertificateError", "Constraint",
    "LinearSystem", "Relation", "fourier_motzkin", "implies", "project", "simplest_between",
]
