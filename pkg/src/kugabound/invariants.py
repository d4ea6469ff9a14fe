"""Discrete invariants of a semi-stable family of curves.

The per-fiber node census (counts of nodes of each type, and for hyperelliptic
families the counts attached to the admissible double cover) is the primary
input.  Everything else is summed from it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Mapping, Sequence

from jsonschema import Draft202012Validator

from .exact import as_rational, format_rational


class ValidationError(ValueError):
    """Input data breaks a structural rule (schema, ranges, per-fiber identity)."""


class InconsistencyError(ValueError):
    """Exact identities among invariants cannot be satisfied."""


def delta_range(g: int) -> range:
    return range(0, g // 2 + 1)


def xi_range(g: int) -> range:
    return range(0, (g - 1) // 2 + 1)


@dataclass(frozen=True)
class NodeRecord:
    """A node of the genus-0 quotient with its index and multiplicity."""

    index_alpha: int
    multiplicity: int = 1

    def __post_init__(self):
        if self.index_alpha < 2:
            raise ValidationError(f"node index must be >= 2, got {self.index_alpha}")
        if self.multiplicity < 1:
            raise ValidationError(f"node multiplicity must be >= 1, got {self.multiplicity}")


def classify_node(node: NodeRecord, g: int) -> tuple[dict[int, int], dict[int, int]]:
    """Contribution of one quotient node to the (delta, xi) counts of a fiber.

    An odd index 2k+1 gives one branched node of type k.  An even index 2j+2 is
    unbranched and lifts to two type-0 nodes; it counts once in xi[j] for
    j >= 1 and twice in xi[0].
    """
    alpha, m = node.index_alpha, node.multiplicity
    if not 2 <= alpha <= g + 1:
        raise ValidationError(f"node index {alpha} outside 2..{g + 1} for genus {g}")
    if alpha % 2:
        return {(alpha - 1) // 2: m}, {}
    j = (alpha - 2) // 2
    return {0: 2 * m}, {j: 2 * m if j == 0 else m}


@dataclass(frozen=True)
class FiberData:
    """Node counts of one singular fiber, dense over the valid index ranges."""

    delta: tuple[int, ...]
    xi: tuple[int, ...] | None = None
    compact_jacobian: bool = True

    @classmethod
    def from_counts(cls, g: int, delta: Mapping[int, int] | None = None,
                    xi: Mapping[int, int] | None = None,
                    compact_jacobian: bool | None = None) -> "FiberData":
        delta = dict(delta or {})
        dense_delta = _dense(delta, delta_range(g), "delta")
        dense_xi = None if xi is None else _dense(dict(xi), xi_range(g), "xi")
        if compact_jacobian is None:
            compact_jacobian = dense_delta[0] == 0
        fiber = cls(dense_delta, dense_xi, compact_jacobian)
        fiber.validate(g)
        return fiber

    @classmethod
    def from_nodes(cls, g: int, nodes: Sequence[NodeRecord]) -> "FiberData":
        delta: dict[int, int] = {}
        xi: dict[int, int] = {j: 0 for j in xi_range(g)}
        for node in nodes:
            d, x = classify_node(node, g)
            for k, v in d.items():
                delta[k] = delta.get(k, 0) + v
            for k, v in x.items():
                xi[k] += v
        return cls.from_counts(g, delta, xi)

    def validate(self, g: int, where: str = "fiber") -> None:
        if len(self.delta) != len(delta_range(g)):
            raise ValidationError(f"{where}: delta must cover indices 0..{g // 2}")
        if any(v < 0 for v in self.delta):
            raise ValidationError(f"{where}: negative delta count")
        if self.compact_jacobian != (self.delta[0] == 0):
            raise ValidationError(
                f"{where}: compact_jacobian={str(self.compact_jacobian).lower()} "
                f"but delta[0]={self.delta[0]} (compact iff no type-0 nodes)")
        if self.xi is not None:
            if len(self.xi) != len(xi_range(g)):
                raise ValidationError(f"{where}: xi must cover indices 0..{(g - 1) // 2}")
            if any(v < 0 for v in self.xi):
                raise ValidationError(f"{where}: negative xi count")
            expected = self.xi[0] + 2 * sum(self.xi[1:])
            if self.delta[0] != expected:
                raise ValidationError(
                    f"{where}: delta[0]={self.delta[0]} but xi[0] + 2*sum(xi[j>=1]) = {expected}")

    @property
    def node_count(self) -> int:
        return sum(self.delta)


def _dense(counts: Mapping[int, int], indices: range, label: str) -> tuple[int, ...]:
    for k, v in counts.items():
        if k not in indices:
            raise ValidationError(f"{label} index {k} outside {indices.start}..{indices.stop - 1}")
        if isinstance(v, bool) or not isinstance(v, int):
            raise ValidationError(f"{label}[{k}] must be an integer, got {v!r}")
    return tuple(int(counts.get(k, 0)) for k in indices)


@dataclass(frozen=True)
class FamilyInvariants:
    """A semi-stable family: genus, base genus, irregularity and fiber census.

    ``lambda_`` and ``omega_sq`` are optional stated values; for hyperelliptic
    families they are computable from the census and are then cross-checked.
    """

    g: int
    b: int
    fibers: tuple[FiberData, ...] = ()
    q_f: int | None = None
    hyperelliptic: bool = False
    lambda_: Fraction | None = None
    omega_sq: Fraction | None = None

    def __post_init__(self):
        if self.g < 2:
            raise ValidationError(f"genus must be >= 2, got {self.g}")
        if self.b < 0:
            raise ValidationError(f"base genus must be >= 0, got {self.b}")
        if self.q_f is not None and not 0 <= self.q_f <= self.g:
            raise ValidationError(f"q_f must lie in 0..{self.g}, got {self.q_f}")
        for n, fiber in enumerate(self.fibers):
            fiber.validate(self.g, where=f"fibers[{n}]")
            if fiber.xi is not None and not self.hyperelliptic:
                raise ValidationError(f"fibers[{n}]: xi counts given for a non-hyperelliptic family")
            if self.hyperelliptic and fiber.xi is None and fiber.delta[0]:
                raise ValidationError(f"fibers[{n}]: hyperelliptic fiber with type-0 nodes needs xi counts")

    @property
    def s_nc(self) -> int:
        return sum(1 for f in self.fibers if not f.compact_jacobian)

    @property
    def log_canon_base(self) -> int:
        """Degree of the log canonical sheaf of the base along the non-compact locus."""
        return 2 * self.b - 2 + self.s_nc


@dataclass(frozen=True)
class Totals:
    g: int
    delta: tuple[int, ...]
    delta_c: tuple[int, ...]
    xi: tuple[int, ...] | None
    s_nc: int
    n_fibers: int

    @property
    def delta_h(self) -> int:
        return sum(self.delta[2:])

    @property
    def delta_h_c(self) -> int:
        return sum(self.delta_c[2:])

    @property
    def delta_f(self) -> int:
        return sum(self.delta)

    def nonzero(self) -> dict[str, int]:
        out = {f"delta[{i}]": v for i, v in enumerate(self.delta) if v}
        if self.xi is not None:
            out.update({f"xi[{j}]": v for j, v in enumerate(self.xi) if v})
        return out


def totals(fam: FamilyInvariants) -> Totals:
    g = fam.g
    delta = [0] * len(delta_range(g))
    delta_c = [0] * len(delta_range(g))
    xi = [0] * len(xi_range(g)) if fam.hyperelliptic else None
    for n, fiber in enumerate(fam.fibers):
        fiber.validate(g, where=f"fibers[{n}]")
        for i, v in enumerate(fiber.delta):
            delta[i] += v
            if fiber.compact_jacobian:
                delta_c[i] += v
        if xi is not None and fiber.xi is not None:
            for j, v in enumerate(fiber.xi):
                xi[j] += v
    out = Totals(g, tuple(delta), tuple(delta_c), None if xi is None else tuple(xi),
                 fam.s_nc, len(fam.fibers))
    if xi is not None:
        # node total through the double-cover census must agree with the direct sum
        via_xi = xi[0] + sum(delta[1:]) + 2 * sum(xi[1:])
        if via_xi != out.delta_f:
            raise ValidationError(f"node total {out.delta_f} disagrees with xi census {via_xi}")
    return out


@dataclass(frozen=True)
class DerivedInvariants:
    delta_f: Fraction
    lambda_: Fraction
    omega_sq: Fraction
    log_canon_base: Fraction | None = None


def noether_complete(*, lambda_=None, omega_sq=None, delta_f=None,
                     log_canon_base=None) -> DerivedInvariants:
    """Solve ``12 * lambda = omega_sq + delta_f`` for the one missing quantity."""
    given = {k: v for k, v in (("lambda", lambda_), ("omega_sq", omega_sq),
                               ("delta_f", delta_f)) if v is not None}
    if len(given) != 2:
        raise ValueError(f"noether_complete needs exactly two of lambda, omega_sq, delta_f; got {sorted(given)}")
    if lambda_ is None:
        omega_sq, delta_f = as_rational(omega_sq), as_rational(delta_f)
        lambda_ = (omega_sq + delta_f) / 12
    elif omega_sq is None:
        lambda_, delta_f = as_rational(lambda_), as_rational(delta_f)
        omega_sq = 12 * lambda_ - delta_f
    else:
        lambda_, omega_sq = as_rational(lambda_), as_rational(omega_sq)
        delta_f = 12 * lambda_ - omega_sq
    for name, value in (("lambda", lambda_), ("omega_sq", omega_sq), ("delta_f", delta_f)):
        if value < 0:
            raise InconsistencyError(f"Noether completion gives {name} = {format_rational(value)} < 0")
    lcb = None if log_canon_base is None else as_rational(log_canon_base)
    return DerivedInvariants(delta_f, lambda_, omega_sq, lcb)


FAMILY_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "required": ["genus", "base_genus", "hyperelliptic", "fibers"],
    "properties": {
        "genus": {"type": "integer", "minimum": 2},
        "base_genus": {"type": "integer", "minimum": 0},
        "q_f": {"type": "integer", "minimum": 0},
        "hyperelliptic": {"type": "boolean"},
        "lambda": {"type": "string", "pattern": r"^-?\d+(/\d+)?$"},
        "omega_sq": {"type": "string", "pattern": r"^-?\d+(/\d+)?$"},
        "fibers": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["compact_jacobian", "delta"],
                "properties": {
                    "compact_jacobian": {"type": "boolean"},
                    "delta": {"$ref": "#/$defs/counts"},
                    "xi": {"$ref": "#/$defs/counts"},
                },
            },
        },
    },
    "$defs": {
        "counts": {
            "type": "object",
            "propertyNames": {"pattern": r"^(0|[1-9]\d*)$"},
            "additionalProperties": {"type": "integer", "minimum": 0},
        },
    },
}

_validator = Draft202012Validator(FAMILY_SCHEMA)


def family_from_dict(doc) -> FamilyInvariants:
    errors = sorted(_validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        first = errors[0]
        loc = "/".join(str(p) for p in first.absolute_path) or "(root)"
        raise ValidationError(f"{loc}: {first.message}")
    g = doc["genus"]
    fibers = []
    for n, raw in enumerate(doc["fibers"]):
        delta = {int(k): v for k, v in raw["delta"].items()}
        xi = None if "xi" not in raw else {int(k): v for k, v in raw["xi"].items()}
        try:
            dense_delta = _dense(delta, delta_range(g), "delta")
            dense_xi = None if xi is None else _dense(xi, xi_range(g), "xi")
        except ValidationError as exc:
            raise ValidationError(f"fibers/{n}: {exc}") from None
        fibers.append(FiberData(dense_delta, dense_xi, raw["compact_jacobian"]))
    return FamilyInvariants(
        g=g,
        b=doc["base_genus"],
        fibers=tuple(fibers),
        q_f=doc.get("q_f"),
        hyperelliptic=doc["hyperelliptic"],
        lambda_=as_rational(doc["lambda"]) if "lambda" in doc else None,
        omega_sq=as_rational(doc["omega_sq"]) if "omega_sq" in doc else None,
    )


def load_family(path) -> FamilyInvariants:
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return family_from_dict(doc)


def family_to_dict(fam: FamilyInvariants) -> dict:
    doc = {"genus": fam.g, "base_genus": fam.b}
    if fam.q_f is not None:
        doc["q_f"] = fam.q_f
    doc["hyperelliptic"] = fam.hyperelliptic
    if fam.lambda_ is not None:
        doc["lambda"] = format_rational(fam.lambda_)
    if fam.omega_sq is not None:
        doc["omega_sq"] = format_rational(fam.omega_sq)
    fibers = []
    for fiber in fam.fibers:
        entry = {"compact_jacobian": fiber.compact_jacobian,
                 "delta": {str(i): v for i, v in enumerate(fiber.delta) if v}}
        if fiber.xi is not None:
            entry["xi"] = {str(j): v for j, v in enumerate(fiber.xi) if v}
        fibers.append(entry)
    doc["fibers"] = fibers
    return doc
