"""Published reference data for the worked families.

The package ships the operators and monomial relations that were published
for the quartic-sextic threefold family, together with the family
definitions themselves, as JSON under ``picardfuchs/data``.  These are
verification targets, not derived output: tests and the command line
compare freshly computed objects against them and report disagreements
instead of silently adopting either side.
"""

from __future__ import annotations

import json
from importlib import resources
from typing import Dict, Optional

from .diffop import DiffOperator
from .family import FamilySpec
from .relations import Relation

FAMILY_NAMES = ("quartic_sextic", "cubic_sextic", "quartic_chain", "quintic")


def _read(relpath: str) -> str:
    return resources.files(__package__).joinpath("data", relpath).read_text()


def fixture_family(name: str) -> FamilySpec:
    """One of the bundled deformation families, by short name."""
    if name not in FAMILY_NAMES:
        raise ValueError(f"unknown family {name!r}, expected one of "
                         f"{', '.join(FAMILY_NAMES)}")
    return FamilySpec.from_json(_read(f"families/{name}.json"))


def published_operators() -> Dict[str, DiffOperator]:
    doc = json.loads(_read("published_operators.json"))
    return {name: DiffOperator.from_json(json.dumps(entry))
            for name, entry in doc.items()}


def published_operator(name: str) -> DiffOperator:
    ops = published_operators()
    if name not in ops:
        raise ValueError(f"unknown operator {name!r}, expected one of "
                         f"{', '.join(sorted(ops))}")
    return ops[name]


def published_relation(name: str,
                       fs: Optional[FamilySpec] = None) -> Relation:
    """A published monomial relation, realized against `fs` (default: the
    quartic-sextic family the relations were stated for)."""
    doc = json.loads(_read("published_relations.json"))
    if name not in doc:
        raise ValueError(f"unknown relation {name!r}, expected one of "
                         f"{', '.join(sorted(doc))}")
    entry = doc[name]
    if fs is None:
        fs = fixture_family("quartic_sextic")
    coeffs = {tuple(int(x) for x in key.split(",")): text
              for key, text in entry["coefficients"].items()}
    return Relation.from_coefficients(fs.parameters(), int(entry["level"]),
                                      coeffs, fs)


def published_relations(fs: Optional[FamilySpec] = None
                        ) -> Dict[str, Relation]:
    doc = json.loads(_read("published_relations.json"))
    return {name: published_relation(name, fs) for name in doc}
