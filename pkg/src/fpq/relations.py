"""Named fixed-arity relations over constants, loaded from CSV.

Cells share the constant universe with graph IRIs; cross-store joins compare
normalized strings.  Cells are interned at load time since benchmark tables
repeat dates, drivers and coordinates heavily.
"""

from __future__ import annotations

import csv
import io
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable, Sequence

from .errors import ArityMismatchError, RelationFormatError, UnknownRelationError
from .model import EMPTY_MAPPING, Const, Mapping, RelAtom, join_mappings


@dataclass
class Relation:
    name: str
    arity: int
    tuples: set[tuple[str, ...]] = field(default_factory=set)
    column_names: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        if self.arity < 1:
            raise ValueError("relation arity must be positive")
        for t in self.tuples:
            if len(t) != self.arity:
                raise ValueError(f"tuple {t!r} does not match arity {self.arity}")

    def __len__(self) -> int:
        return len(self.tuples)


class RelDatabase:
    """Immutable set of named relations."""

    def __init__(self, relations: Iterable[Relation] = ()):
        self._relations: dict[str, Relation] = {}
        for rel in relations:
            if rel.name in self._relations:
                raise RelationFormatError(f"duplicate relation name {rel.name!r}")
            self._relations[rel.name] = rel

    def get(self, name: str) -> Relation:
        try:
            return self._relations[name]
        except KeyError:
            raise UnknownRelationError(
                f"relation {name!r} is not declared in the database"
            ) from None

    def names(self) -> list[str]:
        return sorted(self._relations)

    def __contains__(self, name: str) -> bool:
        return name in self._relations

    def __len__(self) -> int:
        return len(self._relations)

    def constants(self) -> set[str]:
        return {
            cell
            for rel in self._relations.values()
            for t in rel.tuples
            for cell in t
        }


EMPTY_DATABASE = RelDatabase()


def load_relation(name: str, source: str | IO[str] | IO[bytes]) -> Relation:
    """Load one relation from CSV text, a path, or an open stream.

    The first row is the header and fixes the arity; cells are trimmed of
    surrounding whitespace; duplicate rows collapse.
    """
    if isinstance(source, str):
        text = source
    else:
        data = source.read()
        text = data.decode("utf-8") if isinstance(data, bytes) else data
    reader = csv.reader(io.StringIO(text))
    rows = list(reader)
    if not rows:
        raise RelationFormatError(f"relation {name!r}: empty file, header row required")
    header = tuple(cell.strip() for cell in rows[0])
    arity = len(header)
    tuples: set[tuple[str, ...]] = set()
    for row_no, row in enumerate(rows[1:], start=2):
        if len(row) != arity:
            raise RelationFormatError(
                f"relation {name!r}: row {row_no} has {len(row)} cells, expected {arity}"
            )
        tuples.add(tuple(sys.intern(cell.strip()) for cell in row))
    return Relation(name=name, arity=arity, tuples=tuples, column_names=header)


def load_relation_file(name: str, path: str | Path) -> Relation:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        return load_relation(name, fh.read())


def load_database(manifest_path: str | Path) -> RelDatabase:
    """Load relations listed in a JSON manifest; paths resolve relative to it."""
    manifest_path = Path(manifest_path)
    try:
        spec = json.loads(manifest_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise RelationFormatError(f"manifest {manifest_path}: {exc}") from exc
    entries = spec.get("relations")
    if not isinstance(entries, list):
        raise RelationFormatError(
            f'manifest {manifest_path}: expected {{"relations": [...]}}'
        )
    relations = []
    for entry in entries:
        try:
            name, rel_path = entry["name"], entry["path"]
        except (TypeError, KeyError):
            raise RelationFormatError(
                f"manifest {manifest_path}: each entry needs \"name\" and \"path\""
            ) from None
        relations.append(load_relation_file(name, manifest_path.parent / rel_path))
    return RelDatabase(relations)


def eval_atom(db: RelDatabase, atom: RelAtom) -> set[Mapping]:
    """Mappings over the atom's variables, one per matching tuple.

    Repeated variables enforce equality; constant arguments enforce selection.
    """
    relation = db.get(atom.name)
    if len(atom.args) != relation.arity:
        raise ArityMismatchError(
            f"atom {atom} has {len(atom.args)} arguments, "
            f"relation {relation.name!r} has arity {relation.arity}"
        )
    const_checks: list[tuple[int, str]] = []
    var_positions: dict[str, list[int]] = {}
    for i, arg in enumerate(atom.args):
        if isinstance(arg, Const):
            const_checks.append((i, arg.value))
        else:
            var_positions.setdefault(arg.name, []).append(i)
    out: set[Mapping] = set()
    for row in relation.tuples:
        if any(row[i] != value for i, value in const_checks):
            continue
        ok = True
        for positions in var_positions.values():
            first = row[positions[0]]
            if any(row[i] != first for i in positions[1:]):
                ok = False
                break
        if ok:
            out.add(Mapping({v: row[ps[0]] for v, ps in var_positions.items()}))
    return out


def eval_conjunction(db: RelDatabase, atoms: Sequence[RelAtom]) -> set[Mapping]:
    """Join-fold of the per-atom mapping sets; empty conjunction is the identity."""
    omega: set[Mapping] = {EMPTY_MAPPING}
    for pos, atom in enumerate(atoms):
        omega = join_mappings(omega, eval_atom(db, atom))
        if not omega:
            # remaining atoms still need their declarations checked
            for rest in atoms[pos + 1 :]:
                relation = db.get(rest.name)
                if len(rest.args) != relation.arity:
                    raise ArityMismatchError(
                        f"atom {rest} has {len(rest.args)} arguments, "
                        f"relation {relation.name!r} has arity {relation.arity}"
                    )
            break
    return omega
