"""Abstract syntax and the mapping algebra shared by every evaluator.

Constants are opaque normalized strings.  Variables are written with a `?`
prefix in the surface syntax; internally `Var.name` holds the bare name.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping as TMapping, Union

from .errors import QueryValidationError

AXIS_BASES = ("self", "next", "edge", "node")

_BARE_CONST = re.compile(r"[A-Za-z0-9_][A-Za-z0-9_.-]*")


@dataclass(frozen=True)
class Axis:
    """A navigation axis; `self` has no distinct inverse."""

    base: str
    inverted: bool = False

    def __post_init__(self) -> None:
        if self.base not in AXIS_BASES:
            raise ValueError(f"unknown axis base {self.base!r}")
        if self.base == "self" and self.inverted:
            object.__setattr__(self, "inverted", False)

    def inverse(self) -> "Axis":
        if self.base == "self":
            return self
        return Axis(self.base, not self.inverted)

    def __str__(self) -> str:
        return self.base + ("^-1" if self.inverted else "")


SELF = Axis("self")
NEXT = Axis("next")
EDGE = Axis("edge")
NODE = Axis("node")


# --- nested regular expressions ------------------------------------------

class Nre:
    """Base class for nre AST nodes; all nodes are frozen and hashable."""

    __slots__ = ()


@dataclass(frozen=True)
class AxisExpr(Nre):
    axis: Axis


@dataclass(frozen=True)
class AxisConst(Nre):
    axis: Axis
    const: str


@dataclass(frozen=True)
class AxisNest(Nre):
    axis: Axis
    inner: Nre


@dataclass(frozen=True)
class Concat(Nre):
    left: Nre
    right: Nre


@dataclass(frozen=True)
class Alt(Nre):
    left: Nre
    right: Nre


@dataclass(frozen=True)
class Star(Nre):
    inner: Nre


def nre_size(e: Nre) -> int:
    """Node count of the expression tree."""
    match e:
        case AxisExpr() | AxisConst():
            return 1
        case AxisNest(_, inner) | Star(inner):
            return 1 + nre_size(inner)
        case Concat(left, right) | Alt(left, right):
            return 1 + nre_size(left) + nre_size(right)
    raise TypeError(f"not an nre node: {e!r}")


def nre_converse(e: Nre) -> Nre:
    """Expression denoting the converse relation of ``e``."""
    match e:
        case AxisExpr(axis):
            return AxisExpr(axis.inverse())
        case AxisConst(axis, c):
            return AxisConst(axis.inverse(), c)
        case AxisNest(axis, inner):
            # the nest test constrains the axis' third component, which the
            # converse preserves; self-nests are symmetric
            return AxisNest(axis.inverse(), inner)
        case Concat(left, right):
            return Concat(nre_converse(right), nre_converse(left))
        case Alt(left, right):
            return Alt(nre_converse(left), nre_converse(right))
        case Star(inner):
            return Star(nre_converse(inner))
    raise TypeError(f"not an nre node: {e!r}")


def _render_const(c: str) -> str:
    if _BARE_CONST.fullmatch(c):
        return c
    if '"' not in c and "\\" not in c:
        return f'"{c}"'
    if ">" not in c:
        return f"<{c}>"
    escaped = c.replace("\\", "\\\\").replace('"', '\\"')
    return f'"{escaped}"'


def nre_to_text(e: Nre, _level: int = 0) -> str:
    """Render an nre; parses back to an identical tree."""
    # levels: 0 = alternation, 1 = sequence, 2 = postfix/atom
    match e:
        case AxisExpr(axis):
            text, level = str(axis), 2
        case AxisConst(axis, c):
            text, level = f"{axis}::{_render_const(c)}", 2
        case AxisNest(axis, inner):
            text, level = f"{axis}::[{nre_to_text(inner)}]", 2
        case Star(inner):
            text, level = f"{nre_to_text(inner, 2)}*", 2
        case Concat(left, right):
            # the parser folds '/' and '|' to the left, so a nested right
            # child of the same operator needs parentheses to round-trip
            text, level = f"{nre_to_text(left, 1)}/{nre_to_text(right, 2)}", 1
        case Alt(left, right):
            text, level = f"{nre_to_text(left, 0)}|{nre_to_text(right, 1)}", 0
        case _:
            raise TypeError(f"not an nre node: {e!r}")
    if level < _level:
        return f"({text})"
    return text


# --- property paths -------------------------------------------------------

class Pp:
    """Base class for SPARQL 1.1 property-path AST nodes."""

    __slots__ = ()


@dataclass(frozen=True)
class PpIri(Pp):
    iri: str


@dataclass(frozen=True)
class PpSeq(Pp):
    left: Pp
    right: Pp


@dataclass(frozen=True)
class PpAlt(Pp):
    left: Pp
    right: Pp


@dataclass(frozen=True)
class PpInv(Pp):
    inner: Pp


@dataclass(frozen=True)
class PpOpt(Pp):
    inner: Pp


@dataclass(frozen=True)
class PpPlus(Pp):
    inner: Pp


@dataclass(frozen=True)
class PpStar(Pp):
    inner: Pp


@dataclass(frozen=True)
class PpNegSet(Pp):
    """Negated property set; members are split by direction."""

    forward: frozenset[str]
    inverse: frozenset[str]

    def __post_init__(self) -> None:
        if not self.forward and not self.inverse:
            raise ValueError("negated property set needs at least one member")


def pp_to_text(p: Pp, _level: int = 0) -> str:
    """Render a property path; parses back to an identical tree."""
    # levels: 0 = alternation, 1 = sequence, 2 = inverse, 3 = postfix/atom
    match p:
        case PpIri(iri):
            text, level = _render_const(iri), 3
        case PpInv(inner):
            text, level = f"^{pp_to_text(inner, 2)}", 2
        case PpOpt(inner):
            text, level = f"{pp_to_text(inner, 3)}?", 3
        case PpStar(inner):
            text, level = f"{pp_to_text(inner, 3)}*", 3
        case PpPlus(inner):
            text, level = f"{pp_to_text(inner, 3)}+", 3
        case PpSeq(left, right):
            text, level = f"{pp_to_text(left, 1)}/{pp_to_text(right, 2)}", 1
        case PpAlt(left, right):
            text, level = f"{pp_to_text(left, 0)}|{pp_to_text(right, 1)}", 0
        case PpNegSet(forward, inverse):
            members = [_render_const(i) for i in sorted(forward)]
            members += [f"^{_render_const(i)}" for i in sorted(inverse)]
            body = "|".join(members)
            text = f"!{body}" if len(members) == 1 else f"!({body})"
            level = 3
        case _:
            raise TypeError(f"not a property-path node: {p!r}")
    if level < _level:
        return f"({text})"
    return text


# --- terms, atoms, queries -------------------------------------------------

@dataclass(frozen=True)
class Var:
    name: str

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("variable name must be non-empty")

    def __str__(self) -> str:
        return "?" + self.name


@dataclass(frozen=True)
class Const:
    value: str

    def __post_init__(self) -> None:
        if not self.value:
            raise ValueError("constant must be non-empty")

    def __str__(self) -> str:
        return _render_const(self.value)


Term = Union[Var, Const]


@dataclass(frozen=True)
class TriplePattern:
    subject: Term
    expr: Nre
    object: Term

    def variables(self) -> set[str]:
        return {t.name for t in (self.subject, self.object) if isinstance(t, Var)}

    def __str__(self) -> str:
        return f"({self.subject}, {nre_to_text(self.expr)}, {self.object})"


@dataclass(frozen=True)
class RelAtom:
    name: str
    args: tuple[Term, ...]

    def __post_init__(self) -> None:
        if not self.args:
            raise ValueError("relational atom needs at least one argument")

    def variables(self) -> set[str]:
        return {t.name for t in self.args if isinstance(t, Var)}

    def __str__(self) -> str:
        return f"{self.name}({', '.join(str(a) for a in self.args)})"


@dataclass(frozen=True)
class Rule:
    """One conjunctive block: head(u, v) with graph and relational atoms."""

    head: tuple[Term, Term]
    triple_atoms: tuple[TriplePattern, ...] = ()
    rel_atoms: tuple[RelAtom, ...] = ()

    def head_vars(self) -> set[str]:
        return {t.name for t in self.head if isinstance(t, Var)}

    def body_vars(self) -> set[str]:
        out: set[str] = set()
        for atom in self.triple_atoms:
            out |= atom.variables()
        for atom in self.rel_atoms:
            out |= atom.variables()
        return out

    def __str__(self) -> str:
        atoms = [str(a) for a in self.triple_atoms] + [str(a) for a in self.rel_atoms]
        return ", ".join(atoms)


@dataclass(frozen=True)
class Query:
    """Union of rules sharing one head; single-rule queries are the common case."""

    name: str
    rules: tuple[Rule, ...]

    def __post_init__(self) -> None:
        if not self.rules:
            raise ValueError("query needs at least one rule")

    @property
    def head(self) -> tuple[Term, Term]:
        return self.rules[0].head

    def head_vars(self) -> set[str]:
        return self.rules[0].head_vars()

    def is_boolean(self) -> bool:
        return not self.head_vars()

    def head_var_order(self) -> list[str]:
        """Head variable names in head position order, deduplicated."""
        seen: list[str] = []
        for t in self.head:
            if isinstance(t, Var) and t.name not in seen:
                seen.append(t.name)
        return seen


def validate(query: Query) -> None:
    """Check boundedness of every rule and head agreement across rules.

    Raises QueryValidationError naming the offending variable or rule.
    """
    head = query.rules[0].head
    for i, rule in enumerate(query.rules, start=1):
        if rule.head != head:
            raise QueryValidationError(
                f"rule {i} of {query.name!r} has head "
                f"({rule.head[0]}, {rule.head[1]}), expected ({head[0]}, {head[1]})"
            )
        unbound = rule.head_vars() - rule.body_vars()
        if unbound:
            name = sorted(unbound)[0]
            raise QueryValidationError(
                f"?{name} unbound: head variable of {query.name!r} "
                f"does not occur in the body of rule {i}"
            )


def query_to_text(query: Query) -> str:
    u, v = query.head
    head = f"{query.name}({u}, {v})"
    return " ;\n".join(f"{head} :- {rule}" for rule in query.rules)


# --- mappings ---------------------------------------------------------------

class Mapping:
    """Immutable partial function from variable names to constants."""

    __slots__ = ("_bindings", "_domain", "_hash")

    def __init__(self, bindings: TMapping[str, str] | Iterable[tuple[str, str]] = ()):
        d = dict(bindings)
        object.__setattr__(self, "_bindings", d)
        object.__setattr__(self, "_domain", frozenset(d))
        object.__setattr__(self, "_hash", hash(frozenset(d.items())))

    def __setattr__(self, name: str, value: object) -> None:
        raise AttributeError("Mapping is immutable")

    @property
    def domain(self) -> frozenset[str]:
        return self._domain

    def __getitem__(self, var: str) -> str:
        return self._bindings[var]

    def get(self, var: str, default: str | None = None) -> str | None:
        return self._bindings.get(var, default)

    def items(self) -> Iterator[tuple[str, str]]:
        return iter(self._bindings.items())

    def as_dict(self) -> dict[str, str]:
        return dict(self._bindings)

    def __len__(self) -> int:
        return len(self._bindings)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Mapping):
            return NotImplemented
        return self._bindings == other._bindings

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        inner = ", ".join(f"?{k}->{v}" for k, v in sorted(self._bindings.items()))
        return "{" + inner + "}"

    def compatible(self, other: "Mapping") -> bool:
        a, b = self._bindings, other._bindings
        if len(b) < len(a):
            a, b = b, a
        return all(b.get(k, v) == v for k, v in a.items())

    def merge(self, other: "Mapping") -> "Mapping":
        merged = dict(self._bindings)
        merged.update(other._bindings)
        return Mapping(merged)

    def restrict(self, variables: Iterable[str]) -> "Mapping":
        keep = set(variables)
        return Mapping({k: v for k, v in self._bindings.items() if k in keep})


EMPTY_MAPPING = Mapping()

MappingSet = set  # set[Mapping]; plain sets keep the algebra lightweight


def compatible(m1: Mapping, m2: Mapping) -> bool:
    """True iff the two mappings agree on every shared variable."""
    return m1.compatible(m2)


def join_mappings(omega1: set[Mapping], omega2: set[Mapping]) -> set[Mapping]:
    """All unions of compatible pairs drawn from the two sets.

    Hash join on the shared variables when both sides have uniform domains
    (the evaluator always produces such sets); nested-loop fallback otherwise.
    """
    if not omega1 or not omega2:
        return set()
    small, large = (omega1, omega2) if len(omega1) <= len(omega2) else (omega2, omega1)
    sdoms = {m.domain for m in small}
    ldoms = {m.domain for m in large}
    if len(sdoms) == 1 and len(ldoms) == 1:
        shared = sorted(next(iter(sdoms)) & next(iter(ldoms)))
        table: dict[tuple[str, ...], list[Mapping]] = {}
        for m in small:
            table.setdefault(tuple(m[v] for v in shared), []).append(m)
        out: set[Mapping] = set()
        for m in large:
            for mate in table.get(tuple(m[v] for v in shared), ()):
                out.add(mate.merge(m))
        return out
    return {
        m1.merge(m2) for m1 in small for m2 in large if m1.compatible(m2)
    }


def restrict_mappings(omega: Iterable[Mapping], variables: Iterable[str]) -> set[Mapping]:
    keep = set(variables)
    return {m.restrict(keep) for m in omega}
