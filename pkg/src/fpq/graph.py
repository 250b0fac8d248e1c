"""Immutable in-memory RDF graph with SPO/POS/OSP indexes and path traces.

The text format is one triple per line, ``S P O .`` where each term is an
``<iri>`` or a bare token matching ``[A-Za-z0-9_.:+-]+``.  Whole-line ``#``
comments and blank lines are ignored; a standalone trailing ``.`` is optional
(a dot glued to the object is part of the token, since the charset allows it).
"""

from __future__ import annotations

import re
from typing import IO, Iterable, Iterator, NamedTuple, Sequence

from .errors import GraphFormatError, NotAPathError
from .model import SELF, Axis

_BARE_TOKEN = re.compile(r"[A-Za-z0-9_.:+-]+")
_IRI_TOKEN = re.compile(r"<([^<>\s]+)>")

Index = dict  # str -> dict[str, set[str]]


class Triple(NamedTuple):
    s: str
    p: str
    o: str


class RdfGraph:
    """A finite set of triples plus the three index routes.

    Immutable after construction; `spo`, `pos` and `osp` are exposed for the
    evaluators and must not be mutated.
    """

    __slots__ = ("triples", "spo", "pos", "osp", "adom")

    def __init__(self, triples: Iterable[Triple | tuple[str, str, str]]):
        ts = frozenset(Triple(*t) for t in triples)
        spo: Index = {}
        pos: Index = {}
        osp: Index = {}
        for s, p, o in ts:
            spo.setdefault(s, {}).setdefault(p, set()).add(o)
            pos.setdefault(p, {}).setdefault(o, set()).add(s)
            osp.setdefault(o, {}).setdefault(s, set()).add(p)
        object.__setattr__(self, "triples", ts)
        object.__setattr__(self, "spo", spo)
        object.__setattr__(self, "pos", pos)
        object.__setattr__(self, "osp", osp)
        adom = frozenset(c for t in ts for c in t)
        object.__setattr__(self, "adom", adom)

    def __setattr__(self, name: str, value: object) -> None:
        raise AttributeError("RdfGraph is immutable")

    def __len__(self) -> int:
        return len(self.triples)

    def __iter__(self) -> Iterator[Triple]:
        return iter(self.triples)

    def __contains__(self, triple: object) -> bool:
        return triple in self.triples

    def __or__(self, other: "RdfGraph") -> "RdfGraph":
        return RdfGraph(self.triples | other.triples)

    def match(
        self,
        s: str | None = None,
        p: str | None = None,
        o: str | None = None,
    ) -> set[Triple]:
        """All triples agreeing with the bound positions.

        Routes through SPO/POS/OSP so any bound combination avoids a scan.
        """
        if s is not None:
            by_p = self.spo.get(s, {})
            if p is not None:
                objs = by_p.get(p, ())
                if o is not None:
                    return {Triple(s, p, o)} if o in objs else set()
                return {Triple(s, p, obj) for obj in objs}
            if o is not None:
                preds = self.osp.get(o, {}).get(s, ())
                return {Triple(s, pred, o) for pred in preds}
            return {Triple(s, pred, obj) for pred, objs in by_p.items() for obj in objs}
        if p is not None:
            by_o = self.pos.get(p, {})
            if o is not None:
                return {Triple(sub, p, o) for sub in by_o.get(o, ())}
            return {Triple(sub, p, obj) for obj, subs in by_o.items() for sub in subs}
        if o is not None:
            by_s = self.osp.get(o, {})
            return {Triple(sub, pred, o) for sub, preds in by_s.items() for pred in preds}
        return set(self.triples)


def adom(graph: RdfGraph) -> frozenset[str]:
    """Active domain: every constant in any position, predicates included."""
    return graph.adom


def _parse_term(token: str, line_no: int) -> str:
    m = _IRI_TOKEN.fullmatch(token)
    if m:
        return m.group(1)
    if _BARE_TOKEN.fullmatch(token):
        return token
    raise GraphFormatError(f"malformed term {token!r}", line_no)


def parse_graph(text: str) -> RdfGraph:
    """Parse graph text; duplicate triples collapse silently."""
    triples: list[Triple] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if tokens and tokens[-1] == ".":
            tokens = tokens[:-1]
        if len(tokens) < 3:
            raise GraphFormatError(
                f"triple has {len(tokens)} term(s), expected subject, predicate and object",
                line_no,
            )
        if len(tokens) > 3:
            raise GraphFormatError(
                f"unexpected extra term {tokens[3]!r}", line_no
            )
        s, p, o = (_parse_term(tok, line_no) for tok in tokens)
        triples.append(Triple(s, p, o))
    return RdfGraph(triples)


def load_graph(source: str | IO[bytes] | IO[str]) -> RdfGraph:
    """Load a graph from a path or an open text/byte stream."""
    if isinstance(source, str):
        with open(source, "rb") as fh:
            data = fh.read()
    else:
        data = source.read()
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    return parse_graph(data)


# --- paths and traces --------------------------------------------------------

class TraceLabel(NamedTuple):
    """One step label of a path trace; `const` is None for bare axes."""

    axis: Axis
    const: str | None

    def __str__(self) -> str:
        return str(self.axis) if self.const is None else f"{self.axis}::{self.const}"


def _directed_labels(graph: RdfGraph, a: str, b: str, inverted: bool) -> set[TraceLabel]:
    """Labels of (a, b) from triples read left-to-right; inverses via the flag."""
    out: set[TraceLabel] = set()
    preds = graph.spo.get(a, {})
    mids = {p for p, objs in preds.items() if b in objs}
    if mids:
        nx = Axis("next", inverted)
        out.add(TraceLabel(nx, None))
        out.update(TraceLabel(nx, c) for c in mids)
    thirds = preds.get(b)
    if thirds:
        ed = Axis("edge", inverted)
        out.add(TraceLabel(ed, None))
        out.update(TraceLabel(ed, c) for c in thirds)
    firsts = graph.pos.get(a, {}).get(b)
    if firsts:
        nd = Axis("node", inverted)
        out.add(TraceLabel(nd, None))
        out.update(TraceLabel(nd, c) for c in firsts)
    return out


def pair_labels(graph: RdfGraph, a: str, b: str) -> set[TraceLabel]:
    """Every label of the ordered pair (a, b) under the ten labeling rules."""
    labels: set[TraceLabel] = set()
    if a == b:
        labels.add(TraceLabel(SELF, None))
        labels.add(TraceLabel(SELF, a))
    labels |= _directed_labels(graph, a, b, inverted=False)
    labels |= _directed_labels(graph, b, a, inverted=True)
    return labels


def is_path(graph: RdfGraph, nodes: Sequence[str]) -> bool:
    """True iff `nodes` is a non-empty path of the graph."""
    if not nodes:
        return False
    if any(n not in graph.adom for n in nodes):
        return False
    return all(
        pair_labels(graph, nodes[i], nodes[i + 1]) for i in range(len(nodes) - 1)
    )


def traces_of_path(graph: RdfGraph, nodes: Sequence[str]) -> set[tuple[TraceLabel, ...]]:
    """All traces of the path; a single-node path has the empty trace only."""
    if not nodes:
        raise NotAPathError("a path must contain at least one constant")
    for n in nodes:
        if n not in graph.adom:
            raise NotAPathError(f"{n!r} does not occur in the graph")
    per_step: list[set[TraceLabel]] = []
    for i in range(len(nodes) - 1):
        labels = pair_labels(graph, nodes[i], nodes[i + 1])
        if not labels:
            raise NotAPathError(
                f"{nodes[i]!r} and {nodes[i + 1]!r} do not occur in a common triple"
            )
        per_step.append(labels)
    traces: set[tuple[TraceLabel, ...]] = {()}
    for labels in per_step:
        traces = {t + (l,) for t in traces for l in labels}
    return traces
