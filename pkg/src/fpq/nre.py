"""Indexed evaluation of nested regular expressions over an RDF graph.

Expressions compile to an epsilon-NFA (Thompson construction); evaluation is
reachability over the product of the graph's axis-transition relation and
that automaton, one breadth-first search per seed constant.  Nested
sub-expressions are materialized innermost-first as "has a successor" node
sets and cached per sub-tree, so a nest test is a set-membership guard.

Directed evaluation from a seed set never materializes the full binary
relation; backward evaluation runs the converse expression forward.  The
property-path engine compiles onto the same automaton and runner.
"""

from __future__ import annotations

from collections import deque
from typing import Callable, Iterable, Literal

from .graph import RdfGraph
from .model import (
    Alt,
    AxisConst,
    AxisExpr,
    AxisNest,
    Axis,
    Concat,
    Const,
    EMPTY_MAPPING,
    Mapping,
    Nre,
    Star,
    TriplePattern,
    nre_converse,
)

# Transition labels, all tuples:
#   ("eps",)                      unconditional, node unchanged
#   ("guard_const", c)            pass iff node == c          (self::c)
#   ("guard_nest", inner)         pass iff node in nest set   (self::[e])
#   ("step", axis, key)           one axis hop; key is None, ("const", c)
#                                 or ("nest", inner-expression)
#   ("negstep", fwd, inv)         property-path negated set; either member
#                                 frozenset may be None (direction absent)
EPS = ("eps",)

NestLookup = Callable[[Nre], frozenset]


class Nfa:
    __slots__ = ("start", "accept", "adj", "radj")

    def __init__(self, start: int, accept: int, n_states: int):
        self.start = start
        self.accept = accept
        self.adj: list[list[tuple[tuple, int]]] = [[] for _ in range(n_states)]
        self.radj: list[list[tuple[tuple, int]]] = [[] for _ in range(n_states)]

    def add(self, src: int, label: tuple, dst: int) -> None:
        self.adj[src].append((label, dst))
        self.radj[dst].append((label, src))


def _compile(expr: Nre) -> Nfa:
    transitions: list[tuple[int, tuple, int]] = []
    counter = [0]

    def fresh() -> int:
        counter[0] += 1
        return counter[0] - 1

    def build(e: Nre) -> tuple[int, int]:
        match e:
            case AxisExpr(axis):
                s, t = fresh(), fresh()
                label = EPS if axis.base == "self" else ("step", axis, None)
                transitions.append((s, label, t))
                return s, t
            case AxisConst(axis, c):
                s, t = fresh(), fresh()
                if axis.base == "self":
                    label = ("guard_const", c)
                else:
                    label = ("step", axis, ("const", c))
                transitions.append((s, label, t))
                return s, t
            case AxisNest(axis, inner):
                s, t = fresh(), fresh()
                if axis.base == "self":
                    label = ("guard_nest", inner)
                else:
                    label = ("step", axis, ("nest", inner))
                transitions.append((s, label, t))
                return s, t
            case Concat(left, right):
                ls, lt = build(left)
                rs, rt = build(right)
                transitions.append((lt, EPS, rs))
                return ls, rt
            case Alt(left, right):
                s, t = fresh(), fresh()
                ls, lt = build(left)
                rs, rt = build(right)
                transitions.extend(
                    [(s, EPS, ls), (s, EPS, rs), (lt, EPS, t), (rt, EPS, t)]
                )
                return s, t
            case Star(inner):
                s, t = fresh(), fresh()
                is_, it = build(inner)
                transitions.extend(
                    [(s, EPS, t), (s, EPS, is_), (it, EPS, is_), (it, EPS, t)]
                )
                return s, t
        raise TypeError(f"not an nre node: {e!r}")

    start, accept = build(expr)
    nfa = Nfa(start, accept, counter[0])
    for src, label, dst in transitions:
        nfa.add(src, label, dst)
    return nfa


def _axis_neighbors(graph: RdfGraph, node: str, axis: Axis, key) -> Iterable[str]:
    """Constants one `axis` hop away from `node`; empty when none."""
    base, inv = axis.base, axis.inverted
    if base == "next":
        if not inv:
            d = graph.spo.get(node)
            if not d:
                return ()
            if key is None:
                return set().union(*d.values())
            if key[0] == "const":
                return d.get(key[1], ())
            hit = d.keys() & key[1]
            return set().union(*(d[p] for p in hit)) if hit else ()
        d = graph.osp.get(node)
        if not d:
            return ()
        if key is None:
            return d.keys()
        if key[0] == "const":
            return graph.pos.get(key[1], {}).get(node, ())
        return {s for s, preds in d.items() if preds & key[1]}
    if base == "edge":
        if not inv:
            d = graph.spo.get(node)
            if not d:
                return ()
            if key is None:
                return d.keys()
            if key[0] == "const":
                return graph.osp.get(key[1], {}).get(node, ())
            return {p for p, objs in d.items() if objs & key[1]}
        d = graph.pos.get(node)
        if not d:
            return ()
        if key is None:
            return set().union(*d.values())
        if key[0] == "const":
            return d.get(key[1], ())
        hit = d.keys() & key[1]
        return set().union(*(d[o] for o in hit)) if hit else ()
    if base == "node":
        if not inv:
            d = graph.pos.get(node)
            if not d:
                return ()
            if key is None:
                return d.keys()
            if key[0] == "const":
                return graph.spo.get(key[1], {}).get(node, ())
            return {o for o, subs in d.items() if subs & key[1]}
        d = graph.osp.get(node)
        if not d:
            return ()
        if key is None:
            return set().union(*d.values())
        if key[0] == "const":
            return d.get(key[1], ())
        hit = d.keys() & key[1]
        return set().union(*(d[s] for s in hit)) if hit else ()
    raise ValueError(f"axis {axis} cannot step")


def _neg_neighbors(
    graph: RdfGraph, node: str, fwd: frozenset | None, inv: frozenset | None
) -> set[str]:
    """Negated-property-set hop: a pair qualifies when some triple links it in
    the clause's direction and no excluded member links the same pair."""
    out: set[str] = set()
    if fwd is not None:
        preds_to: dict[str, set[str]] = {}
        for p, objs in graph.spo.get(node, {}).items():
            for b in objs:
                preds_to.setdefault(b, set()).add(p)
        out.update(b for b, ps in preds_to.items() if not ps & fwd)
    if inv is not None:
        for b, ps in graph.osp.get(node, {}).items():
            if not ps & inv:
                out.add(b)
    return out


def _expand(
    graph: RdfGraph,
    node: str,
    label: tuple,
    nest_lookup: NestLookup | None,
    reverse: bool = False,
) -> Iterable[str]:
    """Nodes reachable from `node` through one transition label."""
    kind = label[0]
    if kind == "eps":
        return (node,)
    if kind == "guard_const":
        return (node,) if node == label[1] else ()
    if kind == "guard_nest":
        return (node,) if node in nest_lookup(label[1]) else ()
    if kind == "step":
        axis, key = label[1], label[2]
        if key is not None and key[0] == "nest":
            key = ("nest", nest_lookup(key[1]))
        if reverse:
            axis = axis.inverse()
        return _axis_neighbors(graph, node, axis, key)
    if kind == "negstep":
        fwd, inv = label[1], label[2]
        if reverse:
            fwd, inv = inv, fwd
        return _neg_neighbors(graph, node, fwd, inv)
    raise ValueError(f"unknown transition label {label!r}")


def run_automaton(
    graph: RdfGraph,
    nfa: Nfa,
    seeds: Iterable[str],
    nest_lookup: NestLookup | None = None,
) -> set[tuple[str, str]]:
    """Per-seed product reachability; returns (seed, reached) pairs."""
    adom = graph.adom
    pairs: set[tuple[str, str]] = set()
    for seed in seeds:
        if seed not in adom:
            continue
        seen: set[tuple[str, int]] = {(seed, nfa.start)}
        queue = deque(seen)
        while queue:
            node, state = queue.popleft()
            if state == nfa.accept:
                pairs.add((seed, node))
            for label, dst in nfa.adj[state]:
                for succ in _expand(graph, node, label, nest_lookup):
                    item = (succ, dst)
                    if item not in seen:
                        seen.add(item)
                        queue.append(item)
    return pairs


class NreEvaluator:
    """Evaluates nre expressions over one immutable graph.

    Compiled automata and nest node-sets are cached by structural identity of
    the sub-expression.  Instances are cheap; callers typically create one per
    query evaluation.  Sharing across threads is safe since every cache entry
    is a pure function of the graph.
    """

    def __init__(self, graph: RdfGraph):
        self.graph = graph
        self._nfas: dict[Nre, Nfa] = {}
        self._sources: dict[Nre, frozenset[str]] = {}

    def _nfa(self, e: Nre) -> Nfa:
        nfa = self._nfas.get(e)
        if nfa is None:
            nfa = self._nfas[e] = _compile(e)
            self._materialize_nests(e)
        return nfa

    def _materialize_nests(self, e: Nre) -> None:
        match e:
            case AxisNest(_, inner):
                self.sources(inner)
            case Concat(left, right) | Alt(left, right):
                self._materialize_nests(left)
                self._materialize_nests(right)
            case Star(inner):
                self._materialize_nests(inner)

    def sources(self, e: Nre) -> frozenset[str]:
        """Constants with at least one successor under `e` (the nest test set).

        Computed by one multi-source reverse reachability pass over the
        product, so nests cost O(|G|·|e|) rather than a search per node.
        """
        cached = self._sources.get(e)
        if cached is not None:
            return cached
        nfa = self._nfa(e)
        graph = self.graph
        seen: set[tuple[str, int]] = {(c, nfa.accept) for c in graph.adom}
        queue = deque(seen)
        result: set[str] = set()
        while queue:
            node, state = queue.popleft()
            if state == nfa.start:
                result.add(node)
            for label, src in nfa.radj[state]:
                for prev in _expand(graph, node, label, self.sources, reverse=True):
                    item = (prev, src)
                    if item not in seen:
                        seen.add(item)
                        queue.append(item)
        out = frozenset(result)
        self._sources[e] = out
        return out

    def directed(
        self,
        e: Nre,
        seeds: Iterable[str],
        direction: Literal["forward", "backward"] = "forward",
    ) -> set[tuple[str, str]]:
        """Pairs of the evaluation whose source (forward) or target (backward)
        lies in `seeds`; seeds outside the active domain contribute nothing."""
        if direction == "backward":
            e = nre_converse(e)
            swapped = run_automaton(self.graph, self._nfa(e), seeds, self.sources)
            return {(a, b) for (b, a) in swapped}
        return run_automaton(self.graph, self._nfa(e), seeds, self.sources)

    def pairs(self, e: Nre) -> set[tuple[str, str]]:
        """The full evaluation of `e` on the graph."""
        return self.directed(e, self.graph.adom)


def eval_nre(graph: RdfGraph, e: Nre) -> set[tuple[str, str]]:
    return NreEvaluator(graph).pairs(e)


def eval_nre_directed(
    graph: RdfGraph,
    e: Nre,
    seeds: Iterable[str],
    direction: Literal["forward", "backward"] = "forward",
) -> set[tuple[str, str]]:
    return NreEvaluator(graph).directed(e, seeds, direction)


def eval_triple_pattern(
    graph: RdfGraph,
    pattern: TriplePattern,
    evaluator: NreEvaluator | None = None,
) -> set[Mapping]:
    """Mappings with domain {subject, object} ∩ V satisfying the pattern.

    Constant endpoints seed directed evaluation; a variable shared by both
    ends keeps only the diagonal.
    """
    ev = evaluator if evaluator is not None else NreEvaluator(graph)
    subj, obj = pattern.subject, pattern.object
    if isinstance(subj, Const):
        pairs = ev.directed(pattern.expr, {subj.value})
        if isinstance(obj, Const):
            hit = (subj.value, obj.value) in pairs
            return {EMPTY_MAPPING} if hit else set()
        return {Mapping({obj.name: b}) for (_, b) in pairs}
    if isinstance(obj, Const):
        pairs = ev.directed(pattern.expr, {obj.value}, "backward")
        return {Mapping({subj.name: a}) for (a, _) in pairs}
    pairs = ev.pairs(pattern.expr)
    if subj.name == obj.name:
        return {Mapping({subj.name: a}) for (a, b) in pairs if a == b}
    return {Mapping({subj.name: a, obj.name: b}) for (a, b) in pairs}
