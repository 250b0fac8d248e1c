"""SPARQL 1.1-style property-path evaluation and the negation-free translator.

Paths compile onto the same product-automaton runner as nre expressions.
Negated property sets use pair exclusion: a pair is dropped when any excluded
member links that pair in the clause's direction (see README; this differs
from the W3C per-triple rule and makes `!p` non-monotone).
"""

from __future__ import annotations

from .errors import UnsupportedConstructError
from .graph import RdfGraph
from .model import (
    Alt,
    AxisConst,
    AxisExpr,
    Concat,
    NEXT,
    Nre,
    Pp,
    PpAlt,
    PpInv,
    PpIri,
    PpNegSet,
    PpOpt,
    PpPlus,
    PpSeq,
    PpStar,
    SELF,
    Star,
    pp_to_text,
)
from .nre import EPS, Nfa, run_automaton


def pp_converse(p: Pp) -> Pp:
    """Path denoting the converse relation, with inversion pushed inward."""
    match p:
        case PpIri():
            return PpInv(p)
        case PpInv(inner):
            return inner
        case PpSeq(left, right):
            return PpSeq(pp_converse(right), pp_converse(left))
        case PpAlt(left, right):
            return PpAlt(pp_converse(left), pp_converse(right))
        case PpOpt(inner):
            return PpOpt(pp_converse(inner))
        case PpPlus(inner):
            return PpPlus(pp_converse(inner))
        case PpStar(inner):
            return PpStar(pp_converse(inner))
        case PpNegSet(forward, inverse):
            return PpNegSet(inverse, forward)
    raise TypeError(f"not a property-path node: {p!r}")


def _compile_pp(path: Pp) -> Nfa:
    transitions: list[tuple[int, tuple, int]] = []
    counter = [0]

    def fresh() -> int:
        counter[0] += 1
        return counter[0] - 1

    def build(p: Pp, inverted: bool) -> tuple[int, int]:
        match p:
            case PpIri(iri):
                s, t = fresh(), fresh()
                axis = NEXT.inverse() if inverted else NEXT
                transitions.append((s, ("step", axis, ("const", iri)), t))
                return s, t
            case PpInv(inner):
                return build(inner, not inverted)
            case PpSeq(left, right):
                if inverted:
                    left, right = right, left
                ls, lt = build(left, inverted)
                rs, rt = build(right, inverted)
                transitions.append((lt, EPS, rs))
                return ls, rt
            case PpAlt(left, right):
                s, t = fresh(), fresh()
                ls, lt = build(left, inverted)
                rs, rt = build(right, inverted)
                transitions.extend(
                    [(s, EPS, ls), (s, EPS, rs), (lt, EPS, t), (rt, EPS, t)]
                )
                return s, t
            case PpOpt(inner):
                s, t = fresh(), fresh()
                is_, it = build(inner, inverted)
                transitions.extend([(s, EPS, t), (s, EPS, is_), (it, EPS, t)])
                return s, t
            case PpPlus(inner):
                s, t = fresh(), fresh()
                is_, it = build(inner, inverted)
                transitions.extend([(s, EPS, is_), (it, EPS, is_), (it, EPS, t)])
                return s, t
            case PpStar(inner):
                s, t = fresh(), fresh()
                is_, it = build(inner, inverted)
                transitions.extend(
                    [(s, EPS, t), (s, EPS, is_), (it, EPS, is_), (it, EPS, t)]
                )
                return s, t
            case PpNegSet(forward, inverse):
                s, t = fresh(), fresh()
                fwd = forward or None
                inv = inverse or None
                if inverted:
                    fwd, inv = inv, fwd
                transitions.append((s, ("negstep", fwd, inv), t))
                return s, t
        raise TypeError(f"not a property-path node: {p!r}")

    start, accept = build(path, False)
    nfa = Nfa(start, accept, counter[0])
    for src, label, dst in transitions:
        nfa.add(src, label, dst)
    return nfa


def eval_pp(graph: RdfGraph, path: Pp) -> set[tuple[str, str]]:
    """The full evaluation of the property path on the graph."""
    return run_automaton(graph, _compile_pp(path), graph.adom)


def pp_to_nre(path: Pp) -> Nre:
    """Translate a negation-free property path into an equivalent nre.

    Raises UnsupportedConstructError naming the subterm when a negated
    property set occurs anywhere in the path.
    """

    def walk(p: Pp) -> Nre:
        match p:
            case PpIri(iri):
                return AxisConst(NEXT, iri)
            case PpInv(inner):
                return walk_converse(inner)
            case PpSeq(left, right):
                return Concat(walk(left), walk(right))
            case PpAlt(left, right):
                return Alt(walk(left), walk(right))
            case PpOpt(inner):
                return Alt(AxisExpr(SELF), walk(inner))
            case PpPlus(inner):
                e = walk(inner)
                return Concat(e, Star(e))
            case PpStar(inner):
                return Star(walk(inner))
            case PpNegSet():
                raise UnsupportedConstructError(
                    f"negated property set {pp_to_text(p)} has no nre equivalent"
                )
        raise TypeError(f"not a property-path node: {p!r}")

    def walk_converse(p: Pp) -> Nre:
        match p:
            case PpIri(iri):
                return AxisConst(NEXT.inverse(), iri)
            case PpInv(inner):
                return walk(inner)
            case PpSeq(left, right):
                return Concat(walk_converse(right), walk_converse(left))
            case PpAlt(left, right):
                return Alt(walk_converse(left), walk_converse(right))
            case PpOpt(inner):
                return Alt(AxisExpr(SELF), walk_converse(inner))
            case PpPlus(inner):
                e = walk_converse(inner)
                return Concat(e, Star(e))
            case PpStar(inner):
                return Star(walk_converse(inner))
            case PpNegSet():
                raise UnsupportedConstructError(
                    f"negated property set {pp_to_text(p)} has no nre equivalent"
                )
        raise TypeError(f"not a property-path node: {p!r}")

    return walk(path)
