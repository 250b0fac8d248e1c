"""Top-level query evaluation over a heterogeneous database (graph + relations).

Two evaluation modes produce identical results:

* the optimized mode orders atoms greedily and propagates constants and
  bound-variable seed sets into directed nre evaluation;
* the phased mode evaluates every graph atom and the relational conjunction
  independently, then joins, and attributes wall time to the phases
  RDF / Rel-DB / Joining / Total for reporting.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass
from typing import Iterable

from .errors import QueryValidationError
from .graph import RdfGraph
from .model import (
    Const,
    EMPTY_MAPPING,
    Mapping,
    Query,
    RelAtom,
    Rule,
    Term,
    TriplePattern,
    Var,
    join_mappings,
    nre_size,
    restrict_mappings,
    validate,
)
from .nre import NreEvaluator, eval_triple_pattern
from .relations import RelDatabase, eval_conjunction


@dataclass(frozen=True)
class HeterogeneousDb:
    """An RDF graph paired with a set of named relations."""

    graph: RdfGraph
    relations: RelDatabase


@dataclass(frozen=True)
class PhasePoint:
    time_ms: int
    solutions: int


@dataclass(frozen=True)
class PhaseReport:
    rdf: PhasePoint
    rel_db: PhasePoint
    joining: PhasePoint
    total: PhasePoint

    def rows(self) -> list[tuple[str, int, int]]:
        return [
            ("RDF", self.rdf.time_ms, self.rdf.solutions),
            ("Rel-DB", self.rel_db.time_ms, self.rel_db.solutions),
            ("Joining", self.joining.time_ms, self.joining.solutions),
            ("Total", self.total.time_ms, self.total.solutions),
        ]

    def to_tsv(self) -> str:
        lines = ["phase\ttime_ms\tsolutions"]
        lines += [f"{name}\t{ms}\t{sols}" for name, ms, sols in self.rows()]
        return "\n".join(lines)


def _pattern_mappings(
    pairs: Iterable[tuple[str, str]], subj: Term, obj: Term
) -> set[Mapping]:
    if isinstance(subj, Const):
        if isinstance(obj, Const):
            hit = any(a == subj.value and b == obj.value for a, b in pairs)
            return {EMPTY_MAPPING} if hit else set()
        return {Mapping({obj.name: b}) for a, b in pairs if a == subj.value}
    if isinstance(obj, Const):
        return {Mapping({subj.name: a}) for a, b in pairs if b == obj.value}
    if subj.name == obj.name:
        return {Mapping({subj.name: a}) for a, b in pairs if a == b}
    return {Mapping({subj.name: a, obj.name: b}) for a, b in pairs}


def _eval_atom_seeded(
    ev: NreEvaluator,
    atom: TriplePattern,
    bound: dict[str, set[str]],
    plan: list[str] | None,
) -> set[Mapping]:
    subj, obj = atom.subject, atom.object
    if isinstance(subj, Const):
        pairs, mode = ev.directed(atom.expr, {subj.value}), "forward from constant"
    elif subj.name in bound:
        seeds = bound[subj.name]
        pairs = ev.directed(atom.expr, seeds)
        mode = f"forward from {len(seeds)} seed(s)"
    elif isinstance(obj, Const):
        pairs = ev.directed(atom.expr, {obj.value}, "backward")
        mode = "backward from constant"
    elif obj.name in bound:
        seeds = bound[obj.name]
        pairs = ev.directed(atom.expr, seeds, "backward")
        mode = f"backward from {len(seeds)} seed(s)"
    else:
        pairs, mode = ev.pairs(atom.expr), "full evaluation"
    mappings = _pattern_mappings(pairs, subj, obj)
    if plan is not None:
        plan.append(f"  {atom} via {mode}: {len(mappings)} mapping(s)")
    return mappings


def _bound_score(atom: TriplePattern, bound: dict[str, set[str]]) -> tuple[int, int]:
    score = 0
    for t in (atom.subject, atom.object):
        if isinstance(t, Const) or (isinstance(t, Var) and t.name in bound):
            score += 1
    return (-score, nre_size(atom.expr))


def eval_rule(
    d: HeterogeneousDb,
    rule: Rule,
    evaluator: NreEvaluator | None = None,
    plan: list[str] | None = None,
) -> set[Mapping]:
    """Eq.-style rule semantics: join all atom mapping sets, restrict to head vars."""
    ev = evaluator if evaluator is not None else NreEvaluator(d.graph)
    omega = eval_conjunction(d.relations, rule.rel_atoms)
    if plan is not None and rule.rel_atoms:
        atoms = " ∧ ".join(str(a) for a in rule.rel_atoms)
        plan.append(f"  {atoms} via relational join: {len(omega)} mapping(s)")
    remaining = list(rule.triple_atoms)
    while remaining and omega:
        bound: dict[str, set[str]] = {}
        for var in (next(iter(omega)).domain if omega else ()):
            bound[var] = {m[var] for m in omega}
        remaining.sort(key=lambda a: _bound_score(a, bound))
        atom = remaining.pop(0)
        omega = join_mappings(omega, _eval_atom_seeded(ev, atom, bound, plan))
    return restrict_mappings(omega, rule.head_vars())


def _phased_rule(
    d: HeterogeneousDb, rule: Rule, ev: NreEvaluator
) -> tuple[set[Mapping], float, int, float, int, float]:
    t0 = time.perf_counter()
    rdf_omega: set[Mapping] = {EMPTY_MAPPING}
    for atom in rule.triple_atoms:
        rdf_omega = join_mappings(rdf_omega, eval_triple_pattern(d.graph, atom, ev))
    t_rdf = time.perf_counter() - t0
    rdf_solutions = len(rdf_omega) if rule.triple_atoms else 0

    t1 = time.perf_counter()
    rel_omega = eval_conjunction(d.relations, rule.rel_atoms)
    t_rel = time.perf_counter() - t1
    rel_solutions = len(rel_omega) if rule.rel_atoms else 0

    t2 = time.perf_counter()
    final = restrict_mappings(join_mappings(rdf_omega, rel_omega), rule.head_vars())
    t_join = time.perf_counter() - t2
    return final, t_rdf, rdf_solutions, t_rel, rel_solutions, t_join


def eval_query(d: HeterogeneousDb, query: Query) -> set[Mapping]:
    """Union of the rule results; duplicates merge under set semantics."""
    validate(query)
    ev = NreEvaluator(d.graph)
    result: set[Mapping] = set()
    for rule in query.rules:
        result |= eval_rule(d, rule, ev)
    return result


def eval_query_timed(d: HeterogeneousDb, query: Query) -> tuple[set[Mapping], PhaseReport]:
    """Phase-separated evaluation with wall times and solution counts.

    RDF and Rel-DB counts/times sum over rules; Joining and Total report the
    final result size.  Results are identical to eval_query.
    """
    validate(query)
    ev = NreEvaluator(d.graph)
    wall0 = time.perf_counter()
    result: set[Mapping] = set()
    rdf_s = rel_s = 0
    rdf_t = rel_t = join_t = 0.0
    for rule in query.rules:
        final, t_rdf, n_rdf, t_rel, n_rel, t_join = _phased_rule(d, rule, ev)
        result |= final
        rdf_t += t_rdf
        rel_t += t_rel
        join_t += t_join
        rdf_s += n_rdf
        rel_s += n_rel
    total_t = time.perf_counter() - wall0

    def ms(seconds: float) -> int:
        return int(round(seconds * 1000))

    report = PhaseReport(
        rdf=PhasePoint(ms(rdf_t), rdf_s),
        rel_db=PhasePoint(ms(rel_t), rel_s),
        joining=PhasePoint(ms(join_t), len(result)),
        total=PhasePoint(ms(total_t), len(result)),
    )
    return result, report


def explain_query(d: HeterogeneousDb, query: Query) -> tuple[set[Mapping], str]:
    """Run the optimized mode and describe the atom evaluation order."""
    validate(query)
    ev = NreEvaluator(d.graph)
    lines: list[str] = []
    result: set[Mapping] = set()
    for i, rule in enumerate(query.rules, start=1):
        lines.append(f"rule {i}:")
        result |= eval_rule(d, rule, ev, plan=lines)
    return result, "\n".join(lines)


def _substitute_term(term: Term, mapping: Mapping) -> Term:
    if isinstance(term, Var):
        value = mapping.get(term.name)
        if value is not None:
            return Const(value)
    return term


def substitute_query(query: Query, mapping: Mapping) -> Query:
    """Replace every occurrence of the mapping's variables with constants."""
    rules = []
    for rule in query.rules:
        head = (
            _substitute_term(rule.head[0], mapping),
            _substitute_term(rule.head[1], mapping),
        )
        triple_atoms = tuple(
            TriplePattern(
                _substitute_term(a.subject, mapping),
                a.expr,
                _substitute_term(a.object, mapping),
            )
            for a in rule.triple_atoms
        )
        rel_atoms = tuple(
            RelAtom(a.name, tuple(_substitute_term(t, mapping) for t in a.args))
            for a in rule.rel_atoms
        )
        rules.append(Rule(head, triple_atoms, rel_atoms))
    return Query(query.name, tuple(rules))


def decide_membership(d: HeterogeneousDb, query: Query, mapping: Mapping) -> bool:
    """True iff the mapping belongs to the query result.

    Decided by substituting the mapping into the query and checking the
    resulting boolean query, not by enumerating the full result.
    """
    validate(query)
    head_vars = frozenset(query.head_vars())
    if mapping.domain != head_vars:
        expected = ", ".join(f"?{v}" for v in sorted(head_vars)) or "(no variables)"
        raise QueryValidationError(
            f"membership mapping must bind exactly the head variables {expected}"
        )
    return bool(eval_query(d, substitute_query(query, mapping)))


# --- result serialization ------------------------------------------------

def result_rows(query: Query, result: set[Mapping]) -> tuple[list[str], list[tuple[str, ...]]]:
    variables = query.head_var_order()
    rows = sorted(tuple(m[v] for v in variables) for m in result)
    return variables, rows


def result_to_tsv(query: Query, result: set[Mapping]) -> str:
    """Header of variable names (without '?'), rows sorted lexicographically."""
    if query.is_boolean():
        return "true" if result else "false"
    variables, rows = result_rows(query, result)
    lines = ["\t".join(variables)]
    lines += ["\t".join(row) for row in rows]
    return "\n".join(lines)


def result_to_json(query: Query, result: set[Mapping]) -> str:
    if query.is_boolean():
        return json.dumps(bool(result))
    variables, rows = result_rows(query, result)
    payload = [dict(zip(variables, row)) for row in rows]
    return json.dumps(payload, indent=2)
