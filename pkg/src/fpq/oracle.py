"""Brute-force reference semantics, instance generators, and checkers.

Everything here is deliberately naive and index-free: the brute evaluators
iterate raw triples and enumerate variable assignments, so they stay an
independent oracle for the indexed engine.  Instance generation is a pure
function of (seed, profile).
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

from .errors import DomainBoundExceededError, FpqError
from .federation import HeterogeneousDb, eval_query
from .graph import RdfGraph, Triple
from .model import (
    Alt,
    Axis,
    AxisConst,
    AxisExpr,
    AxisNest,
    Concat,
    Const,
    Mapping,
    Nre,
    Pp,
    PpAlt,
    PpInv,
    PpIri,
    PpOpt,
    PpPlus,
    PpSeq,
    PpStar,
    Query,
    RelAtom,
    Rule,
    Star,
    Term,
    TriplePattern,
    Var,
    validate,
)
from .nre import NreEvaluator
from .relations import RelDatabase, Relation

DEFAULT_ADOM_BOUND = 64


# --- brute-force nre semantics ------------------------------------------

def _axis_base_pairs(graph: RdfGraph, base: str) -> set[tuple[str, str]]:
    if base == "self":
        return {(c, c) for c in graph.adom}
    if base == "next":
        return {(s, o) for s, p, o in graph.triples}
    if base == "edge":
        return {(s, p) for s, p, o in graph.triples}
    if base == "node":
        return {(p, o) for s, p, o in graph.triples}
    raise ValueError(base)


def _axis_const_pairs(graph: RdfGraph, base: str, c: str) -> set[tuple[str, str]]:
    if base == "self":
        return {(c, c)} if c in graph.adom else set()
    if base == "next":
        return {(s, o) for s, p, o in graph.triples if p == c}
    if base == "edge":
        return {(s, p) for s, p, o in graph.triples if o == c}
    if base == "node":
        return {(p, o) for s, p, o in graph.triples if s == c}
    raise ValueError(base)


def _maybe_invert(pairs: set[tuple[str, str]], axis: Axis) -> set[tuple[str, str]]:
    if axis.inverted:
        return {(b, a) for a, b in pairs}
    return pairs


def _compose(r1: set[tuple[str, str]], r2: set[tuple[str, str]]) -> set[tuple[str, str]]:
    by_first: dict[str, list[str]] = {}
    for a, b in r2:
        by_first.setdefault(a, []).append(b)
    return {(a, c) for a, b in r1 for c in by_first.get(b, ())}


def brute_eval_nre(
    graph: RdfGraph, e: Nre, max_adom: int = DEFAULT_ADOM_BOUND
) -> set[tuple[str, str]]:
    """Direct transcription of the nre semantics; small graphs only."""
    if len(graph.adom) > max_adom:
        raise DomainBoundExceededError(
            f"brute evaluation refused: |adom| = {len(graph.adom)} > {max_adom}"
        )
    cache: dict[Nre, set[tuple[str, str]]] = {}

    def ev(expr: Nre) -> set[tuple[str, str]]:
        hit = cache.get(expr)
        if hit is not None:
            return hit
        match expr:
            case AxisExpr(axis):
                out = _maybe_invert(_axis_base_pairs(graph, axis.base), axis)
            case AxisConst(axis, c):
                out = _maybe_invert(_axis_const_pairs(graph, axis.base, c), axis)
            case AxisNest(axis, inner):
                srcs = {a for a, _ in ev(inner)}
                if axis.base == "self":
                    out = {(a, a) for a in srcs}
                else:
                    out = set()
                    for c in srcs:
                        out |= _maybe_invert(_axis_const_pairs(graph, axis.base, c), axis)
            case Alt(left, right):
                out = ev(left) | ev(right)
            case Concat(left, right):
                out = _compose(ev(left), ev(right))
            case Star(inner):
                step = ev(inner)
                out = {(c, c) for c in graph.adom} | set(step)
                while True:
                    new = _compose(out, step) - out
                    if not new:
                        break
                    out |= new
            case _:
                raise TypeError(f"not an nre node: {expr!r}")
        cache[expr] = out
        return out

    return ev(e)


def brute_eval_pp(
    graph: RdfGraph, path: Pp, max_adom: int = DEFAULT_ADOM_BOUND
) -> set[tuple[str, str]]:
    """Naive negation-free property-path evaluation (fixpoint for +/*)."""
    if len(graph.adom) > max_adom:
        raise DomainBoundExceededError(
            f"brute evaluation refused: |adom| = {len(graph.adom)} > {max_adom}"
        )

    def ev(p: Pp) -> set[tuple[str, str]]:
        match p:
            case PpIri(iri):
                return {(s, o) for s, pr, o in graph.triples if pr == iri}
            case PpInv(inner):
                return {(b, a) for a, b in ev(inner)}
            case PpSeq(left, right):
                return _compose(ev(left), ev(right))
            case PpAlt(left, right):
                return ev(left) | ev(right)
            case PpOpt(inner):
                return {(c, c) for c in graph.adom} | ev(inner)
            case PpPlus(inner):
                step = ev(inner)
                out = set(step)
                while True:
                    new = _compose(out, step) - out
                    if not new:
                        break
                    out |= new
                return out
            case PpStar(inner):
                return {(c, c) for c in graph.adom} | ev(PpPlus(inner))
        raise TypeError(f"unsupported property-path node: {p!r}")

    return ev(path)


def _term_value(term: Term, assignment: dict[str, str]) -> str:
    return assignment[term.name] if isinstance(term, Var) else term.value


def brute_eval_query(
    d: HeterogeneousDb, query: Query, max_domain: int = DEFAULT_ADOM_BOUND
) -> set[Mapping]:
    """Enumerate every assignment of the rule variables and keep the ones
    satisfying all atoms; restrict to the head.  Small instances only."""
    validate(query)
    domain = sorted(d.graph.adom | d.relations.constants())
    if len(domain) > max_domain:
        raise DomainBoundExceededError(
            f"brute evaluation refused: |domain| = {len(domain)} > {max_domain}"
        )
    nre_cache: dict[Nre, set[tuple[str, str]]] = {}
    result: set[Mapping] = set()
    for rule in query.rules:
        variables = sorted(rule.body_vars() | rule.head_vars())
        for atom in rule.triple_atoms:
            if atom.expr not in nre_cache:
                nre_cache[atom.expr] = brute_eval_nre(
                    d.graph, atom.expr, max_adom=max_domain
                )
        rel_data = [
            (atom, d.relations.get(atom.name).tuples) for atom in rule.rel_atoms
        ]
        head_vars = rule.head_vars()
        for values in itertools.product(domain, repeat=len(variables)):
            assignment = dict(zip(variables, values))
            ok = True
            for atom in rule.triple_atoms:
                pair = (
                    _term_value(atom.subject, assignment),
                    _term_value(atom.object, assignment),
                )
                if pair not in nre_cache[atom.expr]:
                    ok = False
                    break
            if ok:
                for atom, tuples in rel_data:
                    row = tuple(_term_value(t, assignment) for t in atom.args)
                    if row not in tuples:
                        ok = False
                        break
            if ok:
                result.add(Mapping({v: assignment[v] for v in head_vars}))
    return result


# --- p-RDF graphs, induced graphs, strong acyclicity ----------------------

@dataclass(frozen=True)
class InducedGraph:
    """Node-labeled undirected multigraph induced by a p-RDF graph."""

    labels: dict[str, str]
    edges: tuple[tuple[str, str], ...]


def _prdf_predicate(graph: RdfGraph, predicate: str | None) -> str | None:
    for t in sorted(graph.triples):
        if predicate is None:
            predicate = t.p
        if t.p != predicate:
            raise FpqError(
                f"not a p-RDF graph: triple {tuple(t)} uses predicate {t.p!r}, "
                f"expected {predicate!r}"
            )
        if t.s == predicate or t.o == predicate:
            raise FpqError(
                f"not a p-RDF graph: predicate {predicate!r} occurs as "
                f"subject or object in {tuple(t)}"
            )
    return predicate


def induced_graph(graph: RdfGraph, predicate: str | None = None) -> InducedGraph:
    """Merge subjects/objects by label, add one fresh p-node per triple, and
    connect each triple's endpoints through its p-node."""
    p = _prdf_predicate(graph, predicate)
    labels: dict[str, str] = {}
    edges: list[tuple[str, str]] = []
    for i, t in enumerate(sorted(graph.triples)):
        vs, vo, u = f"v:{t.s}", f"v:{t.o}", f"u:{i}"
        labels[vs] = t.s
        labels[vo] = t.o
        labels[u] = p if p is not None else t.p
        edges.append((vs, u))
        edges.append((u, vo))
    return InducedGraph(labels, tuple(edges))


def is_strongly_acyclic(graph: RdfGraph, predicate: str | None = None) -> bool:
    """True iff the induced multigraph is acyclic (parallel edges count)."""
    induced = induced_graph(graph, predicate)
    parent: dict[str, str] = {n: n for n in induced.labels}

    def find(x: str) -> str:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in induced.edges:
        ra, rb = find(a), find(b)
        if ra == rb:
            return False
        parent[ra] = rb
    return True


# --- fragment classification ----------------------------------------------

OPERATOR_ORDER = ("|", "N", "∧", "R", "∨")


@dataclass(frozen=True)
class FragmentFlags:
    operators: frozenset[str]
    uses_star: bool

    def describe(self) -> str:
        ops = ",".join(op for op in OPERATOR_ORDER if op in self.operators)
        name = f"RPQ({ops})" if ops else "RPQ"
        star = "uses *" if self.uses_star else "star-free"
        return f"{name} [{star}]"


def _scan_nre(e: Nre, found: set[str], star: list[bool]) -> None:
    match e:
        case AxisExpr() | AxisConst():
            return
        case AxisNest(_, inner):
            found.add("N")
            _scan_nre(inner, found, star)
        case Alt(left, right):
            found.add("|")
            _scan_nre(left, found, star)
            _scan_nre(right, found, star)
        case Concat(left, right):
            _scan_nre(left, found, star)
            _scan_nre(right, found, star)
        case Star(inner):
            star[0] = True
            _scan_nre(inner, found, star)


def classify_fragment(query: Query) -> FragmentFlags:
    """Operator flags syntactically present in a validated query."""
    validate(query)
    found: set[str] = set()
    star = [False]
    if len(query.rules) > 1:
        found.add("∨")
    for rule in query.rules:
        if len(rule.triple_atoms) + len(rule.rel_atoms) > 1:
            found.add("∧")
        if rule.rel_atoms:
            found.add("R")
        for atom in rule.triple_atoms:
            _scan_nre(atom.expr, found, star)
    return FragmentFlags(frozenset(found), star[0])


# --- random instance generation --------------------------------------------

@dataclass(frozen=True)
class SizeProfile:
    max_constants: int = 8
    max_triples: int = 20
    n_relations: int = 2
    max_arity: int = 3
    max_tuples: int = 10
    max_expr_depth: int = 3
    max_atoms: int = 3
    max_rules: int = 3
    allow_rel_atoms: bool = True
    boolean_head_rate: float = 0.1


DEFAULT_PROFILE = SizeProfile()

_VAR_POOL = ("x", "y", "z")
_AXES = tuple(
    Axis(base, inverted)
    for base in ("self", "next", "edge", "node")
    for inverted in (False, True)
    if not (base == "self" and inverted)
)
_STEP_AXES = tuple(a for a in _AXES if a.base != "self")


def gen_nre(
    rng: random.Random,
    depth: int,
    consts: list[str],
    constant_free: bool = False,
) -> Nre:
    def leaf() -> Nre:
        axis = rng.choice(_AXES)
        if not constant_free and consts and rng.random() < 0.5:
            return AxisConst(axis, rng.choice(consts))
        return AxisExpr(axis)

    if depth <= 0 or rng.random() < 0.3:
        return leaf()
    roll = rng.random()
    if roll < 0.35:
        return Concat(
            gen_nre(rng, depth - 1, consts, constant_free),
            gen_nre(rng, depth - 1, consts, constant_free),
        )
    if roll < 0.6:
        return Alt(
            gen_nre(rng, depth - 1, consts, constant_free),
            gen_nre(rng, depth - 1, consts, constant_free),
        )
    if roll < 0.75:
        return Star(gen_nre(rng, depth - 1, consts, constant_free))
    return AxisNest(
        rng.choice(_AXES), gen_nre(rng, depth - 1, consts, constant_free)
    )


def gen_pp(rng: random.Random, depth: int, iris: list[str]) -> Pp:
    if depth <= 0 or rng.random() < 0.35:
        return PpIri(rng.choice(iris))
    roll = rng.random()
    if roll < 0.25:
        return PpSeq(gen_pp(rng, depth - 1, iris), gen_pp(rng, depth - 1, iris))
    if roll < 0.5:
        return PpAlt(gen_pp(rng, depth - 1, iris), gen_pp(rng, depth - 1, iris))
    if roll < 0.65:
        return PpInv(gen_pp(rng, depth - 1, iris))
    if roll < 0.77:
        return PpOpt(gen_pp(rng, depth - 1, iris))
    if roll < 0.89:
        return PpPlus(gen_pp(rng, depth - 1, iris))
    return PpStar(gen_pp(rng, depth - 1, iris))


def gen_graph(rng: random.Random, profile: SizeProfile) -> RdfGraph:
    n_consts = rng.randint(1, max(1, profile.max_constants))
    pool = [f"c{i}" for i in range(n_consts)]
    n_triples = rng.randint(0, profile.max_triples)
    triples = [
        Triple(rng.choice(pool), rng.choice(pool), rng.choice(pool))
        for _ in range(n_triples)
    ]
    return RdfGraph(triples)


def gen_relations(
    rng: random.Random, profile: SizeProfile, graph_consts: list[str]
) -> RelDatabase:
    extra = [f"d{i}" for i in range(4)]
    relations = []
    for r in range(profile.n_relations):
        arity = rng.randint(1, profile.max_arity)
        n_tuples = rng.randint(0, profile.max_tuples)
        tuples = set()
        for _ in range(n_tuples):
            row = tuple(
                rng.choice(graph_consts)
                if graph_consts and rng.random() < 0.3
                else rng.choice(extra)
                for _ in range(arity)
            )
            tuples.add(row)
        relations.append(Relation(name=f"R{r}", arity=arity, tuples=tuples))
    return RelDatabase(relations)


def _gen_term(rng: random.Random, consts: list[str]) -> Term:
    if consts and rng.random() < 0.2:
        return Const(rng.choice(consts))
    return Var(rng.choice(_VAR_POOL))


def _gen_rule(
    rng: random.Random,
    profile: SizeProfile,
    head: tuple[Term, Term],
    consts: list[str],
    db: RelDatabase,
) -> Rule:
    triple_atoms: list[TriplePattern] = []
    rel_atoms: list[RelAtom] = []
    for _ in range(rng.randint(1, profile.max_atoms)):
        if profile.allow_rel_atoms and len(db) and rng.random() < 0.3:
            name = rng.choice(db.names())
            arity = db.get(name).arity
            rel_atoms.append(
                RelAtom(name, tuple(_gen_term(rng, consts) for _ in range(arity)))
            )
        else:
            triple_atoms.append(
                TriplePattern(
                    _gen_term(rng, consts),
                    gen_nre(rng, rng.randint(0, profile.max_expr_depth), consts),
                    _gen_term(rng, consts),
                )
            )
    rule = Rule(head, tuple(triple_atoms), tuple(rel_atoms))
    if rule.head_vars() - rule.body_vars():
        hv = sorted(rule.head_vars())
        anchor = TriplePattern(Var(hv[0]), gen_nre(rng, 1, consts), Var(hv[-1]))
        rule = Rule(head, tuple(triple_atoms) + (anchor,), tuple(rel_atoms))
    return rule


def gen_random(
    seed: int, profile: SizeProfile = DEFAULT_PROFILE
) -> tuple[HeterogeneousDb, Query]:
    """Deterministic random instance; every generated query validates."""
    rng = random.Random(seed)
    graph = gen_graph(rng, profile)
    graph_consts = sorted(graph.adom)
    db = (
        gen_relations(rng, profile, graph_consts)
        if profile.allow_rel_atoms
        else RelDatabase()
    )
    query_consts = [
        c for c in graph_consts if rng.random() < 0.3
    ] or graph_consts[:1] or ["c0"]
    if rng.random() < profile.boolean_head_rate:
        head: tuple[Term, Term] = (
            Const(rng.choice(query_consts)),
            Const(rng.choice(query_consts)),
        )
    else:
        head = (Var("x"), Var("y"))
    n_rules = rng.randint(1, profile.max_rules)
    rules = tuple(
        _gen_rule(rng, profile, head, query_consts, db) for _ in range(n_rules)
    )
    query = Query("q", rules)
    validate(query)
    return HeterogeneousDb(graph, db), query


def gen_constant_free_cnrpq(
    rng: random.Random, max_atoms: int = 3, max_depth: int = 3
) -> Query:
    """Conjunctive query with variable endpoints and constant-free nres.

    On any graph whose axis relations are all non-empty and share a single
    constant (the one-triple self-loop), every atom of such a query is
    satisfiable, so the whole conjunction is.
    """
    atoms = []
    for _ in range(rng.randint(1, max_atoms)):
        atoms.append(
            TriplePattern(
                Var(rng.choice(_VAR_POOL)),
                gen_nre(rng, rng.randint(0, max_depth), [], constant_free=True),
                Var(rng.choice(_VAR_POOL)),
            )
        )
    atoms[0] = TriplePattern(Var("x"), atoms[0].expr, atoms[0].object)
    atoms[-1] = TriplePattern(atoms[-1].subject, atoms[-1].expr, Var("y"))
    query = Query("q", (Rule((Var("x"), Var("y")), tuple(atoms)),))
    validate(query)
    return query


def gen_functional_nre(
    rng: random.Random, depth: int, consts: list[str]
) -> Nre:
    """Nre whose evaluation on a one-triple graph has at most one pair.

    Excludes self leaves, self-nests, alternation and star: bare `self`
    relates every domain constant to itself and `|`/`*` can union disjoint
    axis relations, so any of them breaks the at-most-one bound.  Nest inners
    are unrestricted (a non-self nest stays inside its bare axis relation).
    """
    if depth <= 0 or rng.random() < 0.4:
        axis = rng.choice(_STEP_AXES)
        if consts and rng.random() < 0.5:
            return AxisConst(axis, rng.choice(consts))
        return AxisExpr(axis)
    if rng.random() < 0.6:
        return Concat(
            gen_functional_nre(rng, depth - 1, consts),
            gen_functional_nre(rng, depth - 1, consts),
        )
    return AxisNest(rng.choice(_STEP_AXES), gen_nre(rng, depth - 1, consts))


def gen_functional_rule_query(
    rng: random.Random, consts: list[str], max_atoms: int = 3
) -> Query:
    """Single relational-atom-free rule built from functional nres."""
    atoms = []
    for _ in range(rng.randint(1, max_atoms)):
        atoms.append(
            TriplePattern(
                _gen_term(rng, consts),
                gen_functional_nre(rng, rng.randint(0, 3), consts),
                _gen_term(rng, consts),
            )
        )
    atoms[0] = TriplePattern(Var("x"), atoms[0].expr, atoms[0].object)
    atoms[-1] = TriplePattern(atoms[-1].subject, atoms[-1].expr, Var("y"))
    query = Query("q", (Rule((Var("x"), Var("y")), tuple(atoms)),))
    validate(query)
    return query


def gen_strongly_acyclic_prdf(
    rng: random.Random, max_nodes: int = 8, predicate: str = "p"
) -> RdfGraph:
    """Random forest-shaped p-RDF graph; strongly acyclic by construction."""
    n = rng.randint(1, max_nodes)
    labels = [f"n{i}" for i in range(n)]
    triples = []
    for i in range(1, n):
        if rng.random() < 0.2:
            continue  # start a new tree component
        parent = labels[rng.randrange(i)]
        child = labels[i]
        if rng.random() < 0.5:
            triples.append(Triple(parent, predicate, child))
        else:
            triples.append(Triple(child, predicate, parent))
    return RdfGraph(triples)


# --- equivalence harness -----------------------------------------------------

def run_equivalence_check(
    cases: int, seed: int, profile: SizeProfile = DEFAULT_PROFILE
) -> list[str]:
    """Cross-check the indexed engine against the brute oracle.

    Returns one description per failing case (empty list means all passed).
    """
    failures: list[str] = []
    for i in range(cases):
        case_seed = seed + i
        d, query = gen_random(case_seed, profile)
        rng = random.Random(case_seed ^ 0x5EED)
        expr = gen_nre(rng, rng.randint(0, profile.max_expr_depth),
                       sorted(d.graph.adom)[:4])
        ev = NreEvaluator(d.graph)
        fast_pairs = ev.pairs(expr)
        slow_pairs = brute_eval_nre(d.graph, expr)
        if fast_pairs != slow_pairs:
            failures.append(f"case {case_seed}: nre mismatch on {expr!r}")
            continue
        if d.graph.adom:
            k = rng.randint(0, min(3, len(d.graph.adom)))
            seeds = set(rng.sample(sorted(d.graph.adom), k))
            directed = ev.directed(expr, seeds)
            expected = {(a, b) for a, b in slow_pairs if a in seeds}
            if directed != expected:
                failures.append(f"case {case_seed}: directed mismatch on {expr!r}")
                continue
        fast = eval_query(d, query)
        slow = brute_eval_query(d, query)
        if fast != slow:
            failures.append(f"case {case_seed}: query mismatch on {query!r}")
    return failures
