import random

import pytest

from fpq.errors import DomainBoundExceededError, FpqError
from fpq.federation import HeterogeneousDb, eval_query
from fpq.graph import RdfGraph, parse_graph
from fpq.model import Mapping, query_to_text
from fpq.oracle import (
    DEFAULT_PROFILE,
    SizeProfile,
    brute_eval_nre,
    brute_eval_query,
    classify_fragment,
    gen_random,
    gen_strongly_acyclic_prdf,
    induced_graph,
    is_strongly_acyclic,
    run_equivalence_check,
)
from fpq.parser import parse_nre, parse_query
from fpq.relations import EMPTY_DATABASE


def test_brute_matches_the_worked_example(example_g):
    assert brute_eval_nre(example_g, parse_nre("next::p/next::q")) == {("a", "c")}


def test_brute_self_on_the_empty_graph():
    assert brute_eval_nre(RdfGraph([]), parse_nre("self")) == set()


def test_brute_refuses_large_domains():
    g = RdfGraph([(f"s{i}", "p", f"o{i}") for i in range(60)])
    with pytest.raises(DomainBoundExceededError):
        brute_eval_nre(g, parse_nre("next"))


def test_brute_query_on_the_worked_example(example_g):
    d = HeterogeneousDb(example_g, EMPTY_DATABASE)
    q = parse_query("q(?x,?y) :- (?x, (next::p)/(next::q), ?y), (?x, next::r, ?y)")
    assert brute_eval_query(d, q) == {Mapping({"x": "a", "y": "c"})}


def test_brute_query_on_the_empty_database():
    d = HeterogeneousDb(RdfGraph([]), EMPTY_DATABASE)
    assert brute_eval_query(d, parse_query("q(?x,?y) :- (?x, next, ?y)")) == set()
    assert brute_eval_query(d, parse_query("q(a,b) :- (a, next, b)")) == set()


# --- induced graphs and strong acyclicity -----------------------------------

def test_single_triple_induces_a_three_node_path():
    ind = induced_graph(parse_graph("a p b ."))
    assert len(ind.labels) == 3
    assert len(ind.edges) == 2
    assert sorted(ind.labels.values()) == ["a", "b", "p"]


def test_chain_induces_a_tree():
    ind = induced_graph(parse_graph("a p b .\nb p c ."))
    assert len(ind.labels) == 5
    assert len(ind.edges) == 4
    assert is_strongly_acyclic(parse_graph("a p b .\nb p c ."))


def test_mismatched_predicate_is_an_error():
    with pytest.raises(FpqError, match="expected 'p'"):
        induced_graph(parse_graph("a q b ."), predicate="p")


def test_mixed_predicates_are_not_prdf():
    with pytest.raises(FpqError):
        induced_graph(parse_graph("a p b .\nb q c ."))


def test_predicate_in_node_position_is_not_prdf():
    with pytest.raises(FpqError):
        induced_graph(parse_graph("a p b .\np p c ."))


def test_single_triple_is_strongly_acyclic():
    assert is_strongly_acyclic(parse_graph("a p b ."))


def test_triangle_is_not_strongly_acyclic(triangle_prdf):
    assert not is_strongly_acyclic(triangle_prdf)


def test_self_loop_counts_as_a_cycle():
    assert not is_strongly_acyclic(parse_graph("a p a ."))


SEPARATION_QUERY = parse_query("q(?x,?y) :- (?x, next, ?y), (?x, next/next, ?y)")


def test_separation_witness_is_nonempty_on_the_triangle(triangle_prdf):
    d = HeterogeneousDb(triangle_prdf, EMPTY_DATABASE)
    assert eval_query(d, SEPARATION_QUERY) == {Mapping({"x": "a", "y": "c"})}


def test_separation_query_is_empty_on_strongly_acyclic_graphs():
    rng = random.Random(41)
    for _ in range(200):
        g = gen_strongly_acyclic_prdf(rng)
        assert is_strongly_acyclic(g, predicate="p")
        d = HeterogeneousDb(g, EMPTY_DATABASE)
        assert eval_query(d, SEPARATION_QUERY) == set()


# --- fragment classification --------------------------------------------------

def test_pure_sequence_is_plain_rpq():
    flags = classify_fragment(parse_query("q(?x,?y) :- (?x, next::p/next::q, ?y)"))
    assert flags.operators == frozenset()
    assert not flags.uses_star
    assert flags.describe() == "RPQ [star-free]"


def test_conjunction_flag(example_g):
    q = parse_query("q(?x,?y) :- (?x, (next::p)/(next::q), ?y), (?x, next::r, ?y)")
    assert classify_fragment(q).operators == frozenset({"∧"})


def test_federated_query_flags():
    q = parse_query(
        "q(?x,?y) :- (?x, next^-1::lon/next::lat, ?y), Orders(?d, ?x, ?y)"
    )
    assert classify_fragment(q).operators == frozenset({"∧", "R"})


def test_lone_relational_atom_is_r_only():
    q = parse_query("q(?x,?y) :- Orders(?d, ?x, ?y)")
    assert classify_fragment(q).operators == frozenset({"R"})


def test_all_flags_and_star():
    q = parse_query(
        "q(?x,?y) :- (?x, next|self::[edge], ?y), (?x, (next)*, ?y), R(?x, ?y) ; "
        "q(?x,?y) :- (?x, next, ?y)"
    )
    flags = classify_fragment(q)
    assert flags.operators == frozenset({"|", "N", "∧", "R", "∨"})
    assert flags.uses_star


def test_classification_survives_pretty_print():
    q = parse_query(
        "q(?x,?y) :- (?x, next|self::[edge], ?y), (?x, (next)*, ?y), R(?x, ?y)"
    )
    reparsed = parse_query(query_to_text(q))
    assert classify_fragment(reparsed) == classify_fragment(q)


# --- generators ----------------------------------------------------------------

def test_generation_is_deterministic():
    a = gen_random(123)
    b = gen_random(123)
    assert a[0].graph.triples == b[0].graph.triples
    assert a[1] == b[1]
    assert query_to_text(a[1]) == query_to_text(b[1])


def test_zero_triple_profile_gives_empty_graphs():
    profile = SizeProfile(max_triples=0)
    for seed in range(20):
        d, _ = gen_random(seed, profile)
        assert len(d.graph) == 0


def test_generated_queries_always_validate():
    for seed in range(1000):
        gen_random(seed)  # gen_random validates internally


def test_equivalence_harness_passes_a_quick_run():
    assert run_equivalence_check(50, 4242) == []


def test_uniqueness_bound_needs_the_restricted_fragment():
    # on a one-triple graph a single alternation already yields two mappings,
    # and bare self yields one per domain constant
    g = parse_graph("a p b .")
    d = HeterogeneousDb(g, EMPTY_DATABASE)
    alt = parse_query("q(?x,?y) :- (?x, next|next^-1, ?y)")
    assert len(eval_query(d, alt)) == 2
    diag = parse_query("q(?x,?y) :- (?x, self, ?y)")
    assert len(eval_query(d, diag)) == 3
