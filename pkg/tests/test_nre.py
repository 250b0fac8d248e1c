import random

from fpq.graph import parse_graph
from fpq.model import (
    Alt,
    Axis,
    AxisExpr,
    Const,
    EMPTY_MAPPING,
    Mapping,
    Star,
    TriplePattern,
    Var,
    nre_converse,
)
from fpq.nre import NreEvaluator, eval_nre, eval_nre_directed, eval_triple_pattern
from fpq.oracle import brute_eval_nre, gen_graph, gen_nre, DEFAULT_PROFILE
from fpq.parser import parse_nre

EXP1 = parse_nre("next::p/next::q")


def test_sequence_on_example_graph(example_g):
    assert eval_nre(example_g, EXP1) == {("a", "c")}


def test_self_is_the_identity_over_the_active_domain():
    g = parse_graph("a p b .")
    assert eval_nre(g, parse_nre("self")) == {("a", "a"), ("p", "p"), ("b", "b")}


def test_star_closure_by_hand():
    g = parse_graph("a p b .\nb q c .")
    diagonal = {(c, c) for c in g.adom}
    assert eval_nre(g, parse_nre("(next)*")) == diagonal | {
        ("a", "b"), ("b", "c"), ("a", "c")
    }


def test_edge_with_object_constant():
    g = parse_graph("a b c .")
    assert eval_nre(g, parse_nre("edge::c")) == {("a", "b")}


def test_nested_expression_filters_the_predicate():
    g = parse_graph("a p b .\np q v .")
    assert eval_nre(g, parse_nre("next::[edge::v]")) == {("a", "b")}


def test_self_nest_is_an_existential_test():
    # only p has an outgoing edge whose object is v
    g = parse_graph("a p b .\np q v .")
    assert eval_nre(g, parse_nre("self::[edge::v]")) == {("p", "p")}
    assert eval_nre(g, parse_nre("self::[next::v]")) == set()


def test_bare_edge_relates_subject_to_predicate():
    g = parse_graph("a p b .")
    assert eval_nre(g, parse_nre("edge")) == {("a", "p")}
    assert eval_nre(g, parse_nre("node")) == {("p", "b")}


def test_directed_from_constant_seed(example_g):
    assert eval_nre_directed(example_g, EXP1, {"a"}) == {("a", "c")}


def test_directed_with_no_seeds_is_empty(example_g):
    assert eval_nre_directed(example_g, EXP1, set()) == set()


def test_seed_outside_the_domain_contributes_nothing(example_g):
    assert eval_nre_directed(example_g, EXP1, {"zzz"}) == set()


def test_backward_direction_filters_targets(example_g):
    assert eval_nre_directed(example_g, EXP1, {"c"}, "backward") == {("a", "c")}
    assert eval_nre_directed(example_g, EXP1, {"b"}, "backward") == set()


def _random_cases(seed, n):
    rng = random.Random(seed)
    for _ in range(n):
        g = gen_graph(rng, DEFAULT_PROFILE)
        e = gen_nre(rng, rng.randint(0, 3), sorted(g.adom)[:4])
        yield rng, g, e


def test_engine_matches_brute_oracle():
    for _, g, e in _random_cases(11, 150):
        assert eval_nre(g, e) == brute_eval_nre(g, e)


def test_directed_equals_filtered_full_evaluation():
    for rng, g, e in _random_cases(12, 100):
        full = brute_eval_nre(g, e)
        consts = sorted(g.adom)
        seeds = set(rng.sample(consts, min(2, len(consts))))
        assert eval_nre_directed(g, e, seeds) == {
            (a, b) for a, b in full if a in seeds
        }
        assert eval_nre_directed(g, e, seeds, "backward") == {
            (a, b) for a, b in full if b in seeds
        }


def test_directed_with_all_seeds_equals_full_evaluation():
    for _, g, e in _random_cases(13, 60):
        assert eval_nre_directed(g, e, g.adom) == eval_nre(g, e)


def test_alternation_is_union():
    for _, g, e in _random_cases(14, 60):
        e2 = gen_nre(random.Random(id(e) % 100000), 2, sorted(g.adom)[:3])
        assert eval_nre(g, Alt(e, e2)) == eval_nre(g, e) | eval_nre(g, e2)


def test_star_is_the_least_fixpoint():
    for _, g, e in _random_cases(15, 40):
        step = brute_eval_nre(g, e)
        closure = {(c, c) for c in g.adom}
        while True:
            grown = closure | {
                (a, c) for a, b in closure for b2, c in step if b == b2
            }
            if grown == closure:
                break
            closure = grown
        assert eval_nre(g, Star(e)) == closure


def test_converse_law_for_all_step_axes():
    for _, g, _ in _random_cases(16, 40):
        for base in ("next", "edge", "node"):
            for inverted in (False, True):
                axis = Axis(base, inverted)
                fwd = eval_nre(g, AxisExpr(axis))
                rev = eval_nre(g, AxisExpr(axis.inverse()))
                assert rev == {(b, a) for a, b in fwd}


def test_converse_expression_swaps_pairs():
    for _, g, e in _random_cases(17, 60):
        assert eval_nre(g, nre_converse(e)) == {
            (b, a) for a, b in eval_nre(g, e)
        }


def test_monotone_in_the_graph():
    rng = random.Random(18)
    for _ in range(60):
        g = gen_graph(rng, DEFAULT_PROFILE)
        bigger = parse_graph(
            "\n".join(f"{s} {p} {o} ." for s, p, o in g.triples)
            + "\nextra1 extra2 extra3 ."
        )
        e = gen_nre(rng, rng.randint(0, 3), sorted(g.adom)[:3])
        assert eval_nre(g, e) <= eval_nre(bigger, e)


def test_self_inverse_is_self():
    g = parse_graph("a p b .")
    assert eval_nre(g, AxisExpr(Axis("self", inverted=True))) == eval_nre(
        g, AxisExpr(Axis("self"))
    )


# --- triple patterns ---------------------------------------------------------

def test_pattern_with_two_variables(example_g):
    got = eval_triple_pattern(example_g, TriplePattern(Var("x"), EXP1, Var("y")))
    assert got == {Mapping({"x": "a", "y": "c"})}


def test_boolean_pattern():
    g = parse_graph("a p b .")
    e = parse_nre("next::p")
    yes = eval_triple_pattern(g, TriplePattern(Const("a"), e, Const("b")))
    no = eval_triple_pattern(g, TriplePattern(Const("b"), e, Const("a")))
    assert yes == {EMPTY_MAPPING}
    assert no == set()


def test_shared_variable_keeps_the_diagonal():
    g = parse_graph("a p b .")
    got = eval_triple_pattern(
        g, TriplePattern(Var("x"), AxisExpr(Axis("self")), Var("x"))
    )
    assert got == {Mapping({"x": "a"}), Mapping({"x": "p"}), Mapping({"x": "b"})}


def test_constant_endpoint_seeds_evaluation(example_g):
    got = eval_triple_pattern(example_g, TriplePattern(Const("a"), EXP1, Var("y")))
    assert got == {Mapping({"y": "c"})}


def test_evaluator_reuse_shares_nest_sets(example_g):
    ev = NreEvaluator(example_g)
    e = parse_nre("next::[edge::b]|next::[edge::b]")
    first = ev.pairs(e)
    assert ev.pairs(e) == first
    assert len(ev._sources) >= 1
