import itertools
from fractions import Fraction

import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st

from conftest import lits
from randprog import random_program
from stablecount import count_stable, format_program, make_program, parse_program
from stablecount.errors import ParseError, ProgramError
from stablecount.program import (FalsifiedClause, check_stratified, dependency_graph,
                                 is_stratified, residual_formula)


def test_empty_program_has_one_stable_model():
    p = parse_program("")
    assert p.num_vars == 0 and not p.rules and not p.constraints
    assert count_stable(p).count == 1


def test_p1_parses(p1):
    assert len(p1.rules) == 3
    assert p1.constraints == ()
    assert {p1.name(v) for v in p1.founded} == {"a", "b"}
    assert {p1.name(v) for v in p1.standard} == {"s"}


def test_rule_with_standard_head_rejected():
    with pytest.raises(ParseError) as err:
        parse_program("#founded a.\n#standard s.\nrule s :- a.\n")
    assert err.value.line == 3


@pytest.mark.parametrize("text, where", [
    ("#founded a.\nrule a :- b.", (2, 11)),
    ("#founded a.\n#standard a.", (2, 11)),
    ("#founded a.\n#prob a 0.5.", (2, 7)),
    ("#standard s.\n#prob s 0.5.\n#prob s 0.2.", (3, 7)),
    ("#standard s.\nrule", (2, 1)),
])
def test_parse_errors_carry_position(text, where):
    with pytest.raises(ParseError) as err:
        parse_program(text)
    assert (err.value.line, err.value.column) == where


def test_parse_all_statement_kinds():
    p = parse_program("""
        % comment
        #standard s t.   #founded a.
        rule a :- s, not t.
        rule a.
        :- a, not s.
        #prob s 0.25.
        #query a.
        #evidence not t.
    """)
    a, s, t = p.lit("a"), p.lit("s"), p.lit("t")
    assert p.constraints == ((-a, s),)
    assert p.weights == {s: Fraction(1, 4)}
    assert p.queries == (a,) and p.evidence == (-t,)
    assert {r.body for r in p.rules} == {(s, -t), ()}


def test_tautology_rejected():
    with pytest.raises(ParseError):
        parse_program("#standard s.\n:- s, not s.")
    with pytest.raises(ProgramError):
        make_program(standard=["s"], constraints=[["s", "-s"]])


def test_duplicate_rules_merged():
    p = make_program(founded=["a"], standard=["s"], rules=[("a", ["s"]), ("a", ["s"])])
    assert len(p.rules) == 1


def test_dependency_graph_p1(p1):
    g = dependency_graph(p1)
    a, b = p1.lit("a"), p1.lit("b")
    assert set(g.edges) == {(a, b), (b, a)}
    assert all(d["positive"] and not d["negative"] for _, _, d in g.edges(data=True))


def test_dependency_graph_ex2(ex2):
    g = dependency_graph(ex2)
    e, f = ex2.lit("e"), ex2.lit("f")
    assert g.edges[f, e]["negative"] and g.edges[e, f]["negative"]


def test_dependency_graph_empty():
    assert dependency_graph(make_program(standard=["s"])).number_of_edges() == 0


def test_stratified_p1(p1):
    s = check_stratified(p1)
    assert s.stratified
    assert s.levels.level == {p1.lit("a"): 0, p1.lit("b"): 0}


def test_not_stratified_ex2(ex2):
    s = check_stratified(ex2)
    assert not s.stratified
    names = [ex2.name(v) for v in s.witness]
    assert names in (["e", "f", "e"], ["f", "e", "f"])


def test_self_negation_not_stratified():
    p = make_program(founded=["a"], rules=[("a", ["not a"])])
    assert not is_stratified(p)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**6))
def test_stratification_matches_cycle_enumeration(seed):
    p = random_program(seed, max_vars=12, max_rules=14)
    g = dependency_graph(p)
    negative_cycle = False
    for cycle in nx.simple_cycles(g):
        edges = zip(cycle, cycle[1:] + cycle[:1])
        if any(g.edges[u, v]["negative"] for u, v in edges):
            negative_cycle = True
            break
    s = check_stratified(p)
    assert s.stratified == (not negative_cycle)
    if s.stratified:
        lv = s.levels.level
        for r in p.rules:
            for l in r.body:
                if abs(l) in p.founded:
                    assert lv[r.head] > lv[abs(l)] if l < 0 else lv[r.head] >= lv[l]
    else:
        w = s.witness
        assert w[0] == w[-1]
        steps = list(zip(w, w[1:]))
        assert all(g.has_edge(u, v) for u, v in steps)
        assert g.edges[steps[0]]["negative"]


def _forms(clauses):
    return {frozenset(c) for c in clauses}


def test_residual_f1(f1):
    got = residual_formula(f1.constraints, lits(f1, "d,c"))
    assert _forms(got) == _forms([lits(f1, "-b,a"), lits(f1, "-a,b")])


def test_residual_f2(f2):
    got = residual_formula(f2.constraints, lits(f2, "-c"))
    assert _forms(got) == _forms([lits(f2, "a,-b"), lits(f2, "-d,e"), lits(f2, "e,f")])


def test_residual_empty_theta(f2):
    assert residual_formula(f2.constraints, []) == list(f2.constraints)


def test_residual_falsified():
    with pytest.raises(FalsifiedClause):
        residual_formula([(1, 2)], [-1, -2])


clause_sets = st.lists(
    st.lists(st.integers(1, 6).flatmap(lambda v: st.sampled_from([v, -v])), min_size=1, max_size=4)
    .map(lambda c: tuple(dict.fromkeys(c))).filter(lambda c: not any(-l in c for l in c)),
    max_size=6)
partial = st.dictionaries(st.integers(1, 6), st.booleans()).map(
    lambda d: [v if b else -v for v, b in d.items()])


@settings(max_examples=200, deadline=None)
@given(clause_sets, partial)
def test_residual_idempotent_and_sound(clauses, theta):
    try:
        once = residual_formula(clauses, theta)
    except FalsifiedClause:
        # some clause is false under theta, hence under every extension
        assert any(all(-l in theta for l in c) for c in clauses)
        return
    assert residual_formula(once, theta) == once
    fixed = {abs(l) for l in theta}
    free = sorted({abs(l) for c in clauses for l in c} - fixed)
    for bits in itertools.product([False, True], repeat=len(free)):
        world = set(theta) | {v if b else -v for v, b in zip(free, bits)}
        sat_f = all(any(l in world for l in c) for c in clauses)
        sat_r = all(any(l in world for l in c) for c in once)
        assert sat_f == sat_r


def _structure(p):
    return (p.names, p.founded, p.standard, frozenset(p.rules), frozenset(p.constraints),
            p.weights, p.queries, p.evidence)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**6))
def test_format_parse_round_trip(seed):
    p = random_program(seed, weights=True)
    q = parse_program(format_program(p))
    assert _structure(q) == _structure(p)


def test_round_trip_fixture_files(p1, ex2, f2):
    for p in (p1, ex2, f2):
        assert _structure(parse_program(format_program(p))) == _structure(p)
