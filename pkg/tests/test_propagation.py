import itertools
import random

from hypothesis import given, settings, strategies as st

from conftest import lits
from randprog import random_program
from stablecount import Rule, make_program
from stablecount.oracle import enumerate_stable
from stablecount.propagation import (PropagationState, is_stable, justified_assignment,
                                     least_model, reduct)
from stablecount.transform import closure, copy_transform


def _rules(p, *pairs):
    return {Rule(p.lit(h), tuple(p.lit(b) for b in body)) for h, body in pairs}


def test_unit_chain():
    s = PropagationState(2, [(1,), (-1, 2)], [], ())
    assert s.initial_units() is None and s.propagate() is None
    assert s.assignment() == {1, 2}


def test_unit_conflict():
    s = PropagationState(1, [(1,), (-1,)], [], ())
    conflict = s.initial_units() or s.propagate()
    assert conflict is not None and conflict.kind == "clause"


def test_copy_p1_decision_s(p1):
    q = copy_transform(p1)
    a, b, s = p1.lit("a"), p1.lit("b"), p1.lit("s")
    clauses = [r.clause() for r in p1.rules] + list(q.copy_clauses)
    state = PropagationState(q.num_vars, clauses, p1.rules, p1.founded)
    state.decide(s)
    assert state.propagate() is None
    expect = {s, a, b, q.copy_of[a], q.copy_of[b]}
    assert state.assignment() == expect


def test_reduct_p1(p1):
    s = p1.lit("s")
    assert set(reduct(p1.rules, [-s], p1.founded)) == _rules(p1, ("a", ["b"]), ("b", ["a"]))
    assert set(reduct(p1.rules, [s], p1.founded)) == \
        _rules(p1, ("a", ["b"]), ("b", ["a"]), ("a", []))


def test_least_model_examples():
    assert least_model([Rule(1, (2,)), Rule(2, (1,))], founded={1, 2}) == {-1, -2}
    assert least_model([Rule(1, ()), Rule(2, (1,))], founded={1, 2}) == {1, 2}


def test_reduct_ex2(ex2):
    theta = lits(ex2, "u,-e")
    derived = least_model(reduct(ex2.rules, theta, ex2.founded))
    assert set(lits(ex2, "d,f,c")) <= derived


def test_justified_ex2(ex2):
    got = justified_assignment(ex2, lits(ex2, "a,b,d,u,-e,c,f"))
    assert got == set(lits(ex2, "u,-e,d,f,c"))


def test_justified_trivial(p1):
    assert justified_assignment(p1, []) == set()
    assert justified_assignment(p1, lits(p1, "s,a,b")) == set(lits(p1, "s,a,b"))


def _state(p):
    clauses = [r.clause() for r in p.rules] + list(p.constraints)
    return PropagationState(p.num_vars, clauses, p.rules, p.founded)


def test_unfounded_loop():
    p = make_program(founded=["a", "b"], rules=[("a", ["b"]), ("b", ["a"])])
    s = _state(p)
    assert s.propagate() is None
    assert s.assignment() == {-1, -2}
    assert s.unfounded_events == 1


def test_unfounded_p1_not_s(p1):
    s = _state(p1)
    s.decide(-p1.lit("s"))
    assert s.propagate() is None
    assert s.assignment() == set(lits(p1, "-s,-a,-b"))


def test_unfounded_conflict_p1(p1):
    s = _state(p1)
    for l in lits(p1, "a,-s"):
        s.assign(l)
    conflict = s.unit_propagate() or s.unfounded_propagate()
    assert conflict is not None and conflict.kind == "unfounded"


def _copy_state(p, rng=None):
    q = copy_transform(p)
    clauses = [r.clause() for r in p.rules] + list(p.constraints) + list(q.copy_clauses)
    return q, PropagationState(q.num_vars, clauses, p.rules, p.founded, rng=rng)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**6))
def test_justified_tracks_ja_and_is_monotone(seed):
    p = random_program(seed)
    q, state = _copy_state(p)
    rng = random.Random(seed)
    if state.initial_units() or state.propagate():
        return
    previous = set()
    for _ in range(p.num_vars):
        theta = {l for l in state.trail if abs(l) <= p.num_vars}
        ja = {l for l in justified_assignment(p, theta) if l > 0 and l in p.founded}
        assert state.justified == ja
        # copy atoms mark exactly the justified founded atoms
        assert {v for v, c in q.copy_of.items() if state.value[c] > 0} == ja
        assert previous <= ja
        previous = ja
        free = [v for v in range(1, p.num_vars + 1) if state.value[v] == 0]
        if not free:
            break
        v = rng.choice(free)
        state.decide(v if rng.random() < 0.5 else -v)
        if state.propagate():
            break


@settings(max_examples=120, deadline=None)
@given(st.integers(0, 10**6))
def test_complete_assignments_conflict_iff_unstable(seed):
    p = random_program(seed, max_vars=7, max_rules=8)
    stable = set(enumerate_stable(p).models)
    for bits in itertools.product([1, -1], repeat=p.num_vars):
        theta = tuple(b * v for v, b in zip(range(1, p.num_vars + 1), bits))
        state = _state(p)
        for l in theta:
            state.assign(l)
        ok = (state.initial_units() or state.propagate()) is None
        assert ok == (theta in stable) == is_stable(p, theta)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**6))
def test_least_model_is_minimal(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 6)
    rules = [Rule(rng.randint(1, n), tuple(rng.sample(range(1, n + 1), rng.randint(0, min(2, n)))))
             for _ in range(rng.randint(0, 8))]
    least = least_model(rules)
    for r in rules:
        if all(b in least for b in r.body):
            assert r.head in least
    for bits in itertools.product([False, True], repeat=n):
        model = {v for v, b in zip(range(1, n + 1), bits) if b}
        if all(r.head in model or not all(b in model for b in r.body) for r in rules):
            assert least <= model


@settings(max_examples=120, deadline=None)
@given(st.integers(0, 10**6))
def test_propagation_confluent(seed):
    p = random_program(seed)
    q = copy_transform(p)
    rng = random.Random(seed)
    decisions = [v if rng.random() < 0.5 else -v
                 for v in rng.sample(range(1, p.num_vars + 1), rng.randint(0, p.num_vars))]
    reference = closure(q, decisions)
    for k in range(5):
        _, state = _copy_state(p, rng=random.Random(seed * 10 + k))
        ok = all(state.assign(l) for l in decisions)
        ok = ok and (state.initial_units() or state.propagate()) is None
        assert (state.assignment() if ok else None) == reference
