"""Seeded random ground programs for property and acceptance tests."""
import random

from stablecount.program import Program, Rule


def random_program(seed, max_vars=10, max_rules=12, max_constraints=4, stratified=None,
                   weights=False):
    """Random program; ``stratified=True`` forces a level-respecting rule set,
    ``False``/``None`` draws bodies freely (often, not always, unstratified)."""
    rng = random.Random(seed)
    n = rng.randint(2, max_vars)
    nf = rng.randint(1, max(1, n - 1))
    founded = list(range(1, nf + 1))
    standard = list(range(nf + 1, n + 1))
    levels = {v: rng.randint(0, 2) for v in founded}
    rules = []
    for _ in range(rng.randint(0, max_rules)):
        head = rng.choice(founded)
        body = []
        for _ in range(rng.randint(0, 3)):
            v = rng.randint(1, n)
            neg = rng.random() < 0.35
            if stratified and v in founded:
                if neg and levels[v] >= levels[head]:
                    continue
                if not neg and levels[v] > levels[head]:
                    continue
            body.append(-v if neg else v)
        rules.append(Rule(head, tuple(body)))
    constraints = []
    for _ in range(rng.randint(0, max_constraints)):
        vs = rng.sample(range(1, n + 1), rng.randint(1, min(3, n)))
        constraints.append(tuple(v if rng.random() < 0.5 else -v for v in vs))
    w = {}
    if weights:
        for v in standard:
            w[v] = rng.choice(["0.1", "0.25", "0.5", "0.3", "0.75", "0.9"])
    names = tuple(f"f{v}" if v <= nf else f"s{v}" for v in range(1, n + 1))
    return Program(names=names, founded=frozenset(founded), standard=frozenset(standard),
                   rules=tuple(rules), constraints=tuple(constraints), weights=w)


def random_closed_assignment(q, rng, max_decisions=None):
    """Random decisions on original variables of the copy program ``q``,
    each followed by propagation; returns (decisions, closed assignment)
    or None when the decisions ran into a conflict."""
    from stablecount.transform import closure

    n = q.base.num_vars
    pi = closure(q, [])
    if pi is None:
        return None
    decisions = []
    steps = rng.randint(0, n if max_decisions is None else max_decisions)
    for _ in range(steps):
        free = [v for v in range(1, n + 1) if v not in pi and -v not in pi]
        if not free:
            break
        v = rng.choice(free)
        decisions.append(v if rng.random() < 0.5 else -v)
        pi = closure(q, decisions)
        if pi is None:
            return None
    return decisions, pi
