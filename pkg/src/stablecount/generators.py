"""Random benchmark instances: reachability in probabilistic graphs
(GraphRel) and the smokers-and-friends domain.

Both generators are pure functions of their :class:`GenSpec` and return
program text.  Edges are drawn per ordered pair ``(u, v)``, ``u != v``,
in lexicographic order from ``random.Random(seed)``.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .program import format_program, make_program


@dataclass(frozen=True)
class GenSpec:
    family: str = "graphrel"
    n: int = 4
    p: float = 0.5
    seed: int = 0
    node_prob: float = 0.5        # in(v) for graphrel, stress(x) for smokers
    edge_prob: float = 0.5        # influences(y_x), smokers only
    query: tuple[int, ...] = ()   # node numbers; default is the target / person 1
    evidence: tuple[int, ...] = ()  # signed node numbers, -v for a false atom
    edges: tuple[tuple[int, int], ...] | None = None  # overrides the random graph
    fix_random: int | None = None

    def __post_init__(self):
        if self.family not in ("graphrel", "smokers"):
            raise ValueError(f"unknown family {self.family!r}")
        if self.n < 1:
            raise ValueError("n must be at least 1")
        for name in ("p", "node_prob", "edge_prob"):
            if not 0 <= getattr(self, name) <= 1:
                raise ValueError(f"{name} must lie in [0, 1]")
        for v in self.query + tuple(abs(e) for e in self.evidence):
            if not 1 <= v <= self.n:
                raise ValueError(f"node {v} out of range 1..{self.n}")
        if self.fix_random is not None and self.fix_random < 0:
            raise ValueError("fix_random must be non-negative")


def _prob(x) -> Fraction:
    # go through str so 0.3 stays 3/10
    return Fraction(str(x))


def _edges(spec: GenSpec, rng: random.Random):
    if spec.edges is not None:
        return sorted(set(spec.edges))
    return [(u, v) for u in range(1, spec.n + 1) for v in range(1, spec.n + 1)
            if u != v and rng.random() < spec.p]


def _fix(rng, fix_random, standard, probs, rules):
    """Fix all but ``fix_random`` standard atoms (chosen and valued from
    ``rng``) and substitute them out of the rules."""
    if fix_random is None or fix_random >= len(standard):
        return standard, probs, rules
    fixed = rng.sample(standard, len(standard) - fix_random)
    value = {s: rng.random() < probs[s] for s in sorted(fixed, key=standard.index)}
    out = []
    for head, body in rules:
        if any(b in value and not value[b] for b in body):
            continue
        out.append((head, [b for b in body if b not in value]))
    keep = [s for s in standard if s not in value]
    return keep, {s: probs[s] for s in keep}, out


def _emit(founded, standard, probs, rules, queries, evidence) -> str:
    p = make_program(
        founded=founded, standard=standard, rules=rules, weights=probs,
        queries=queries, evidence=evidence)
    return format_program(p)


def _lit(atom, v):
    return f"{atom}({abs(v)})" if v > 0 else f"-{atom}({abs(v)})"


def gen_graphrel(spec: GenSpec) -> str:
    """Node 1 is the source, node ``n`` the target."""
    rng = random.Random(spec.seed)
    n = spec.n
    edges = _edges(spec, rng)
    standard = [f"in({v})" for v in range(1, n + 1)]
    probs = {s: _prob(spec.node_prob) for s in standard}
    rules = [("reach(1)", ["in(1)"])]
    rules += [(f"reach({y})", [f"in({y})", f"reach({x})"]) for x, y in edges]
    standard, probs, rules = _fix(rng, spec.fix_random, standard, probs, rules)
    founded = [f"reach({v})" for v in range(1, n + 1)]
    queries = [_lit("reach", q) for q in (spec.query or (n,))]
    evidence = [_lit("reach", e) for e in spec.evidence]
    return _emit(founded, standard, probs, rules, queries, evidence)


def gen_smokers(spec: GenSpec) -> str:
    """``influences(y_x)`` lets a smoking ``y`` make friend ``x`` smoke."""
    rng = random.Random(spec.seed)
    n = spec.n
    edges = _edges(spec, rng)
    standard = [f"stress({x})" for x in range(1, n + 1)]
    probs = {s: _prob(spec.node_prob) for s in standard}
    for y, x in edges:
        standard.append(f"influences({y}_{x})")
        probs[standard[-1]] = _prob(spec.edge_prob)
    rules = [(f"smokes({x})", [f"stress({x})"]) for x in range(1, n + 1)]
    rules += [(f"smokes({x})", [f"influences({y}_{x})", f"smokes({y})"]) for y, x in edges]
    standard, probs, rules = _fix(rng, spec.fix_random, standard, probs, rules)
    founded = [f"smokes({x})" for x in range(1, n + 1)]
    queries = [_lit("smokes", q) for q in (spec.query or (1,))]
    evidence = [_lit("smokes", e) for e in spec.evidence]
    return _emit(founded, standard, probs, rules, queries, evidence)


def generate(spec: GenSpec) -> str:
    return gen_graphrel(spec) if spec.family == "graphrel" else gen_smokers(spec)
