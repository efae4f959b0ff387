"""The copy transformation and residual-program projections.

``copy_transform`` adds, for every founded atom ``v``, a standard twin
``v'`` that can only become true once ``v`` is justified.  The remaining
functions rebuild justified residual programs explicitly; the counter never
calls them, they exist to check the copy encoding and for debugging.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping

from .program import Clause, FalsifiedClause, Program, Rule, residual_formula
from .propagation import PropagationState, justified_assignment


@dataclass(frozen=True)
class CopyProgram:
    """``base`` plus copy atoms numbered after all original variables."""

    base: Program
    copy_of: Mapping[int, int]
    copy_clauses: tuple[Clause, ...]
    origins: tuple[tuple[str, int], ...]  # ("link", v) or ("rule", rule index)

    @property
    def num_vars(self) -> int:
        return self.base.num_vars + len(self.copy_of)

    @cached_property
    def original_of(self) -> dict[int, int]:
        return {c: v for v, c in self.copy_of.items()}

    def is_copy(self, v: int) -> bool:
        return v > self.base.num_vars

    def name(self, v: int) -> str:
        if self.is_copy(v):
            return self.base.name(self.original_of[v]) + "'"
        return self.base.name(v)

    def lit_name(self, lit: int) -> str:
        return ("-" if lit < 0 else "") + self.name(abs(lit))

    def clauses(self) -> list[tuple[Clause, tuple[str, int]]]:
        """All clauses of the transformed program with their origin."""
        out = [(c, ("constraint", i)) for i, c in enumerate(self.base.constraints)]
        out += list(zip(self.copy_clauses, self.origins))
        return out


def copy_transform(p: Program) -> CopyProgram:
    copy_of = {v: p.num_vars + i for i, v in enumerate(sorted(p.founded), start=1)}
    clauses, origins = [], []
    for v in sorted(p.founded):
        clauses.append((-copy_of[v], v))
        origins.append(("link", v))
    for i, r in enumerate(p.rules):
        lits = [copy_of[r.head]]
        for l in r.body:
            if l > 0 and l in p.founded:
                lits.append(-copy_of[l])
            else:
                lits.append(-l)
        clauses.append(tuple(lits))
        origins.append(("rule", i))
    return CopyProgram(p, copy_of, tuple(clauses), tuple(origins))


def closure(q: CopyProgram, lits: Iterable[int]) -> set[int] | None:
    """Close ``lits`` under unit and unfounded propagation on ``q`` (rule
    clauses included); None on a conflict."""
    p = q.base
    clauses = [r.clause() for r in p.rules] + list(p.constraints) + list(q.copy_clauses)
    state = PropagationState(q.num_vars, clauses, p.rules, p.founded)
    for l in lits:
        if not state.assign(l, "assume"):
            return None
    if state.initial_units() or state.propagate():
        return None
    return state.assignment()


# ---------------------------------------------------------------------------
# explicit residual programs

def _subprogram(base: Program, rules: Iterable[tuple[int, tuple[int, ...]]],
                constraints: Iterable[tuple[int, ...]]) -> Program:
    """Program over the base variables mentioned by ``rules``/``constraints``,
    renumbered densely in base order."""
    rules = list(dict.fromkeys((h, tuple(sorted(set(b)))) for h, b in rules))
    constraints = list(dict.fromkeys(tuple(sorted(set(c))) for c in constraints))
    used = {h for h, _ in rules} | {abs(l) for _, b in rules for l in b} \
        | {abs(l) for c in constraints for l in c}
    order = sorted(used)
    new = {v: i for i, v in enumerate(order, start=1)}

    def m(l):
        return new[l] if l > 0 else -new[-l]

    return Program(
        names=tuple(base.name(v) for v in order),
        founded=frozenset(new[v] for v in order if v in base.founded),
        standard=frozenset(new[v] for v in order if v in base.standard),
        rules=tuple(Rule(new[h], tuple(m(l) for l in b)) for h, b in rules),
        constraints=tuple(tuple(m(l) for l in c) for c in constraints),
        weights={new[v]: w for v, w in base.weights.items() if v in new},
    )


def _residual_rule(head, body, head_atom, clause_atom, theta, rules, constraints):
    """Residual of one rule, given which assignment atoms stand for its head
    and body literals (``clause_atom[b]`` is the literal whose truth makes
    body literal ``b`` true).  A rule whose head became false turns into a
    constraint over its remaining body."""
    if head_atom in theta or any(-clause_atom[b] in theta for b in body):
        return
    rest = tuple(b for b in body if clause_atom[b] not in theta)
    if -head_atom in theta:
        if not rest:
            raise FalsifiedClause((head,) + tuple(-b for b in body))
        constraints.append(tuple(-b for b in rest))
    else:
        rules.append((head, rest))


def justified_residual(p: Program, theta: Iterable[int]) -> Program:
    """Rules simplified by the justified part of ``theta``, constraints by
    all of it, plus a unit constraint for each true but unjustified atom."""
    theta = set(theta)
    justified = justified_assignment(p, theta)
    unjustified = sorted(v for v in theta if v > 0 and v in p.founded and v not in justified)
    rules, constraints = [], []
    for r in p.rules:
        _residual_rule(r.head, r.body, r.head, dict(zip(r.body, r.body)), justified,
                       rules, constraints)
    constraints += residual_formula(p.constraints, theta)
    constraints += [(u,) for u in unjustified]
    return _subprogram(p, rules, constraints)


def residual_clauses(q: CopyProgram, pi: Iterable[int]):
    """Residual of every clause of ``q`` under ``pi`` as (literals, origin)."""
    pi = set(pi)
    out = []
    for c, origin in q.clauses():
        if any(l in pi for l in c):
            continue
        rest = [l for l in c if -l not in pi]
        if not rest:
            raise FalsifiedClause(c)
        out.append((rest, origin))
    return out


def prj(q: CopyProgram, pi: Iterable[int], within: set[int] | None = None) -> Program:
    """Project the residual of the copy program under ``pi`` back onto an
    ordinary program.

    ``pi`` must be closed under both propagators.  With ``within`` (a set of
    variables of ``q``) only residual clauses inside it are projected.
    """
    pi = set(pi)
    rules, constraints = [], []
    for rest, (kind, i) in residual_clauses(q, pi):
        if within is not None and not all(abs(l) in within for l in rest):
            continue
        if kind == "link":
            continue
        if kind == "constraint":
            constraints.append(tuple(rest))
            continue
        r = q.base.rules[i]
        atoms = {b: (q.copy_of[b] if b > 0 and b in q.base.founded else b) for b in r.body}
        _residual_rule(r.head, r.body, q.copy_of[r.head], atoms, pi, rules, constraints)
    for v, c in q.copy_of.items():
        if v in pi and c not in pi and -c not in pi:
            if within is None or c in within:
                constraints.append((v,))
    return _subprogram(q.base, rules, constraints)


# ---------------------------------------------------------------------------
# structural comparison

def canonical(p: Program):
    """Name-based form of a program, insensitive to ordering."""
    def lit(l):
        return p.lit_name(l)

    rules = frozenset((p.name(r.head), frozenset(lit(l) for l in r.body)) for r in p.rules)
    constraints = frozenset(frozenset(lit(l) for l in c) for c in p.constraints)
    return rules, constraints


def simplify_by_units(form):
    """Drop rules whose body a unit constraint falsifies and non-unit
    constraints a unit constraint satisfies.  Stable models are unchanged."""
    rules, constraints = form
    units = {next(iter(c)) for c in constraints if len(c) == 1}

    def neg(l):
        return l[1:] if l.startswith("-") else "-" + l

    rules = frozenset(r for r in rules if not any(neg(l) in units for l in r[1]))
    constraints = frozenset(c for c in constraints if len(c) == 1 or not (c & units))
    return rules, constraints


def form_components(form) -> set:
    """Split a canonical form into variable-disjoint canonical forms."""
    rules, constraints = form
    parent: dict[str, str] = {}

    def find(x):
        parent.setdefault(x, x)
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def atoms(item):
        return {l.lstrip("-") for l in item}

    items = [("r", r, {r[0]} | atoms(r[1])) for r in rules] + \
            [("c", c, atoms(c)) for c in constraints]
    for _, _, vs in items:
        vs = sorted(vs)
        for v in vs[1:]:
            parent[find(v)] = find(vs[0])
        find(vs[0])
    groups: dict[str, tuple[set, set]] = {}
    for kind, item, vs in items:
        g = groups.setdefault(find(next(iter(vs))), (set(), set()))
        g[0 if kind == "r" else 1].add(item)
    return {(frozenset(r), frozenset(c)) for r, c in groups.values()}
