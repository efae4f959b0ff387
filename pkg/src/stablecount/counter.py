"""DPLL-style stable-model counting with cubes, caching and decomposition.

Two search modes are supported:

``Mode.STANDARD``
    Decisions only on standard atoms.  Requires a stratified program; the
    founded atoms are then fixed by propagation once the standard atoms in
    their component are.  Constraints that mention founded atoms are only
    checked, never used to propagate.

``Mode.COPY``
    The program is run through :func:`~stablecount.transform.copy_transform`
    and decisions may be taken on any original atom, never on copy atoms.
    The residual of the transformed clause set then stands in for the
    justified residual program, so it is a sound cache key and splits into
    independently countable components.
"""
from __future__ import annotations

import enum
import logging
import sys
import time
from collections import OrderedDict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import InconsistentAssumptionsError, UnsupportedModeError
from .program import Program, check_stratified
from .propagation import PropagationState
from .transform import CopyProgram, copy_transform

log = logging.getLogger(__name__)

ONE = Fraction(1)
HALF = Fraction(1, 2)

# tags for residual items in component keys
_CONSTRAINT, _CHECK, _RULE = 0, 1, 2


class Mode(enum.Enum):
    STANDARD = "standard"
    COPY = "copy"


@dataclass
class SearchStats:
    decisions: int = 0
    backtracks: int = 0
    backtrack_level_sum: int = 0
    unfounded_events: int = 0
    cache_hits: int = 0
    components: int = 0
    seconds: float = 0.0

    @property
    def avg_backtrack_level(self) -> float | None:
        if not self.backtracks:
            return None
        return self.backtrack_level_sum / self.backtracks


@dataclass
class CountResult:
    count: int
    weight: Fraction | None = None
    stats: SearchStats = field(default_factory=SearchStats)


@dataclass(frozen=True)
class Component:
    """Canonical residual of one variable-disjoint part of the problem.

    ``key`` lists the residual clauses (tagged by kind, rules with their
    head) in sorted order; ``clauses`` and ``variables`` are the clause
    indices and unassigned variables it covers.
    """

    key: tuple
    clauses: tuple[int, ...]
    variables: frozenset[int]

    def serialize(self) -> bytes:
        return repr(self.key).encode()


class Cache:
    """Exact counts per component key, optionally bounded (LRU by bytes)."""

    def __init__(self, max_bytes: int | None = None):
        self.max_bytes = max_bytes
        self._entries: OrderedDict = OrderedDict()
        self._bytes = 0

    def __len__(self):
        return len(self._entries)

    @staticmethod
    def _size(key) -> int:
        return 64 + 8 * sum(len(item[-1]) + 2 for item in key)

    def lookup(self, key):
        entry = self._entries.get(key)
        if entry is not None and self.max_bytes is not None:
            self._entries.move_to_end(key)
        return entry

    def store(self, key, count: int, weight: Fraction | None) -> None:
        if key in self._entries:
            return
        self._entries[key] = (count, weight)
        if self.max_bytes is None:
            return
        self._bytes += self._size(key)
        while self._bytes > self.max_bytes and self._entries:
            old, _ = self._entries.popitem(last=False)
            self._bytes -= self._size(old)


class _Problem:
    """Clause/rule view of a program prepared for one mode."""

    def __init__(self, program, mode: Mode, evidence: Sequence[int]):
        if isinstance(program, CopyProgram):
            if mode is not Mode.COPY:
                raise UnsupportedModeError("a copy-transformed program needs COPY mode")
            copy = program
            program = program.base
        elif mode is Mode.COPY:
            copy = copy_transform(program)
        else:
            copy = None
            strat = check_stratified(program)
            if not strat.stratified:
                cycle = " -> ".join(program.name(v) for v in strat.witness)
                raise UnsupportedModeError(
                    f"standard-variable search needs a stratified program (cycle {cycle})")
        self.program = program
        self.mode = mode
        self.num_vars = copy.num_vars if copy else program.num_vars
        founded = program.founded

        clauses, kinds, heads = [], [], []
        for r in program.rules:
            clauses.append(r.clause())
            kinds.append(_RULE)
            heads.append(r.head)
        for c in list(program.constraints) + [(e,) for e in evidence]:
            clauses.append(tuple(c))
            if mode is Mode.STANDARD and any(abs(l) in founded for l in c):
                kinds.append(_CHECK)
            else:
                kinds.append(_CONSTRAINT)
            heads.append(0)
        if copy:
            for c in copy.copy_clauses:
                clauses.append(c)
                kinds.append(_CONSTRAINT)
                heads.append(0)
        self.clauses = clauses
        self.kinds = kinds
        self.heads = heads
        self.copy = copy
        if mode is Mode.STANDARD:
            self.decidable = frozenset(program.standard)
        else:
            self.decidable = frozenset(range(1, program.num_vars + 1))
        # atoms that multiply the count when left free
        self.countable = frozenset(program.standard)

    def state(self, trace=None, rng=None) -> PropagationState:
        return PropagationState(self.num_vars, self.clauses, self.program.rules,
                                self.program.founded,
                                propagating=[k != _CHECK for k in self.kinds],
                                trace=trace, rng=rng)


class _Search:
    def __init__(self, problem: _Problem, weights, cache: Cache | None, decompose: bool,
                 rng, trace, debug: bool):
        self.problem = problem
        self.weights = weights  # var -> Fraction, or None for plain counting
        self.cache = cache
        self.decompose = decompose
        self.rng = rng
        self.debug = debug
        self.state = problem.state(trace=trace)
        self.stats = SearchStats()
        self.fused = {}
        if problem.copy:
            for v, c in problem.copy.copy_of.items():
                self.fused[c] = v

    # -- residual bookkeeping -------------------------------------------------

    def _components(self, clause_ids: Iterable[int]) -> list[Component] | None:
        """Residual clauses split into components; None on a falsified clause."""
        state = self.state
        value = state.value
        clauses = self.problem.clauses
        items = []
        for i in clause_ids:
            rest = []
            sat = False
            for l in clauses[i]:
                val = value[l] if l > 0 else -value[-l]
                if val > 0:
                    sat = True
                    break
                if val == 0:
                    rest.append(l)
            if sat:
                continue
            if not rest:
                return None
            items.append((i, rest))
        if not items:
            return []
        if not self.decompose:
            return [self._component(items)]

        parent = {}

        def find(x):
            x = self.fused.get(x, x)
            root = x
            while parent.setdefault(root, root) != root:
                root = parent[root]
            while parent[x] != root:
                parent[x], x = root, parent[x]
            return root

        for _, rest in items:
            a = find(abs(rest[0]))
            for l in rest[1:]:
                b = find(abs(l))
                if a != b:
                    parent[b] = a
        groups: dict[int, list] = {}
        for item in items:
            groups.setdefault(find(abs(item[1][0])), []).append(item)
        return [self._component(g) for g in groups.values()]

    def _component(self, items) -> Component:
        kinds, heads = self.problem.kinds, self.problem.heads
        key = []
        variables = set()
        for i, rest in items:
            kind = kinds[i]
            lits = tuple(sorted(rest))
            if kind == _RULE:
                h = heads[i]
                key.append((kind, h if h in rest else 0, lits))
            else:
                key.append((kind, 0, lits))
            variables.update(abs(l) for l in rest)
        key.sort()
        return Component(tuple(key), tuple(i for i, _ in items), frozenset(variables))

    def _lit_weight(self, lit: int) -> Fraction:
        w = self.weights.get(abs(lit), HALF)
        return w if lit > 0 else 1 - w

    # -- search ---------------------------------------------------------------

    def _expand(self, variables: frozenset[int], clause_ids, mark: int):
        """Count the subtree below the current assignment, restricted to
        ``variables``; literals from ``trail[mark:]`` are fresh here."""
        state = self.state
        countable = self.problem.countable
        weight = ONE if self.weights is not None else None
        for lit in state.trail[mark:]:
            v = abs(lit)
            if v not in variables:
                raise RuntimeError(f"propagation left its component (variable {v})")
            if weight is not None and v in countable:
                weight *= self._lit_weight(lit)
        comps = self._components(clause_ids)
        if comps is None:
            raise RuntimeError("falsified clause survived propagation")
        self.stats.components += len(comps)
        covered = set()
        for comp in comps:
            covered |= comp.variables
        count = 1
        value = state.value
        for v in variables:
            if value[v] == 0 and v not in covered:
                if v not in countable:
                    raise RuntimeError(f"unassigned non-standard variable {v} outside the residual")
                count *= 2
        for comp in comps:
            c, w = self._solve(comp)
            if c == 0:
                return 0, (Fraction(0) if weight is not None else None)
            count *= c
            if weight is not None:
                weight *= w
        return count, weight

    def _choose(self, comp: Component) -> int:
        decidable = self.problem.decidable
        value = self.state.value
        candidates = [v for v in comp.variables if v in decidable and value[v] == 0]
        if not candidates:
            raise RuntimeError("residual component without decidable variables")
        if self.rng is not None:
            return self.rng.choice(sorted(candidates))
        occurrences = dict.fromkeys(candidates, 0)
        for item in comp.key:
            for l in item[2]:
                if abs(l) in occurrences:
                    occurrences[abs(l)] += 1
        return min(candidates, key=lambda v: (-occurrences[v], v))

    def _solve(self, comp: Component):
        if self.cache is not None:
            hit = self.cache.lookup(comp.key)
            if hit is not None:
                self.stats.cache_hits += 1
                return hit
        state = self.state
        v = self._choose(comp)
        polarities = (v, -v)
        if self.rng is not None and self.rng.random() < 0.5:
            polarities = (-v, v)
        count = 0
        weight = Fraction(0) if self.weights is not None else None
        for lit in polarities:
            level = state.decision_level
            mark = len(state.trail)
            state.decide(lit)
            self.stats.decisions += 1
            if state.propagate() is None:
                if self.debug:
                    self._check_justified()
                c, w = self._expand(comp.variables, comp.clauses, mark)
                count += c
                if weight is not None:
                    weight += w
            self.stats.backtracks += 1
            self.stats.backtrack_level_sum += state.decision_level
            state.cancel_until(level)
        if self.cache is not None:
            self.cache.store(comp.key, count, weight)
        return count, weight

    def _check_justified(self):
        from .propagation import justified_assignment

        theta = {l for l in self.state.trail if abs(l) <= self.problem.program.num_vars}
        expect = {l for l in justified_assignment(self.problem.program, theta)
                  if l > 0 and l in self.problem.program.founded}
        if self.state.justified != expect:
            raise RuntimeError("justified set out of sync")
        if self.problem.copy:
            copies = {v for v, c in self.problem.copy.copy_of.items() if self.state.value[c] > 0}
            if copies != expect:
                raise RuntimeError("copy atoms disagree with the justified set")

    def run(self, assumptions: Sequence[int]) -> tuple[int, Fraction | None]:
        state = self.state
        for lit in assumptions:
            state.assign(lit, "assume")
        conflict = state.initial_units() or state.propagate()
        zero = Fraction(0) if self.weights is not None else None
        if conflict is not None:
            return 0, zero
        return self._expand(frozenset(range(1, state.num_vars + 1)),
                            range(len(self.problem.clauses)), 0)


def _split_assumptions(program: Program, mode: Mode, assumptions: Sequence[int]):
    """Assumptions on founded atoms become check-only units in STANDARD mode
    so that no founded atom is fixed without being derived."""
    assumptions = list(dict.fromkeys(assumptions))
    seen = set(assumptions)
    for l in assumptions:
        if -l in seen:
            raise InconsistentAssumptionsError(f"assumptions contain both {program.lit_name(abs(l))} "
                                               f"and its negation")
        if abs(l) > program.num_vars:
            raise InconsistentAssumptionsError(f"assumption {l} names no program variable")
    if mode is Mode.STANDARD:
        return ([l for l in assumptions if abs(l) not in program.founded],
                [l for l in assumptions if abs(l) in program.founded])
    return assumptions, []


def count_stable(program, mode: Mode = Mode.COPY, assumptions: Sequence[int] = (), *,
                 evidence: Sequence[int] | None = None, weighted: bool = False,
                 use_cache: bool = True, decompose: bool = True, cache: Cache | None = None,
                 cache_bytes: int | None = None, rng=None, trace=None,
                 debug: bool = False) -> CountResult:
    """Count the stable models of ``program`` that extend ``assumptions``.

    ``evidence`` defaults to the program's own evidence literals; every
    model counted must satisfy it.  With ``weighted`` the result also
    carries the exact probability mass of those models (standard atoms
    without a probability get 1/2).  ``rng`` randomises the decision order.
    """
    started = time.perf_counter()
    base = program.base if isinstance(program, CopyProgram) else program
    if evidence is None:
        evidence = base.evidence
    assumptions, extra = _split_assumptions(base, mode, assumptions)
    problem = _Problem(program, mode, list(evidence) + extra)
    weights = None
    if weighted:
        missing = base.standard - base.weights.keys()
        if missing:
            log.warning("%d standard variable(s) without probability, using 1/2", len(missing))
        weights = dict(base.weights)
    if use_cache and cache is None:
        cache = Cache(cache_bytes)
    search = _Search(problem, weights, cache if use_cache else None, decompose, rng, trace, debug)
    limit = sys.getrecursionlimit()
    if limit < 4 * problem.num_vars + 1000:
        sys.setrecursionlimit(4 * problem.num_vars + 1000)
    count, weight = search.run(assumptions)
    stats = search.stats
    stats.unfounded_events = search.state.unfounded_events
    stats.seconds = time.perf_counter() - started
    return CountResult(count, weight, stats)


def weighted_count(program, mode: Mode = Mode.COPY, assumptions: Sequence[int] = (),
                   **kwargs) -> CountResult:
    return count_stable(program, mode, assumptions, weighted=True, **kwargs)


def find_components(program, mode: Mode = Mode.COPY, assumptions: Sequence[int] = (), *,
                    evidence: Sequence[int] | None = None) -> list[Component]:
    """Components of the residual after propagating ``assumptions``.

    Returns an empty list both when nothing is left and on a conflict;
    callers that care should propagate themselves.
    """
    base = program.base if isinstance(program, CopyProgram) else program
    if evidence is None:
        evidence = base.evidence
    assumptions, extra = _split_assumptions(base, mode, assumptions)
    problem = _Problem(program, mode, list(evidence) + extra)
    search = _Search(problem, None, None, True, None, None, False)
    state = search.state
    for lit in assumptions:
        state.assign(lit, "assume")
    if state.initial_units() or state.propagate():
        return []
    return search._components(range(len(problem.clauses))) or []
