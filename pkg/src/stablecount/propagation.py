"""Unit propagation, reducts, least models and unfounded-set propagation."""
from __future__ import annotations

from typing import Callable, Iterable, NamedTuple, Sequence

from .program import Program, Rule


# ---------------------------------------------------------------------------
# reference semantics on explicit literal sets

def reduct(rules: Iterable[Rule], theta: Iterable[int], founded) -> list[Rule]:
    """Positive rules left after reducing ``rules`` by ``theta``.

    A rule is discarded when one of its negated body atoms is true in
    ``theta`` or one of its standard positive body atoms is false.  The
    survivors keep only their founded positive body atoms.
    """
    theta = set(theta)
    out = []
    for r in rules:
        if any(l < 0 and -l in theta for l in r.body):
            continue
        if any(l > 0 and l not in founded and -l in theta for l in r.body):
            continue
        out.append(Rule(r.head, tuple(l for l in r.body if l > 0 and l in founded)))
    return out


def least_model(rules: Iterable[Rule], founded=None) -> set[int]:
    """Least model of positive rules by forward chaining.

    Returns the derived atoms, or a full literal set over ``founded`` when
    that is given (underived atoms negative).
    """
    rules = list(rules)
    for r in rules:
        if any(l < 0 for l in r.body):
            raise ValueError("least_model needs positive rules")
    derived = _forward_chain(rules, lambda l: False)
    if founded is None:
        return derived
    return {v if v in derived else -v for v in founded}


def _forward_chain(rules, holds: Callable[[int], bool]) -> set[int]:
    """Heads derivable when positive body atoms come from derivation and
    every other body literal must satisfy ``holds``."""
    pending = {}
    watch: dict[int, list[int]] = {}
    queue = []
    heads = []
    for i, r in enumerate(rules):
        heads.append(r.head)
        need = 0
        blocked = False
        for l in r.body:
            if l > 0 and not holds(l):
                need += 1
                watch.setdefault(l, []).append(i)
            elif l < 0 and not holds(l):
                blocked = True
        if blocked:
            continue
        pending[i] = need
        if need == 0:
            queue.append(r.head)
    derived = set()
    while queue:
        h = queue.pop()
        if h in derived:
            continue
        derived.add(h)
        for i in watch.get(h, ()):
            if i in pending:
                pending[i] -= 1
                if pending[i] == 0:
                    queue.append(heads[i])
    return derived


def justified_assignment(p: Program, theta: Iterable[int]) -> set[int]:
    """The justified subset of ``theta``.

    Negative literals and true standard atoms are justified outright; a
    true founded atom is justified when the rules derive it from those.
    """
    theta = set(theta)
    seed = {l for l in theta if l < 0 or l in p.standard}
    derived = _forward_chain(p.rules, seed.__contains__)
    return seed | {v for v in derived if v in theta}


def is_stable(p: Program, theta: Iterable[int]) -> bool:
    """Complete assignment check straight from the definition."""
    theta = set(theta)
    for c in p.constraints:
        if not any(l in theta for l in c):
            return False
    least = least_model(reduct(p.rules, theta, p.founded))
    return all((v in least) == (v in theta) for v in p.founded)


# ---------------------------------------------------------------------------
# incremental propagation state

class Conflict(NamedTuple):
    kind: str      # "clause" or "unfounded"
    detail: int    # clause index or variable


class PropagationState:
    """Assignment with trail plus clause and rule propagators.

    ``clauses`` is the full clause set; clauses flagged non-propagating are
    only checked (they raise a conflict once every literal is false).
    ``rules`` drive unfounded-set propagation over ``founded`` variables.
    """

    def __init__(self, num_vars: int, clauses: Sequence[Sequence[int]], rules: Sequence[Rule],
                 founded, propagating: Sequence[bool] | None = None, trace=None, rng=None):
        self.num_vars = num_vars
        self.clauses = [tuple(c) for c in clauses]
        self.propagating = list(propagating) if propagating is not None else [True] * len(self.clauses)
        self.rules = list(rules)
        self.founded = frozenset(founded)
        self.trace = trace
        self.rng = rng

        self.value = [0] * (num_vars + 1)
        self.level = [0] * (num_vars + 1)
        self.reason: list[object] = [None] * (num_vars + 1)
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        self.qhead = 0
        self.unfounded_events = 0

        self.occ: dict[int, list[int]] = {}
        for i, c in enumerate(self.clauses):
            for l in c:
                self.occ.setdefault(l, []).append(i)

        self._heads = [r.head for r in self.rules]
        self._fpos = []
        self._other = []
        self._watch: dict[int, list[int]] = {}
        for i, r in enumerate(self.rules):
            fpos = tuple(l for l in r.body if l > 0 and l in self.founded)
            self._fpos.append(fpos)
            self._other.append(tuple(l for l in r.body if not (l > 0 and l in self.founded)))
            for f in fpos:
                self._watch.setdefault(f, []).append(i)
        self._sorted_founded = sorted(self.founded)

    # -- basic assignment -----------------------------------------------------

    @property
    def decision_level(self) -> int:
        return len(self.trail_lim)

    def lit_value(self, lit: int) -> int:
        v = self.value[lit if lit > 0 else -lit]
        return v if lit > 0 else -v

    def assign(self, lit: int, reason=None) -> bool:
        """Set ``lit`` true; False if its variable already has the other value."""
        cur = self.lit_value(lit)
        if cur:
            return cur > 0
        v = abs(lit)
        self.value[v] = 1 if lit > 0 else -1
        self.level[v] = self.decision_level
        self.reason[v] = reason
        self.trail.append(lit)
        if self.trace:
            kind = reason if isinstance(reason, str) else "unit"
            self.trace(self.decision_level, kind, lit, reason)
        return True

    def decide(self, lit: int) -> None:
        self.trail_lim.append(len(self.trail))
        self.assign(lit, "decide")

    def cancel_until(self, level: int) -> None:
        if self.decision_level <= level:
            return
        stop = self.trail_lim[level]
        for lit in self.trail[stop:]:
            v = abs(lit)
            self.value[v] = 0
            self.reason[v] = None
        del self.trail[stop:]
        del self.trail_lim[level:]
        self.qhead = min(self.qhead, stop)

    def assignment(self) -> set[int]:
        return set(self.trail)

    def clause_status(self, i: int):
        """None if clause ``i`` is satisfied, else its unassigned literals."""
        rest = []
        for l in self.clauses[i]:
            val = self.lit_value(l)
            if val > 0:
                return None
            if val == 0:
                rest.append(l)
        return rest

    # -- propagators ----------------------------------------------------------

    def initial_units(self):
        """Check clauses that are unit or empty before anything is assigned."""
        for i, c in enumerate(self.clauses):
            rest = self.clause_status(i)
            if rest is None:
                continue
            if not rest:
                return self._conflict(Conflict("clause", i))
            if len(rest) == 1 and self.propagating[i]:
                self.assign(rest[0], ("unit", i))
        return None

    def _conflict(self, c: Conflict) -> Conflict:
        if self.trace:
            self.trace(self.decision_level, "conflict", c.detail if c.kind == "unfounded" else 0, c)
        return c

    def unit_propagate(self) -> Conflict | None:
        trail = self.trail
        value = self.value
        rng = self.rng
        while self.qhead < len(trail):
            if rng is not None and len(trail) - self.qhead > 1:
                j = rng.randrange(self.qhead, len(trail))
                trail[self.qhead], trail[j] = trail[j], trail[self.qhead]
            lit = trail[self.qhead]
            self.qhead += 1
            occ = self.occ.get(-lit, ())
            if rng is not None:
                occ = list(occ)
                rng.shuffle(occ)
            for i in occ:
                unassigned = 0
                last = 0
                satisfied = False
                for l in self.clauses[i]:
                    val = value[l] if l > 0 else -value[-l]
                    if val > 0:
                        satisfied = True
                        break
                    if val == 0:
                        unassigned += 1
                        last = l
                if satisfied:
                    continue
                if unassigned == 0:
                    return self._conflict(Conflict("clause", i))
                if unassigned == 1 and self.propagating[i]:
                    self.assign(last, ("unit", i))
        return None

    def supported(self) -> set[int]:
        """Founded atoms that could still be derived if every unassigned
        non-founded body literal turned out true."""
        value = self.value
        missing = [-1] * len(self.rules)
        queue = []
        for i, h in enumerate(self._heads):
            if value[h] < 0:
                continue
            ok = True
            for l in self._other[i]:
                if (value[l] if l > 0 else -value[-l]) < 0:
                    ok = False
                    break
            if not ok:
                continue
            for f in self._fpos[i]:
                if value[f] < 0:
                    ok = False
                    break
            if not ok:
                continue
            missing[i] = len(self._fpos[i])
            if missing[i] == 0:
                queue.append(h)
        supported = set()
        while queue:
            h = queue.pop()
            if h in supported:
                continue
            supported.add(h)
            for i in self._watch.get(h, ()):
                if missing[i] > 0:
                    missing[i] -= 1
                    if missing[i] == 0:
                        queue.append(self._heads[i])
        return supported

    def unfounded_set(self) -> list[int]:
        supported = self.supported()
        value = self.value
        return [v for v in self._sorted_founded if value[v] >= 0 and v not in supported]

    def unfounded_propagate(self) -> Conflict | None:
        """Set every unfounded atom false; conflict if one of them is true."""
        unfounded = self.unfounded_set()
        if not unfounded:
            return None
        self.unfounded_events += 1
        for v in unfounded:
            if self.value[v] > 0:
                return self._conflict(Conflict("unfounded", v))
        for v in unfounded:
            self.assign(-v, "unfounded")
        return None

    def propagate(self) -> Conflict | None:
        """Run both propagators to a joint fixpoint."""
        while True:
            conflict = self.unit_propagate()
            if conflict:
                return conflict
            before = len(self.trail)
            conflict = self.unfounded_propagate()
            if conflict:
                return conflict
            if len(self.trail) == before:
                return None

    @property
    def justified(self) -> set[int]:
        """Justified founded atoms of the current assignment."""
        value = self.value

        def holds(l):
            if l > 0 and l in self.founded:
                return False
            return (value[l] if l > 0 else -value[-l]) > 0

        derived = _forward_chain(self.rules, holds)
        return {v for v in derived if value[v] > 0}
