"""Ground ASP-SAT programs: data types, text format, and static analysis.

Variables are interned to dense integers ``1..n`` and literals are signed
integers in DIMACS style (``v`` is the positive literal, ``-v`` its
negation).  A program partitions its variables into *founded* variables,
which must be derived by rules, and *standard* variables, which are free
choices.  Constraints are disjunctive clauses.
"""
from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import networkx as nx

from .errors import ParseError, ProgramError, StableCountError

log = logging.getLogger(__name__)

Clause = tuple  # tuple[int, ...] of literals


def var(lit: int) -> int:
    return lit if lit > 0 else -lit


def clause_vars(clauses: Iterable[Sequence[int]]) -> set[int]:
    return {abs(l) for c in clauses for l in c}


@dataclass(frozen=True)
class Rule:
    """``head <- body``; body literals may be founded, standard or negated."""

    head: int
    body: tuple[int, ...] = ()

    def clause(self) -> tuple[int, ...]:
        """The rule read as a clause: ``head or not b1 or ...``."""
        return (self.head,) + tuple(-l for l in self.body)


@dataclass(frozen=True)
class Program:
    """A validated ground program.

    ``names[v - 1]`` is the printable identifier of variable ``v``.  Rules
    that can never fire (contradictory bodies) or only support themselves
    (head in the positive body) are dropped; duplicate rules are merged.
    """

    names: tuple[str, ...]
    founded: frozenset[int]
    standard: frozenset[int]
    rules: tuple[Rule, ...] = ()
    constraints: tuple[Clause, ...] = ()
    weights: Mapping[int, Fraction] = field(default_factory=dict)
    queries: tuple[int, ...] = ()
    evidence: tuple[int, ...] = ()

    def __post_init__(self):
        n = len(self.names)
        if self.founded & self.standard:
            raise ProgramError("variables declared both founded and standard: "
                               + ", ".join(self.name(v) for v in sorted(self.founded & self.standard)))
        if self.founded | self.standard != frozenset(range(1, n + 1)):
            raise ProgramError("founded and standard variables must partition 1..n")
        if len(set(self.names)) != n:
            raise ProgramError("duplicate variable names")

        def check_lit(l):
            if not isinstance(l, int) or l == 0 or abs(l) > n:
                raise ProgramError(f"literal {l!r} out of range")

        rules, seen = [], set()
        for r in self.rules:
            check_lit(r.head)
            for l in r.body:
                check_lit(l)
            if r.head not in self.founded:
                raise ProgramError(f"rule head {self.name(r.head)} is not founded")
            body = tuple(dict.fromkeys(r.body))
            if any(-l in body for l in body):
                log.warning("dropping rule for %s with contradictory body", self.name(r.head))
                continue
            if r.head in body:
                log.warning("dropping self-supporting rule for %s", self.name(r.head))
                continue
            key = (r.head, frozenset(body))
            if key in seen:
                log.warning("duplicate rule for %s ignored", self.name(r.head))
                continue
            seen.add(key)
            rules.append(Rule(r.head, body))
        object.__setattr__(self, "rules", tuple(rules))

        constraints = []
        for c in self.constraints:
            if not c:
                raise ProgramError("empty constraint")
            for l in c:
                check_lit(l)
            c = tuple(dict.fromkeys(c))
            if any(-l in c for l in c):
                raise ProgramError("tautological constraint: " + self.format_clause(c))
            constraints.append(c)
        object.__setattr__(self, "constraints", tuple(constraints))

        weights = {}
        for v, w in dict(self.weights).items():
            if v not in self.standard:
                raise ProgramError(f"probability on non-standard variable {self.name(v)}")
            w = Fraction(w)
            if not 0 <= w <= 1:
                raise ProgramError(f"probability of {self.name(v)} outside [0, 1]")
            weights[v] = w
        object.__setattr__(self, "weights", weights)
        for l in self.queries + self.evidence:
            check_lit(l)

    @property
    def num_vars(self) -> int:
        return len(self.names)

    @cached_property
    def index(self) -> dict[str, int]:
        return {name: i + 1 for i, name in enumerate(self.names)}

    def name(self, v: int) -> str:
        return self.names[v - 1]

    def lit(self, text: str) -> int:
        """Parse ``x``, ``-x`` or ``not x`` into a literal of this program."""
        text = text.strip()
        neg = False
        if text.startswith("not "):
            neg, text = True, text[4:].strip()
        elif text.startswith("-") or text.startswith("~"):
            neg, text = True, text[1:].strip()
        try:
            v = self.index[text]
        except KeyError:
            raise ProgramError(f"unknown variable {text!r}") from None
        return -v if neg else v

    def lit_name(self, lit: int) -> str:
        return ("-" if lit < 0 else "") + self.name(abs(lit))

    def format_clause(self, clause: Iterable[int]) -> str:
        return " | ".join(self.lit_name(l) for l in clause)

    @cached_property
    def rules_by_head(self) -> dict[int, list[Rule]]:
        out = {v: [] for v in self.founded}
        for r in self.rules:
            out[r.head].append(r)
        return out

    @property
    def unsupported(self) -> frozenset[int]:
        """Founded variables without rules; false in every stable model."""
        return frozenset(v for v, rs in self.rules_by_head.items() if not rs)

    def replace(self, **changes) -> "Program":
        fields = dict(names=self.names, founded=self.founded, standard=self.standard,
                      rules=self.rules, constraints=self.constraints, weights=self.weights,
                      queries=self.queries, evidence=self.evidence)
        fields.update(changes)
        return Program(**fields)


def make_program(founded=(), standard=(), rules=(), constraints=(), weights=None,
                 queries=(), evidence=()) -> Program:
    """Build a program from names, e.g. ``rules=[("a", ["b", "not c"])]``.

    Constraints are clauses given as lists of literal strings (``"-x"`` or
    ``"not x"`` for negation).  Variables are numbered founded first.
    """
    names = list(founded) + list(standard)
    index = {n: i + 1 for i, n in enumerate(names)}

    def lit(text):
        text = text.strip()
        neg = text.startswith("-") or text.startswith("not ")
        text = text[4:] if text.startswith("not ") else text.lstrip("-")
        return -index[text.strip()] if neg else index[text.strip()]

    return Program(
        names=tuple(names),
        founded=frozenset(range(1, len(founded) + 1)),
        standard=frozenset(range(len(founded) + 1, len(names) + 1)),
        rules=tuple(Rule(index[h], tuple(lit(b) for b in body)) for h, body in rules),
        constraints=tuple(tuple(lit(l) for l in c) for c in constraints),
        weights={index[k]: Fraction(w) for k, w in (weights or {}).items()},
        queries=tuple(lit(q) for q in queries),
        evidence=tuple(lit(e) for e in evidence),
    )


# ---------------------------------------------------------------------------
# text format

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r\f]+)
  | (?P<nl>\n)
  | (?P<comment>%[^\n]*)
  | (?P<directive>\#[A-Za-z_]+)
  | (?P<neck>:-)
  | (?P<comma>,)
  | (?P<number>\d+(?:\.\d+)?(?:[eE][-+]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_()]*)
  | (?P<dot>\.)
""", re.VERBOSE)

_DIRECTIVES = {"#standard", "#founded", "#prob", "#query", "#evidence"}


def _tokenize(text):
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind not in ("ws", "comment"):
            yield kind, m.group(), line, m.start() - line_start + 1
        pos = m.end()
    yield "eof", "", line, pos - line_start + 1


def _statements(text):
    stmt = []
    for tok in _tokenize(text):
        if tok[0] == "eof":
            if stmt:
                raise ParseError("missing '.' at end of statement", *stmt[0][2:])
            return
        if tok[0] == "dot":
            if not stmt:
                raise ParseError("empty statement", *tok[2:])
            yield stmt, tok
            stmt = []
        else:
            stmt.append(tok)


def parse_program(text: str) -> Program:
    """Parse the line-oriented program format (see README)."""
    names: list[str] = []
    index: dict[str, int] = {}
    founded: set[int] = set()
    rules, constraints, queries, evidence = [], [], [], []
    weights: dict[int, Fraction] = {}

    def ident(tok):
        if tok[0] != "ident" or tok[1] in ("not", "rule"):
            raise ParseError(f"expected identifier, found {tok[1]!r}", *tok[2:])
        return tok[1]

    def lookup(tok):
        name = ident(tok)
        if name not in index:
            raise ParseError(f"undeclared variable {name!r}", *tok[2:])
        return index[name]

    def literals(toks, end):
        """Comma-separated literals; returns list of ints."""
        out, i = [], 0
        if not toks:
            raise ParseError("expected literal", *end[2:])
        while True:
            if i >= len(toks):
                raise ParseError("expected literal", *end[2:])
            if toks[i][0] == "ident" and toks[i][1] == "not" and i + 1 < len(toks) \
                    and toks[i + 1][0] == "ident":
                out.append(-lookup(toks[i + 1]))
                i += 2
            else:
                out.append(lookup(toks[i]))
                i += 1
            if i == len(toks):
                return out
            if toks[i][0] != "comma":
                raise ParseError(f"expected ',' found {toks[i][1]!r}", *toks[i][2:])
            i += 1

    for stmt, end in _statements(text):
        head = stmt[0]
        kind, value = head[0], head[1]
        if kind == "directive":
            if value not in _DIRECTIVES:
                raise ParseError(f"unknown directive {value}", *head[2:])
            args = stmt[1:]
            if value in ("#standard", "#founded"):
                for tok in args:
                    name = ident(tok)
                    if name in index:
                        raise ParseError(f"duplicate declaration of {name!r}", *tok[2:])
                    names.append(name)
                    index[name] = len(names)
                    if value == "#founded":
                        founded.add(len(names))
            elif value == "#prob":
                if len(args) != 2 or args[1][0] != "number":
                    raise ParseError("expected '#prob <variable> <number>.'", *head[2:])
                v = lookup(args[0])
                if v in founded:
                    raise ParseError(f"probability on founded variable {args[0][1]!r}", *args[0][2:])
                if v in weights:
                    raise ParseError(f"duplicate probability for {args[0][1]!r}", *args[0][2:])
                w = Fraction(args[1][1])
                if w > 1:
                    raise ParseError(f"probability {args[1][1]} outside [0, 1]", *args[1][2:])
                weights[v] = w
            else:
                lits = literals(args, end)
                if len(lits) != 1:
                    raise ParseError(f"{value} takes exactly one literal", *head[2:])
                (queries if value == "#query" else evidence).append(lits[0])
        elif kind == "ident" and value == "rule":
            if len(stmt) < 2:
                raise ParseError("rule without head", *head[2:])
            h = lookup(stmt[1])
            if h not in founded:
                raise ParseError(f"rule head {stmt[1][1]!r} is not a founded variable", *stmt[1][2:])
            if len(stmt) == 2:
                body = []
            elif stmt[2][0] == "neck":
                body = literals(stmt[3:], end)
            else:
                raise ParseError(f"expected ':-' found {stmt[2][1]!r}", *stmt[2][2:])
            rules.append(Rule(h, tuple(body)))
        elif kind == "neck":
            body = literals(stmt[1:], end)
            clause = tuple(dict.fromkeys(-l for l in body))
            if any(-l in clause for l in clause):
                raise ParseError("tautological constraint", *head[2:])
            constraints.append(clause)
        else:
            raise ParseError(f"unexpected {value!r} at start of statement", *head[2:])

    try:
        return Program(
            names=tuple(names),
            founded=frozenset(founded),
            standard=frozenset(range(1, len(names) + 1)) - founded,
            rules=tuple(rules),
            constraints=tuple(constraints),
            weights=weights,
            queries=tuple(queries),
            evidence=tuple(evidence),
        )
    except ProgramError as exc:
        raise ParseError(str(exc)) from None


def format_fraction(w: Fraction) -> str:
    """Exact decimal text for terminating fractions."""
    w = Fraction(w)
    d = w.denominator
    for p in (2, 5):
        while d % p == 0:
            d //= p
    if d != 1:
        return repr(float(w))
    digits = 0
    while (w * 10 ** digits).denominator != 1:
        digits += 1
    if digits == 0:
        return str(w.numerator)
    scaled = w.numerator * 10 ** digits // w.denominator
    s = str(scaled).rjust(digits + 1, "0")
    return f"{s[:-digits]}.{s[-digits:]}"


def format_program(p: Program) -> str:
    def lit(l):
        return ("not " if l < 0 else "") + p.name(abs(l))

    out = []
    # declaration order fixes variable numbering on re-parse
    for v in range(1, p.num_vars + 1):
        kind = "#founded" if v in p.founded else "#standard"
        if out and out[-1][0] == kind:
            out[-1][1].append(p.name(v))
        else:
            out.append((kind, [p.name(v)]))
    lines = [f"{kind} {' '.join(vs)}." for kind, vs in out]
    for r in p.rules:
        if r.body:
            lines.append(f"rule {p.name(r.head)} :- {', '.join(lit(l) for l in r.body)}.")
        else:
            lines.append(f"rule {p.name(r.head)}.")
    for c in p.constraints:
        lines.append(f":- {', '.join(lit(-l) for l in c)}.")
    for v in sorted(p.weights):
        lines.append(f"#prob {p.name(v)} {format_fraction(p.weights[v])}.")
    lines += [f"#query {lit(q)}." for q in p.queries]
    lines += [f"#evidence {lit(e)}." for e in p.evidence]
    return "\n".join(lines) + ("\n" if lines else "")


# ---------------------------------------------------------------------------
# static analysis

def dependency_graph(p: Program) -> nx.DiGraph:
    """Edges ``b -> a`` for founded body variables ``b`` of rules with head ``a``.

    Each edge carries boolean attributes ``positive`` and ``negative``
    recording the polarities under which ``b`` occurs.
    """
    g = nx.DiGraph()
    g.add_nodes_from(sorted(p.founded))
    for r in p.rules:
        for l in r.body:
            if abs(l) not in p.founded:
                continue
            key = "positive" if l > 0 else "negative"
            if g.has_edge(abs(l), r.head):
                g.edges[abs(l), r.head][key] = True
            else:
                g.add_edge(abs(l), r.head, positive=False, negative=False)
                g.edges[abs(l), r.head][key] = True
    return g


@dataclass(frozen=True)
class LevelMap:
    level: Mapping[int, int]


@dataclass(frozen=True)
class Stratification:
    """Either a level map (``stratified``) or a cycle through a negative edge."""

    levels: LevelMap | None = None
    witness: tuple[int, ...] | None = None

    @property
    def stratified(self) -> bool:
        return self.levels is not None


def check_stratified(p: Program) -> Stratification:
    g = dependency_graph(p)
    comp_of = {}
    for i, comp in enumerate(nx.strongly_connected_components(g)):
        for v in comp:
            comp_of[v] = i
    for u, v, data in sorted(g.edges(data=True)):
        if data["negative"] and comp_of[u] == comp_of[v]:
            if u == v:
                return Stratification(witness=(u, u))
            back = nx.shortest_path(g, v, u)
            return Stratification(witness=(u,) + tuple(back))

    dag = nx.condensation(g, scc=None)
    mapping = dag.graph["mapping"]
    step = {}
    for u, v, data in g.edges(data=True):
        cu, cv = mapping[u], mapping[v]
        if cu != cv:
            step[cu, cv] = max(step.get((cu, cv), 0), 1 if data["negative"] else 0)
    comp_level = {}
    for c in nx.topological_sort(dag):
        comp_level[c] = max((comp_level[b] + step[b, c] for b in dag.predecessors(c)), default=0)
    return Stratification(levels=LevelMap({v: comp_level[mapping[v]] for v in g.nodes}))


def is_stratified(p: Program) -> bool:
    return check_stratified(p).stratified


# ---------------------------------------------------------------------------
# residuals

class FalsifiedClause(StableCountError):
    """A clause lost all its literals under an assignment."""

    def __init__(self, clause):
        self.clause = tuple(clause)
        super().__init__(f"clause {self.clause} falsified")


def residual_formula(clauses: Iterable[Sequence[int]], theta: Iterable[int]) -> list[Clause]:
    """Simplify ``clauses`` by the literals in ``theta``.

    Satisfied clauses are dropped and false literals removed.  Raises
    :class:`FalsifiedClause` if some clause becomes empty.
    """
    theta = set(theta)
    out = []
    for c in clauses:
        if any(l in theta for l in c):
            continue
        rest = tuple(l for l in c if -l not in theta)
        if not rest:
            raise FalsifiedClause(c)
        out.append(rest)
    return out
