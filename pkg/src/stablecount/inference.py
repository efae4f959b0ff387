"""Marginal probabilities of query literals given evidence.

Each marginal is a ratio of two weighted stable-model counts: the mass of
the models satisfying the evidence and the query over the mass of those
satisfying the evidence alone.
"""
from __future__ import annotations

import decimal
from dataclasses import dataclass, field
from fractions import Fraction

from .counter import Mode, weighted_count
from .errors import NotStratifiedError, ProgramError, ZeroEvidenceWeightError
from .program import Program, check_stratified


@dataclass(frozen=True)
class InferenceTask:
    program: Program
    mode: Mode = Mode.COPY
    queries: tuple[int, ...] = field(default=())
    evidence: tuple[int, ...] = field(default=())

    @classmethod
    def from_program(cls, program: Program, mode: Mode = Mode.COPY) -> "InferenceTask":
        return cls(program, mode, program.queries, program.evidence)

    def validate(self) -> None:
        n = self.program.num_vars
        for l in self.queries + self.evidence:
            if l == 0 or abs(l) > n:
                raise ProgramError(f"literal {l} names no program variable")
        strat = check_stratified(self.program)
        if not strat.stratified:
            cycle = " -> ".join(self.program.name(v) for v in strat.witness)
            raise NotStratifiedError(f"program is not stratified (negative cycle {cycle})")


def marginal(task: InferenceTask, *, use_cache: bool = True,
             decompose: bool = True) -> dict[int, Fraction]:
    """P(q | evidence) for every query of ``task``, in query order."""
    task.validate()
    kw = dict(evidence=list(task.evidence), use_cache=use_cache, decompose=decompose)
    denom = weighted_count(task.program, task.mode, **kw).weight
    if denom == 0:
        raise ZeroEvidenceWeightError("evidence has probability zero")
    out = {}
    for q in task.queries:
        if q in task.evidence:
            out[q] = Fraction(1)
            continue
        if -q in task.evidence:
            out[q] = Fraction(0)
            continue
        out[q] = weighted_count(task.program, task.mode, [q], **kw).weight / denom
    return out


def format_probability(p: Fraction, digits: int = 12) -> str:
    """Decimal rendering rounded to ``digits`` significant digits."""
    if p == 0 or p == 1:
        return str(int(p))
    ctx = decimal.Context(prec=digits)
    d = ctx.divide(decimal.Decimal(p.numerator), decimal.Decimal(p.denominator))
    s = format(d, "f")
    return s.rstrip("0").rstrip(".") if "." in s else s
