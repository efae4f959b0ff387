"""Brute-force reference semantics for small programs.

Every complete assignment is tested against the stable-model definition:
constraints hold and the founded part equals the least model of the
reduct.  Assignments are processed in numpy blocks; standard atoms are the
outer (high) bits, founded atoms the inner bits.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm, prod
from typing import Iterable, Sequence

import numpy as np

from .errors import SizeLimitError, ZeroEvidenceWeightError
from .program import Program

DEFAULT_LIMIT = 22
_BLOCK_BITS = 16


@dataclass(frozen=True)
class StableModelSet:
    """Stable models as sorted literal tuples, in enumeration order."""

    program: Program
    models: tuple[tuple[int, ...], ...]

    def __len__(self):
        return len(self.models)

    def names(self) -> list[set[str]]:
        return [{self.program.lit_name(l) for l in m} for m in self.models]


def _bit_order(p: Program) -> list[int]:
    # variable at position i is bit i of the enumeration index; founded low
    return sorted(p.founded) + sorted(p.standard)


def _stable_rows(p: Program, limit: int):
    """Yield (index array, values) for each block of stable assignments.

    ``values[:, v - 1]`` is the truth value of variable ``v``.
    """
    n = p.num_vars
    if n > limit:
        raise SizeLimitError(f"{n} variables exceed the enumeration limit of {limit}")
    order = _bit_order(p)
    total = 1 << n
    block = min(total, 1 << _BLOCK_BITS)
    founded = sorted(p.founded)
    for start in range(0, total, block):
        idx = np.arange(start, start + block, dtype=np.int64)
        values = np.empty((block, n), dtype=bool)
        for bit, v in enumerate(order):
            values[:, v - 1] = (idx >> bit) & 1
        ok = np.ones(block, dtype=bool)
        for c in p.constraints:
            sat = np.zeros(block, dtype=bool)
            for l in c:
                sat |= values[:, l - 1] if l > 0 else ~values[:, -l - 1]
            ok &= sat
        if not ok.any():
            continue
        # reduct: rules survive unless a negated atom or a standard positive
        # atom rules them out; founded positive atoms stay in the body
        alive = []
        for r in p.rules:
            keep = np.ones(block, dtype=bool)
            pos = []
            for l in r.body:
                if l < 0:
                    keep &= ~values[:, -l - 1]
                elif l in p.founded:
                    pos.append(l)
                else:
                    keep &= values[:, l - 1]
            alive.append((r.head, keep, pos))
        least = {v: np.zeros(block, dtype=bool) for v in founded}
        changed = True
        while changed:
            changed = False
            for head, keep, pos in alive:
                fire = keep.copy()
                for b in pos:
                    fire &= least[b]
                new = fire & ~least[head]
                if new.any():
                    least[head] |= new
                    changed = True
        for v in founded:
            ok &= least[v] == values[:, v - 1]
        if ok.any():
            yield idx[ok], values[ok]


def enumerate_stable(p: Program, limit: int = DEFAULT_LIMIT) -> StableModelSet:
    n = p.num_vars
    models = []
    for _, rows in _stable_rows(p, limit):
        for row in rows:
            models.append(tuple((v if row[v - 1] else -v) for v in range(1, n + 1)))
    return StableModelSet(p, tuple(models))


def _weight_parts(p: Program):
    """Integer numerators per literal over a shared denominator."""
    probs = {v: p.weights.get(v, Fraction(1, 2)) for v in p.standard}
    denom = lcm(*(w.denominator for w in probs.values())) if probs else 1
    num = {}
    for v, w in probs.items():
        t = w.numerator * (denom // w.denominator)
        num[v] = t
        num[-v] = denom - t
    return num, denom


def model_weight(p: Program, model: Iterable[int]) -> Fraction:
    num, denom = _weight_parts(p)
    lits = [l for l in model if abs(l) in p.standard]
    return Fraction(prod(num[l] for l in lits), denom ** len(lits))


def _required(p, assumptions, evidence):
    return set(assumptions) | set(p.evidence if evidence is None else evidence)


def oracle_count(p: Program, assumptions: Sequence[int] = (), evidence: Sequence[int] | None = None,
                 limit: int = DEFAULT_LIMIT) -> int:
    """Number of stable models containing ``assumptions`` and the evidence
    (the program's own unless given)."""
    need = _required(p, assumptions, evidence)
    return sum(1 for m in enumerate_stable(p, limit).models if need <= set(m))


def oracle_weight(p: Program, assumptions: Sequence[int] = (), evidence: Sequence[int] | None = None,
                  limit: int = DEFAULT_LIMIT) -> Fraction:
    """Probability mass of the stable models extending ``assumptions``."""
    need = _required(p, assumptions, evidence)
    num, denom = _weight_parts(p)
    std = sorted(p.standard)
    total = 0
    for m in enumerate_stable(p, limit).models:
        if need <= set(m):
            total += prod(num[m[v - 1]] for v in std)
    return Fraction(total, denom ** len(std))


def oracle_marginal(p: Program, queries: Sequence[int] | None = None,
                    evidence: Sequence[int] | None = None,
                    limit: int = DEFAULT_LIMIT) -> dict[int, Fraction]:
    """P(q | evidence) for each query literal, by enumeration."""
    queries = p.queries if queries is None else queries
    evidence = p.evidence if evidence is None else evidence
    num, denom = _weight_parts(p)
    std = sorted(p.standard)
    total = 0
    per_query = dict.fromkeys(queries, 0)
    for m in enumerate_stable(p, limit).models:
        mset = set(m)
        if not all(e in mset for e in evidence):
            continue
        w = prod(num[m[v - 1]] for v in std)
        total += w
        for q in per_query:
            if q in mset:
                per_query[q] += w
    if total == 0:
        raise ZeroEvidenceWeightError("evidence has probability zero")
    return {q: Fraction(w, total) for q, w in per_query.items()}
