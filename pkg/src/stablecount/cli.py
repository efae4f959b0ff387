"""Command-line front end.

    stablecount count FILE [--assume a,-b] [--mode copy|standard] [--stats]
    stablecount infer FILE
    stablecount oracle FILE [--models]
    stablecount gen graphrel|smokers --n N --p P --seed S [-o FILE]
    stablecount debug prj FILE --assume ...

Exit status is 0 on success, 1 for bad input and 2 when a resource limit
is hit.
"""
from __future__ import annotations

import argparse
import logging
import random
import sys
from fractions import Fraction

from .counter import CountResult, Mode, count_stable
from .errors import SizeLimitError, StableCountError
from .generators import GenSpec, generate
from .inference import InferenceTask, format_probability, marginal
from .oracle import DEFAULT_LIMIT, enumerate_stable, oracle_count, oracle_marginal, oracle_weight
from .program import Program, format_program, parse_program
from .transform import closure, copy_transform, prj


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(f"{self.prog}: error: {message}")


def report_stats(result: CountResult) -> str:
    """One flat ``key=value`` record of the search statistics."""
    s = result.stats
    a = s.avg_backtrack_level
    fields = [
        ("D", s.decisions),
        ("A", "-" if a is None else f"{a:.3f}"),
        ("L", s.unfounded_events),
        ("cache_hits", s.cache_hits),
        ("components", s.components),
        ("time", f"{s.seconds:.3f}s"),
    ]
    return " ".join(f"{k}={v}" for k, v in fields)


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--mode", choices=[m.value for m in Mode], default=Mode.COPY.value)
    p.add_argument("--assume", default="", help="comma-separated literals, '-x' for negation")
    p.add_argument("--no-cache", action="store_true")
    p.add_argument("--no-decomp", action="store_true")
    p.add_argument("--stats", action="store_true")
    p.add_argument("--seed", type=int, default=None, help="randomise the decision order")
    p.add_argument("--trace", action="store_true", help="log propagation events to stderr")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="stablecount", description="Exact stable-model counting.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("count", help="count stable models")
    p.add_argument("file")
    p.add_argument("--weighted", action="store_true", help="also print the probability mass")
    _common(p)

    p = sub.add_parser("infer", help="marginal probabilities of the #query literals")
    p.add_argument("file")
    _common(p)

    p = sub.add_parser("oracle", help="brute-force reference answers")
    p.add_argument("file")
    p.add_argument("--models", action="store_true", help="list every stable model")
    p.add_argument("--limit", type=int, default=DEFAULT_LIMIT)
    _common(p)

    p = sub.add_parser("gen", help="generate a benchmark instance")
    p.add_argument("family", choices=["graphrel", "smokers"])
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--p", type=float, default=0.5, help="edge probability of the random graph")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--node-prob", type=float, default=0.5)
    p.add_argument("--edge-prob", type=float, default=0.5)
    p.add_argument("--query", default="", help="comma-separated node numbers")
    p.add_argument("--evidence", default="", help="comma-separated node numbers, -v for false")
    p.add_argument("--fix-random", type=int, default=None)
    p.add_argument("-o", "--output")

    p = sub.add_parser("debug", help="developer tools")
    dsub = p.add_subparsers(dest="tool", required=True, parser_class=_Parser)
    d = dsub.add_parser("prj", help="print the projected residual after propagating --assume")
    d.add_argument("file")
    _common(d)
    return parser


def _normalize_argv(argv):
    # "--assume -c" would read -c as an option
    out = []
    i = 0
    while i < len(argv):
        if argv[i] == "--assume" and i + 1 < len(argv):
            out.append("--assume=" + argv[i + 1])
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def _load(path: str) -> Program:
    with open(path, encoding="utf-8") as fh:
        return parse_program(fh.read())


def _assumptions(program: Program, text: str) -> list[int]:
    return [program.lit(t) for t in text.split(",") if t.strip()]


def _ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise _UsageError(f"expected comma-separated integers, got {text!r}") from None


def _tracer(program: Program):
    names = copy_transform(program)

    def trace(level, kind, lit, reason):
        shown = names.lit_name(lit) if lit else "-"
        if isinstance(reason, tuple):
            reason = ":".join(map(str, reason))
        print(f"{level} {kind} {shown} {reason}", file=sys.stderr)
    return trace


def _show(w: Fraction) -> str:
    return format_probability(w)


def _run(args, out) -> int:
    if args.command == "gen":
        try:
            spec = GenSpec(args.family, args.n, args.p, args.seed, args.node_prob, args.edge_prob,
                           _ints(args.query), _ints(args.evidence), fix_random=args.fix_random)
        except ValueError as exc:
            raise _UsageError(str(exc)) from None
        text = generate(spec)
        if args.output:
            with open(args.output, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            out.write(text)
        return 0

    program = _load(args.file)
    assume = _assumptions(program, args.assume)
    mode = Mode(args.mode)
    options = dict(use_cache=not args.no_cache, decompose=not args.no_decomp)

    if args.command == "count":
        rng = random.Random(args.seed) if args.seed is not None else None
        trace = _tracer(program) if args.trace else None
        result = count_stable(program, mode, assume, weighted=args.weighted, rng=rng,
                              trace=trace, **options)
        print(result.count, file=out)
        if args.weighted:
            print(f"weight {_show(result.weight)}", file=out)
        if args.stats:
            print(report_stats(result), file=out)
    elif args.command == "infer":
        task = InferenceTask(program, mode, program.queries, program.evidence + tuple(assume))
        for q, w in marginal(task, **options).items():
            print(f"query {program.lit_name(q)} {_show(w)}", file=out)
    elif args.command == "oracle":
        print(f"count {oracle_count(program, assume, limit=args.limit)}", file=out)
        print(f"weight {_show(oracle_weight(program, assume, limit=args.limit))}", file=out)
        if program.queries:
            evidence = program.evidence + tuple(assume)
            for q, w in oracle_marginal(program, evidence=evidence, limit=args.limit).items():
                print(f"query {program.lit_name(q)} {_show(w)}", file=out)
        if args.models:
            need = set(assume) | set(program.evidence)
            for m in enumerate_stable(program, args.limit).models:
                if need <= set(m):
                    print("model " + " ".join(program.lit_name(l) for l in m), file=out)
    else:
        q = copy_transform(program)
        pi = closure(q, assume)
        if pi is None:
            print("conflict", file=out)
            return 0
        print("% assignment: " + " ".join(q.lit_name(l) for l in sorted(pi, key=abs)), file=out)
        out.write(format_program(prj(q, pi)))
    return 0


def main(argv=None, out=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    out = sys.stdout if out is None else out
    try:
        args = build_parser().parse_args(_normalize_argv(argv))
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.ERROR,
                        format="%(levelname)s: %(message)s")
    try:
        return _run(args, out)
    except (SizeLimitError, MemoryError, RecursionError) as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return 2
    except (StableCountError, OSError, _UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


run_cli = main
