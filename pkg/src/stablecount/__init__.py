"""Exact stable-model counting for ground ASP-SAT programs."""
from .counter import Cache, CountResult, Mode, count_stable, weighted_count
from .program import Program, Rule, make_program, parse_program, format_program

__all__ = ["Cache", "CountResult", "Mode", "Program", "Rule", "count_stable", "format_program",
           "make_program", "parse_program", "weighted_count"]
__version__ = "0.1.0"
