"""Entailment checking for symbolic heaps with arrays over Presburger arithmetic."""

from .backend import Answer, SolverConfig, decide_validity, emit_smtlib
from .bench import BenchSpec, generate_bench
from .optimizer import apply_frame_rule, prune_succedents
from .parser import ParseError, parse_entailment, parse_file, parse_heap
from .pipeline import RunOptions, Status, Verdict, decide
from .semantics import Countermodel, oracle_search
from .sorted import decompose
from .syntax import (
    EMP, Arr, Entailment, PointsTo, SymbolicHeap, Term, const, eq, ge, gt, le, lt, neq, var,
)
from .translation import build_validity_formula, check_condition, translate_p

__version__ = "0.1.0"

__all__ = [
    "Answer", "SolverConfig", "decide_validity", "emit_smtlib", "BenchSpec", "generate_bench",
    "apply_frame_rule", "prune_succedents", "ParseError", "parse_entailment", "parse_file", "parse_heap",
    "RunOptions", "Status", "Verdict", "decide", "Countermodel", "oracle_search", "decompose",
    "EMP", "Arr", "Entailment", "PointsTo", "SymbolicHeap", "Term", "const", "eq", "ge", "gt",
    "le", "lt", "neq", "var", "build_validity_formula", "check_condition", "translate_p",
]
