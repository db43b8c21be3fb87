"""Deciding closed Presburger formulas with an external SMT-LIB solver.

Formulas are emitted as SMT-LIB v2 over signed integers.  Our quantifiers
range over the naturals, so every bound variable gets a ``>= 0`` guard:
as an antecedent under ``forall`` and as a conjunct under ``exists``.
Validity is asked as unsatisfiability of the negation.
"""

from __future__ import annotations

import enum
import os
import shutil
import subprocess
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .semantics import eval_pure
from .syntax import (
    And, Diff, Exists, FalseF, Forall, Implies, Not, Or, Pure, PureAtom, Term,
    TrueF, free_vars,
)

__all__ = [
    "SolverConfig", "Answer", "BackendVerdict", "SolverError", "SolverConfigError",
    "emit_smtlib", "emit_sat_script", "smt_formula", "run_solver", "bounded_eval",
    "decide_validity", "check_sat_many", "SOLVER_ENV",
]

SOLVER_ENV = "SLARR_SOLVER"


class SolverConfigError(RuntimeError):
    pass


class SolverError(RuntimeError):
    def __init__(self, reason: str, detail: str = ""):
        super().__init__(f"{reason}: {detail}" if detail else reason)
        self.reason = reason


def _default_executable() -> str:
    return os.environ.get(SOLVER_ENV, "z3")


@dataclass(frozen=True)
class SolverConfig:
    executable: str = field(default_factory=_default_executable)
    args: tuple[str, ...] = ("-in",)
    timeout_ms: int = 60_000
    cwd: Optional[str] = None

    def __post_init__(self):
        if self.timeout_ms <= 0:
            raise ValueError("timeout must be positive")

    def resolve(self) -> str:
        path = shutil.which(self.executable)
        if path is None:
            raise SolverConfigError(f"solver executable not found: {self.executable!r} "
                                    f"(pass --solver or set {SOLVER_ENV})")
        return path


class Answer(enum.Enum):
    VALID = "valid"
    INVALID = "invalid"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class BackendVerdict:
    answer: Answer
    reason: Optional[str] = None  # timeout | solver-error | unsupported

    def __str__(self) -> str:
        return self.answer.value if self.reason is None else f"{self.answer.value} ({self.reason})"


# --------------------------------------------------------------------------
# SMT-LIB emission
# --------------------------------------------------------------------------

def _sym(name: str) -> str:
    return f"|{name}|"


def _term(t: Term | Diff) -> str:
    if isinstance(t, Diff):
        return f"(- {_term(t.pos)} {_term(t.neg)})"
    parts = [_sym(v) if c == 1 else f"(* {c} {_sym(v)})" for v, c in t.coeffs]
    if t.const or not parts:
        parts.append(str(t.const))
    return parts[0] if len(parts) == 1 else f"(+ {' '.join(parts)})"


_SMT_REL = {"eq": "=", "lt": "<", "le": "<="}


def smt_formula(f: Pure) -> str:
    out: list[str] = []
    _emit(f, out)
    return "".join(out)


def _guards(vs: Sequence[str]) -> str:
    gs = [f"(>= {_sym(v)} 0)" for v in vs]
    return gs[0] if len(gs) == 1 else f"(and {' '.join(gs)})"


def _emit(f: Pure, out: list[str]) -> None:
    # iterative-friendly recursion depth is bounded by formula nesting, which is shallow
    if isinstance(f, TrueF):
        out.append("true")
    elif isinstance(f, FalseF):
        out.append("false")
    elif isinstance(f, PureAtom):
        if f.rel == "neq":
            out.append(f"(not (= {_term(f.lhs)} {_term(f.rhs)}))")
        else:
            out.append(f"({_SMT_REL[f.rel]} {_term(f.lhs)} {_term(f.rhs)})")
    elif isinstance(f, (And, Or)):
        out.append("(and" if isinstance(f, And) else "(or")
        for a in f.args:
            out.append(" ")
            _emit(a, out)
        out.append(")")
    elif isinstance(f, Not):
        out.append("(not ")
        _emit(f.arg, out)
        out.append(")")
    elif isinstance(f, Implies):
        out.append("(=> ")
        _emit(f.lhs, out)
        out.append(" ")
        _emit(f.rhs, out)
        out.append(")")
    elif isinstance(f, (Exists, Forall)):
        if not f.vars:
            _emit(f.body, out)
            return
        decls = " ".join(f"({_sym(v)} Int)" for v in f.vars)
        if isinstance(f, Forall):
            out.append(f"(forall ({decls}) (=> {_guards(f.vars)} ")
        else:
            out.append(f"(exists ({decls}) (and {_guards(f.vars)} ")
        _emit(f.body, out)
        out.append("))")
    else:
        raise TypeError(f"not a pure formula: {f!r}")


def _declare(names) -> list[str]:
    lines = []
    for v in sorted(names):
        lines.append(f"(declare-const {_sym(v)} Int)")
        lines.append(f"(assert (>= {_sym(v)} 0))")
    return lines


def emit_smtlib(f: Pure) -> str:
    """Script whose answer is ``unsat`` exactly when ``f`` is valid over the naturals.

    Free variables, if any, are treated as universally quantified.
    """
    lines = ["(set-logic LIA)"]
    lines += _declare(free_vars(f))
    lines.append(f"(assert (not {smt_formula(f)}))")
    lines.append("(check-sat)")
    lines.append("(exit)")
    return "\n".join(lines) + "\n"


def emit_sat_script(formulas: Sequence[Pure]) -> str:
    """One ``check-sat`` per formula, free variables ranging over naturals."""
    lines = ["(set-logic LIA)"]
    for f in formulas:
        lines.append("(push 1)")
        lines += _declare(free_vars(f))
        lines.append(f"(assert {smt_formula(f)})")
        lines.append("(check-sat)")
        lines.append("(pop 1)")
    lines.append("(exit)")
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# Solver process
# --------------------------------------------------------------------------

_STATUS = ("sat", "unsat", "unknown")


def run_solver(script: str, cfg: SolverConfig, expect: int = 1) -> list[str]:
    """Run the solver on ``script`` and return its first ``expect`` status tokens.

    Raises :class:`SolverError` with reason ``timeout`` or ``solver-error``,
    and :class:`SolverConfigError` if the executable cannot be found.
    """
    exe = cfg.resolve()
    try:
        proc = subprocess.run([exe, *cfg.args], input=script, capture_output=True, text=True,
                              timeout=cfg.timeout_ms / 1000, cwd=cfg.cwd)
    except subprocess.TimeoutExpired as exc:
        raise SolverError("timeout", f"after {cfg.timeout_ms} ms") from exc
    except OSError as exc:
        raise SolverError("solver-error", str(exc)) from exc
    answers = [tok for tok in proc.stdout.split() if tok in _STATUS]
    if len(answers) < expect:
        detail = (proc.stdout + proc.stderr).strip().splitlines()
        raise SolverError("solver-error", detail[0] if detail else f"exit code {proc.returncode}")
    return answers[:expect]


def decide_validity(f: Pure, cfg: SolverConfig, dump_path: Optional[str] = None) -> BackendVerdict:
    script = emit_smtlib(f)
    if dump_path is not None:
        with open(dump_path, "w") as fh:
            fh.write(script)
    try:
        (ans,) = run_solver(script, cfg)
    except SolverError as exc:
        return BackendVerdict(Answer.UNKNOWN, exc.reason)
    if ans == "unsat":
        return BackendVerdict(Answer.VALID)
    if ans == "sat":
        return BackendVerdict(Answer.INVALID)
    return BackendVerdict(Answer.UNKNOWN, "unsupported")


def check_sat_many(formulas: Sequence[Pure], cfg: SolverConfig) -> list[str]:
    """Satisfiability of each formula in one solver process; ``unknown`` on failure."""
    if not formulas:
        return []
    try:
        return run_solver(emit_sat_script(formulas), cfg, expect=len(formulas))
    except SolverError:
        return ["unknown"] * len(formulas)


def bounded_eval(f: Pure, bound: int) -> bool:
    """Truth of closed ``f`` with every quantifier restricted to ``0..bound``."""
    return eval_pure(f, {}, bound)
