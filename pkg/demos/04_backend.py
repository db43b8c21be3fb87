"""SMT-LIB emission and the external solver.

Run with ``python demos/04_backend.py``.  Needs ``z3`` on the PATH, or
another SMT-LIB solver named by ``SLARR_SOLVER``.
"""

from slarr import SolverConfig
from slarr.backend import decide_validity, emit_smtlib
from slarr.syntax import Exists, Forall, eq, var

x, y = var("x"), var("y")

# Every variable ranges over the naturals; the script asks for a
# counterexample, so "unsat" means valid.
succ = Forall(("x",), Exists(("y",), eq(y, x + 1)))
pred = Forall(("x",), Exists(("y",), eq(y + 1, x)))
print(emit_smtlib(pred))

cfg = SolverConfig(timeout_ms=10_000)
print("every natural has a successor:  ", decide_validity(succ, cfg))
print("every natural has a predecessor:", decide_validity(pred, cfg))
print("with a 1 ms budget:             ", decide_validity(succ, SolverConfig(timeout_ms=1)))
