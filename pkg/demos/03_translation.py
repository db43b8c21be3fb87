"""Translating sorted entailments into Presburger formulas.

Run with ``python demos/03_translation.py``.  Uses the SMT solver for the
final check when one is installed.
"""

import shutil

from slarr import SolverConfig, parse_entailment, parse_heap
from slarr.backend import bounded_eval, decide_validity
from slarr.sorted import decompose
from slarr.syntax import TRUE
from slarr.translation import Obligation, build_validity_formula, check_condition, simplify, translate_p

# A ground obligation: two points-to cells against one array.
ob = Obligation(TRUE, parse_heap("3 -> 10 * 4 -> 11").spatial,
                ((TRUE, parse_heap("Arr(3, 4)").spatial),))
f, fresh = translate_p(ob)
print("P =", f)
print("simplified:", simplify(f))
print("ground, so it can be evaluated directly:", bounded_eval(f, 0))

# Array sizes in conclusions must not depend on the conclusion's binders.
for text in ("Arr(1, 5) |- Ex y z. Arr(y, y + 1) * Arr(z, z + 2)",
             "Arr(1, 5) |- Ex y. Arr(1, 1 + y) * Arr(2 + y, 5)"):
    print(f"\n{text}\n  condition: {check_condition(parse_entailment(text))}")

# The closed validity formula of the only sorted entailment of a small example.
e = parse_entailment("Arr(x, x) |- x -> 0, Ex y. y > 0 & x -> y")
(se,) = decompose(e)
trace = []
closed = build_validity_formula(se, simplify_leaves=True, trace=trace)
print("\nvalidity formula:", closed)
print("translation calls:", len(trace), "clauses used:", sorted({n.clauses[-1] for n in trace}))

if shutil.which(SolverConfig().executable):
    print("solver verdict:", decide_validity(closed, SolverConfig()))
