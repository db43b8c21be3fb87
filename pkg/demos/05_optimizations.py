"""The two optimizations: the frame rule (F) and succedent pruning (U).

Run with ``python demos/05_optimizations.py``.  Needs an SMT solver.
"""

import time

from slarr import RunOptions, SolverConfig, decide, parse_entailment
from slarr.optimizer import apply_frame_rule, prune_succedents
from slarr.sorted import decompose

cfg = SolverConfig()

# F removes atoms shared by the antecedent and every conclusion, and records
# that they were disjoint from the rest.
e = parse_entailment("w -> 1 * w + 1 -> 2 * w + 2 -> 3 * Arr(x, x + 1) |- "
                     "Ex u v. w -> 1 * w + 1 -> 2 * w + 2 -> 3 * x -> u * x + 1 -> v")
framed, n = apply_frame_rule(e)
print(f"removed {n} frames:\n  {framed}")

# U drops conclusions that cannot hold together with the antecedent.
se = decompose(parse_entailment("2 -> 20 * 1 -> 10 |- 1 -> 10 * 2 -> 20, 3 -> 30"))[1]
pruned, log = prune_succedents(se.as_entailment(), cfg)
print(f"\n{len(se.succedents)} succedents before pruning, {len(pruned.succedents)} after")

# The verdict never depends on the options; the running time does.
for u, f in ((True, True), (True, False)):
    t0 = time.perf_counter()
    v = decide(e, RunOptions(enable_u=u, enable_f=f, solver=cfg, deadline_s=20))
    print(f"U={u!s:5} F={f!s:5} {v.status.value:8} {time.perf_counter() - t0:6.2f}s "
          f"orderings={v.stats.permutations}")
