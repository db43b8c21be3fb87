"""Entailments, their heap semantics and the bounded countermodel search.

Run with ``python demos/01_heaps_and_oracle.py``.
"""

from slarr import parse_entailment, parse_heap
from slarr.semantics import dom_of, oracle_search, sat_qf

# A symbolic heap: optional binders, a pure part and *-separated atoms.
phi = parse_heap("Ex y. y > 0 & x -> y")
print("heap:", phi)

# Satisfaction is checked on a concrete store and heap.
print("x=1, heap {1:7} satisfies it:", sat_qf({"x": 1}, {1: 7}, phi))
print("x=1, heap {1:0} satisfies it:", sat_qf({"x": 1}, {1: 0}, phi))

# Arrays occupy a contiguous range of cells.
arr = parse_heap("Arr(x, x + 2)")
print("cells of", arr, "at x=2:", sorted(dom_of({"x": 2}, arr.spatial)))

# An entailment holds when every model of the left side satisfies some right side.
e = parse_entailment("Arr(x, x) |- x -> 0, Ex y. y > 0 & x -> y")
print("\nentailment:", e)
print("countermodel within bounds (3, 3):", oracle_search(e, 3, 3))

# A broken one: the oracle returns the first refuting store and heap.
bad = parse_entailment("Arr(1, 2) |- 1 -> 0 * Arr(2, 2)")
print("\nentailment:", bad)
print("countermodel within bounds (2, 2):", oracle_search(bad, 2, 2))
