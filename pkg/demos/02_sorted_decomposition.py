"""Splitting an entailment into sorted entailments, one per antecedent ordering.

Run with ``python demos/02_sorted_decomposition.py``.
"""

from slarr import parse_entailment
from slarr.sorted import decompose, sorted_formula

e = parse_entailment("2 -> 20 * 1 -> 10 |- 1 -> 10 * 2 -> 20, 3 -> 30")
print("entailment:", e)

# Sorted(sigma) says the atoms of sigma lie at increasing addresses.
print("Sorted(3 -> 10 * 4 -> 11) =",
      sorted_formula(parse_entailment("3 -> 10 * 4 -> 11 |- emp").antecedent.spatial))

# Each sorted entailment fixes the order of the antecedent; every ordering of
# every conclusion appears as a separate succedent.
for se in decompose(e):
    print(f"\nordering {se.perm}:")
    print("  antecedent:", se.antecedent)
    for phi in se.succedents:
        print("  succedent: ", phi)
