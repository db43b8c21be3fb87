"""Sorted symbolic heaps and the decomposition of an entailment into sorted ones.

A heap is sorted for a spatial list when its addresses increase along the
list.  ``sorted_formula`` states that as a pure formula; ``decompose`` turns
one entailment into one sorted entailment per ordering of the antecedent.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace
from typing import Iterator

from .syntax import (
    TRUE, Arr, Emp, Entailment, PointsTo, Pure, Sigma, SymbolicHeap, conj, le,
    lt, permutations,
)

__all__ = ["lt_sigma", "sorted_prime", "sorted_formula", "tilde", "SortedEntailment",
           "decompose", "iter_decompose"]


def lt_sigma(t, sigma: Sigma) -> Pure:
    """``t < sigma``: ``t`` lies below the first address of ``sigma``."""
    for a in sigma:
        if isinstance(a, Emp):
            continue
        if isinstance(a, PointsTo):
            return lt(t, a.addr)
        return lt(t, a.lo)
    return TRUE


def sorted_prime(sigma: Sigma) -> Pure:
    if not sigma:
        return TRUE
    head, rest = sigma[0], sigma[1:]
    if isinstance(head, Emp):
        return sorted_prime(rest)
    if isinstance(head, PointsTo):
        return conj(lt_sigma(head.addr, rest), sorted_prime(rest))
    assert isinstance(head, Arr)
    return conj(le(head.lo, head.hi), lt_sigma(head.hi, rest), sorted_prime(rest))


def sorted_formula(sigma: Sigma) -> Pure:
    return conj(lt_sigma(0, sigma), sorted_prime(sigma))


def tilde(phi: SymbolicHeap) -> SymbolicHeap:
    """``phi`` with ``Sorted`` of its spatial part conjoined to its pure part."""
    return replace(phi, pure=conj(phi.pure, sorted_formula(phi.spatial)))


@dataclass(frozen=True)
class SortedEntailment:
    """One member of a decomposition.

    ``perm`` is the ordering of the original antecedent atoms, which also
    serves as the identifier of this sorted entailment.
    """

    antecedent: SymbolicHeap
    succedents: tuple[SymbolicHeap, ...]
    perm: tuple[int, ...] = ()
    # pure part of the antecedent before the Sorted conjunct was added
    base_pure: Pure = TRUE

    def as_entailment(self) -> Entailment:
        return Entailment(self.antecedent, self.succedents)

    def __str__(self) -> str:
        return str(self.as_entailment())


def _sorted_succedents(e: Entailment) -> tuple[SymbolicHeap, ...]:
    return tuple(tilde(p) for phi in e.succedents for p in permutations(phi))


def iter_decompose(e: Entailment) -> Iterator[SortedEntailment]:
    """Lazy version of :func:`decompose`."""
    succ = _sorted_succedents(e)
    ante = e.antecedent
    for idx in itertools.permutations(range(len(ante.spatial))):
        a = replace(ante, spatial=tuple(ante.spatial[i] for i in idx))
        yield SortedEntailment(tilde(a), succ, idx, ante.pure)


def decompose(e: Entailment) -> list[SortedEntailment]:
    """Sorted entailments whose joint validity is equivalent to ``e``'s."""
    return list(iter_decompose(e))
