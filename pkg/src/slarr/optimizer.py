"""Entailment-level optimizations: frame elimination and succedent pruning.

Both are validity-preserving rewrites done before translation.  The frame
rule removes a spatial atom shared by the antecedent and every succedent,
recording its disjointness from the rest of the antecedent as a pure
formula.  Pruning drops succedents that no model of the antecedent can
satisfy, using a sound but incomplete Presburger encoding.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .backend import SolverConfig, check_sat_many
from .syntax import (
    EMP, TRUE, Arr, Diff, Emp, Entailment, Exists, PointsTo, Pure, Sigma,
    SpatialAtom, SymbolicHeap, Term, conj, disj, eq, free_vars, gt, le, lt, neq,
)

__all__ = ["disj_formula", "atom_well_formed", "well_formed", "size_term", "apply_frame_rule",
           "antecedent_unsat", "satisfiability_formula", "prune_formula", "prune_succedents",
           "prune_many", "PruneLog"]


def _pair_disjoint(a: SpatialAtom, b: SpatialAtom) -> Pure:
    if isinstance(a, Emp) or isinstance(b, Emp):
        return TRUE
    if isinstance(a, PointsTo) and isinstance(b, PointsTo):
        return neq(a.addr, b.addr)
    if isinstance(a, Arr) and isinstance(b, PointsTo):
        a, b = b, a
    if isinstance(a, PointsTo):
        return disj(lt(a.addr, b.lo), gt(a.addr, b.hi))
    return disj(lt(a.hi, b.lo), lt(b.hi, a.lo))


def disj_formula(atom: SpatialAtom, sigma: Sigma) -> Pure:
    """Cells used by ``atom`` and by ``sigma`` are disjoint."""
    if isinstance(atom, Emp):
        raise ValueError("Disj is only defined for points-to and array atoms")
    return conj(*(_pair_disjoint(atom, b) for b in sigma if not isinstance(b, Emp)))


def atom_well_formed(a: SpatialAtom) -> Pure:
    """Some heap satisfies ``a``: non-null start and, for arrays, ``lo <= hi``."""
    if isinstance(a, PointsTo):
        return lt(0, a.addr)
    if isinstance(a, Arr):
        return conj(lt(0, a.lo), le(a.lo, a.hi))
    return TRUE


def well_formed(sigma: Sigma) -> Pure:
    """Some heap satisfies ``sigma``, as a pure formula."""
    parts = [atom_well_formed(a) for a in sigma]
    for i, a in enumerate(sigma):
        for b in sigma[i + 1:]:
            parts.append(_pair_disjoint(a, b))
    return conj(*parts)


def size_term(sigma: Sigma) -> Term | Diff:
    """Number of cells used by ``sigma`` (meaningful when it is well formed)."""
    total: Term | Diff = Term()
    for a in sigma:
        if isinstance(a, PointsTo):
            total = total + 1
        elif isinstance(a, Arr):
            total = total + (a.hi - a.lo) + 1
    return total


# --------------------------------------------------------------------------
# Frame rule
# --------------------------------------------------------------------------

def _remove_first(sigma: Sigma, atom: SpatialAtom) -> Sigma:
    i = sigma.index(atom)
    rest = sigma[:i] + sigma[i + 1:]
    return rest if rest else (EMP,)


def apply_frame_rule(e: Entailment) -> tuple[Entailment, int]:
    """Strip atoms shared by the antecedent and all succedents.

    An antecedent atom is eligible when it occurs verbatim in every
    succedent and mentions no succedent-bound variable.  Removing it adds
    its well-formedness and its disjointness from the remaining antecedent
    atoms to the antecedent's pure part, which keeps the rewrite invertible.
    """
    removed = 0
    if not e.succedents:
        return e, 0
    bound = set().union(*(phi.ex_vars for phi in e.succedents))
    while True:
        ante = e.antecedent
        for i, atom in enumerate(ante.spatial):
            if isinstance(atom, Emp) or free_vars(atom) & bound:
                continue
            if all(atom in phi.spatial for phi in e.succedents):
                break
        else:
            return e, removed
        rest = ante.spatial[:i] + ante.spatial[i + 1:]
        pure = conj(ante.pure, atom_well_formed(atom), disj_formula(atom, rest))
        new_ante = replace(ante, pure=pure, spatial=rest if rest else (EMP,))
        succ = tuple(replace(phi, spatial=_remove_first(phi.spatial, atom)) for phi in e.succedents)
        e = Entailment(new_ante, succ)
        removed += 1


# --------------------------------------------------------------------------
# Unsatisfiability checks
# --------------------------------------------------------------------------

def satisfiability_formula(phi: SymbolicHeap) -> Pure:
    f = conj(phi.pure, well_formed(phi.spatial))
    return Exists(phi.ex_vars, f) if phi.ex_vars else f


def antecedent_unsat(phi: SymbolicHeap, cfg: SolverConfig) -> bool:
    """True when the solver proves ``phi`` has no model; ``unknown`` counts as False."""
    (ans,) = check_sat_many([satisfiability_formula(phi)], cfg)
    return ans == "unsat"


def prune_formula(ante: SymbolicHeap, phi: SymbolicHeap) -> Pure:
    """Necessary condition for a heap to satisfy both ``ante`` and ``phi``.

    Equal domains force equal cell counts, so requiring equal sizes on top of
    both sides' well-formedness never rules out a genuine joint model.
    """
    inner = conj(phi.pure, well_formed(phi.spatial), eq(size_term(ante.spatial), size_term(phi.spatial)))
    if phi.ex_vars:
        inner = Exists(phi.ex_vars, inner)
    return conj(ante.pure, well_formed(ante.spatial), inner)


@dataclass(frozen=True)
class PruneLog:
    dropped: tuple[tuple[int, Pure], ...] = ()
    antecedent_unsat: bool = False
    solver_calls: int = 0


def prune_succedents(e: Entailment, cfg: SolverConfig, check_antecedent: bool = False
                     ) -> tuple[Entailment, PruneLog]:
    """Drop succedents that cannot hold together with the antecedent.

    With ``check_antecedent`` the antecedent's satisfiability is asked in the
    same solver run; when it is unsatisfiable the entailment is returned
    unchanged and the log says so.
    """
    return prune_many([e], cfg, check_antecedent)[0]


def prune_many(es: list[Entailment], cfg: SolverConfig, check_antecedent: bool = False
               ) -> list[tuple[Entailment, PruneLog]]:
    """:func:`prune_succedents` for several entailments with one solver process."""
    queries: list[Pure] = []
    spans = []
    for e in es:
        start = len(queries)
        if check_antecedent:
            queries.append(satisfiability_formula(e.antecedent))
        queries.extend(prune_formula(e.antecedent, phi) for phi in e.succedents)
        spans.append((start, len(queries)))
    if not queries:
        return [(e, PruneLog()) for e in es]
    answers = check_sat_many(queries, cfg)
    calls = 1
    out = []
    for e, (lo, hi) in zip(es, spans):
        ans, qs = answers[lo:hi], queries[lo:hi]
        if check_antecedent:
            if ans[0] == "unsat":
                out.append((e, PruneLog(antecedent_unsat=True, solver_calls=calls)))
                calls = 0
                continue
            ans, qs = ans[1:], qs[1:]
        keep, dropped = [], []
        for i, (phi, q, a) in enumerate(zip(e.succedents, qs, ans)):
            if a == "unsat":
                dropped.append((i, q))
            else:
                keep.append(phi)
        out.append((Entailment(e.antecedent, tuple(keep)), PruneLog(tuple(dropped), False, calls)))
        calls = 0
    return out
