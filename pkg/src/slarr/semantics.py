"""Heap-model semantics and a bounded countermodel search.

Stores map variable names to naturals (absent names read as 0).  Heaps map
addresses >= 1 to naturals.  Quantifiers inside pure formulas, and the
existential prefix of a symbolic heap, are evaluated over ``0..quant_bound``,
so every answer about a quantified formula is exact only up to that bound.
The search in :func:`oracle_search` is therefore a refutation tool: a
countermodel it reports is genuine whenever the succedents' witnesses lie
within the bound, while ``None`` only says nothing was found.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterator, Mapping, Optional

from .syntax import (
    And, Arr, Diff, Emp, Entailment, Exists, FalseF, Forall, Implies, Not, Or,
    PointsTo, Pure, PureAtom, Sigma, SymbolicHeap, Term, TrueF, free_vars,
)

Store = Mapping[str, int]
Heap = Mapping[int, int]

DEFAULT_QUANT_BOUND = 8


@dataclass(frozen=True)
class Countermodel:
    store: dict
    heap: dict

    def __str__(self) -> str:
        s = ", ".join(f"{k}={v}" for k, v in sorted(self.store.items()))
        h = ", ".join(f"{a}:{v}" for a, v in sorted(self.heap.items()))
        return f"store {{{s}}} heap {{{h}}}"


# --------------------------------------------------------------------------
# Pure formulas: compiled to Python closures, the oracle evaluates them a lot
# --------------------------------------------------------------------------

def _term_src(t: Term | Diff) -> str:
    if isinstance(t, Diff):
        return f"(({_term_src(t.pos)}) - ({_term_src(t.neg)}))"
    parts = [str(t.const)] + [f"{c}*s.get({v!r}, 0)" for v, c in t.coeffs]
    return " + ".join(parts)


_OPS = {"eq": "==", "neq": "!=", "lt": "<", "le": "<="}


def _pure_src(f: Pure, bound_name: str) -> str:
    if isinstance(f, TrueF):
        return "True"
    if isinstance(f, FalseF):
        return "False"
    if isinstance(f, PureAtom):
        return f"({_term_src(f.lhs)} {_OPS[f.rel]} {_term_src(f.rhs)})"
    if isinstance(f, And):
        return "(" + " and ".join(_pure_src(a, bound_name) for a in f.args) + ")"
    if isinstance(f, Or):
        return "(" + " or ".join(_pure_src(a, bound_name) for a in f.args) + ")"
    if isinstance(f, Not):
        return f"(not {_pure_src(f.arg, bound_name)})"
    if isinstance(f, Implies):
        return f"((not {_pure_src(f.lhs, bound_name)}) or {_pure_src(f.rhs, bound_name)})"
    if isinstance(f, (Exists, Forall)):
        if not f.vars:
            return _pure_src(f.body, bound_name)
        q = "any" if isinstance(f, Exists) else "all"
        names = ", ".join(f"_v{i}" for i in range(len(f.vars)))
        upd = ", ".join(f"{v!r}: _v{i}" for i, v in enumerate(f.vars))
        body = _pure_src(f.body, bound_name)
        return (f"{q}((lambda s: {body})({{**s, {upd}}}) "
                f"for ({names},) in _product(range({bound_name} + 1), repeat={len(f.vars)}))")
    raise TypeError(f"not a pure formula: {f!r}")


@lru_cache(maxsize=4096)
def compile_pure(f: Pure) -> Callable[[Store, int], bool]:
    """Compile ``f`` to ``fn(store, bound) -> bool``."""
    src = f"lambda s, _B: {_pure_src(f, '_B')}"
    return eval(src, {"_product": itertools.product})  # noqa: S307 - generated from our own AST


def eval_pure(f: Pure, store: Store, bound: int = DEFAULT_QUANT_BOUND) -> bool:
    return compile_pure(f)(store, bound)


# --------------------------------------------------------------------------
# Spatial formulas
# --------------------------------------------------------------------------

def dom_of(s: Store, sigma: Sigma) -> Optional[frozenset[int]]:
    """Addresses used by ``sigma`` under ``s``; ``None`` if some array range is empty."""
    out: set[int] = set()
    for a in sigma:
        if isinstance(a, PointsTo):
            out.add(a.addr.evaluate(s))
        elif isinstance(a, Arr):
            lo, hi = a.lo.evaluate(s), a.hi.evaluate(s)
            if lo > hi:
                return None
            out.update(range(lo, hi + 1))
    return frozenset(out)


def layout(s: Store, sigma: Sigma) -> Optional[tuple[frozenset[int], dict[int, int]]]:
    """Domain and forced cell values of the unique heap shape ``sigma`` allows.

    Returns ``None`` when no heap satisfies ``sigma`` under ``s``: an empty
    array range, overlapping atoms, or the null address in use.
    """
    dom: set[int] = set()
    forced: dict[int, int] = {}
    for a in sigma:
        if isinstance(a, Emp):
            continue
        if isinstance(a, PointsTo):
            cells = (a.addr.evaluate(s),)
            forced[cells[0]] = a.val.evaluate(s)
        else:
            lo, hi = a.lo.evaluate(s), a.hi.evaluate(s)
            if lo > hi:
                return None
            cells = range(lo, hi + 1)
        for c in cells:
            if c < 1 or c in dom:
                return None
            dom.add(c)
    return frozenset(dom), forced


def sat_spatial(s: Store, h: Heap, sigma: Sigma) -> bool:
    # Every atom fixes its own domain from the store, so the split of h is forced.
    lay = layout(s, sigma)
    if lay is None:
        return False
    dom, forced = lay
    if set(h) != dom:
        return False
    return all(h[a] == v for a, v in forced.items())


def _assignments(names: tuple[str, ...], bound: int) -> Iterator[dict[str, int]]:
    for vals in itertools.product(range(bound + 1), repeat=len(names)):
        yield dict(zip(names, vals))


def sat_qf(s: Store, h: Heap, phi: SymbolicHeap, quant_bound: int = DEFAULT_QUANT_BOUND) -> bool:
    """``s, h |= phi`` with quantifiers bounded by ``quant_bound``."""
    pure = compile_pure(phi.pure)
    for ys in _assignments(phi.ex_vars, quant_bound):
        s2 = {**s, **ys} if ys else s
        if pure(s2, quant_bound) and sat_spatial(s2, h, phi.spatial):
            return True
    return False


def entailment_holds_at(e: Entailment, s: Store, h: Heap, quant_bound: int = DEFAULT_QUANT_BOUND) -> bool:
    """True unless ``(s, h)`` satisfies the antecedent and falsifies every succedent."""
    if not sat_qf(s, h, e.antecedent, quant_bound):
        return True
    return any(sat_qf(s, h, phi, quant_bound) for phi in e.succedents)


# --------------------------------------------------------------------------
# Bounded countermodel search
# --------------------------------------------------------------------------

def _stores(names: list[str], bound: int) -> Iterator[dict[str, int]]:
    for vals in itertools.product(range(bound + 1), repeat=len(names)):
        yield dict(zip(names, vals))


def _requirements(s: Store, dom: frozenset[int], fixed: dict[int, int], phi: SymbolicHeap,
                  value_bound: int, quant_bound: int) -> Optional[set[frozenset]]:
    """Partial cell assignments under which ``phi`` holds at ``s``.

    Each requirement maps free (array) cells of the antecedent heap to the
    value ``phi`` needs there.  ``None`` means ``phi`` holds for every heap.
    """
    pure = compile_pure(phi.pure)
    reqs: set[frozenset] = set()
    for ys in _assignments(phi.ex_vars, quant_bound):
        s2 = {**s, **ys} if ys else s
        if not pure(s2, quant_bound):
            continue
        lay = layout(s2, phi.spatial)
        if lay is None or lay[0] != dom:
            continue
        need = {}
        for a, v in lay[1].items():
            if a in fixed:
                if fixed[a] != v:
                    break
            elif v > value_bound:
                break
            else:
                need[a] = v
        else:
            if not need:
                return None
            reqs.add(frozenset(need.items()))
    return reqs


def _avoid_all(cells: list[int], reqs: list[dict[int, int]], value_bound: int) -> Optional[dict[int, int]]:
    """Lexicographically first assignment of ``cells`` matching no requirement."""
    last_cell = {}
    order = {c: i for i, c in enumerate(cells)}
    for k, r in enumerate(reqs):
        last_cell[k] = max(r, key=order.__getitem__)
    by_last: dict[int, list[int]] = {}
    for k, c in last_cell.items():
        by_last.setdefault(c, []).append(k)

    assign: dict[int, int] = {}

    def matched(k: int) -> bool:
        return all(assign[c] == v for c, v in reqs[k].items())

    def go(i: int) -> bool:
        if i == len(cells):
            return True
        c = cells[i]
        for v in range(value_bound + 1):
            assign[c] = v
            if any(matched(k) for k in by_last.get(c, ())):
                continue
            if go(i + 1):
                return True
        del assign[c]
        return False

    return dict(assign) if go(0) else None


def _heap_bound(qb: int, dom: frozenset[int], fixed: dict[int, int]) -> int:
    return max(qb, max(dom, default=0), max(fixed.values(), default=0))


def oracle_search(e: Entailment, store_bound: int, value_bound: int,
                  quant_bound: Optional[int] = None) -> Optional[Countermodel]:
    """First ``(store, heap)`` within the bounds that refutes ``e``, or ``None``.

    Stores range over ``0..store_bound`` on the free variables of ``e`` in
    lexicographic order; for each, heaps over the antecedent's domain with
    array cells ranging over ``0..value_bound``, also lexicographically.
    Succedents are checked with quantifiers bounded by ``quant_bound``, by
    default the largest of the two bounds and of the addresses and fixed
    values of the heap at hand, so witnesses that name heap cells are
    always in range.
    """
    if store_bound < 1 or value_bound < 1:
        raise ValueError("bounds must be >= 1")
    qb = max(store_bound, value_bound) if quant_bound is None else quant_bound
    names = sorted(free_vars(e))
    ante = e.antecedent
    ante_pure = compile_pure(ante.pure)
    for s in _stores(names, store_bound):
        if not ante_pure(s, qb):
            continue
        lay = layout(s, ante.spatial)
        if lay is None:
            continue
        dom, fixed = lay
        qbs = qb if quant_bound is not None else _heap_bound(qb, dom, fixed)
        reqs: set[frozenset] = set()
        covered = False
        for phi in e.succedents:
            r = _requirements(s, dom, fixed, phi, value_bound, qbs)
            if r is None:
                covered = True
                break
            reqs |= r
        if covered:
            continue
        free_cells = sorted(dom - fixed.keys())
        found = _avoid_all(free_cells, [dict(r) for r in sorted(reqs, key=sorted)], value_bound)
        if found is not None:
            return Countermodel(dict(s), {**fixed, **found})
    return None


def oracle_search_naive(e: Entailment, store_bound: int, value_bound: int,
                        quant_bound: Optional[int] = None) -> Optional[Countermodel]:
    """Literal enumeration of stores and heaps; slow, used to check :func:`oracle_search`."""
    qb = max(store_bound, value_bound) if quant_bound is None else quant_bound
    names = sorted(free_vars(e))
    for s in _stores(names, store_bound):
        if not eval_pure(e.antecedent.pure, s, qb):
            continue
        lay = layout(s, e.antecedent.spatial)
        if lay is None:
            continue
        dom, fixed = lay
        qbs = qb if quant_bound is not None else _heap_bound(qb, dom, fixed)
        free_cells = sorted(dom - fixed.keys())
        for vals in itertools.product(range(value_bound + 1), repeat=len(free_cells)):
            h = {**fixed, **dict(zip(free_cells, vals))}
            if not entailment_holds_at(e, s, h, qbs):
                return Countermodel(dict(s), h)
    return None


def has_model(phi: SymbolicHeap, store_bound: int, quant_bound: Optional[int] = None) -> bool:
    """Whether some store within ``store_bound`` admits a heap satisfying ``phi``."""
    qb = store_bound if quant_bound is None else quant_bound
    names = sorted(free_vars(phi) | set(phi.ex_vars))
    pure = compile_pure(phi.pure)
    return any(pure(s, qb) and layout(s, phi.spatial) is not None for s in _stores(names, store_bound))
