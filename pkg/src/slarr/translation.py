"""Translation of sorted entailments into Presburger formulas.

``translate_p(ob, fresh)`` unfolds the recursive translation on an
:class:`Obligation` ``(pi, left, rights)``.  Clauses are tried in a fixed
priority order:

=========  ==============================================================
EmpL       drop a leading ``emp`` on the left
EmpR       drop a leading ``emp`` in a right pair
EmpNEmp    left is ``emp``: drop right pairs whose spatial part is not
EmpEmp     everything is ``emp``: ``pi -> OR pi_i``
NEmpEmp    left is not ``emp``: drop right pairs whose spatial part is
empty      no right pairs left: ``~(pi & Sorted(left))``
PtoPto     every head is a points-to: consume them all
PtoArr     left head points-to, some right head an array: 3-way split
ArrPto     left head array, some right head points-to: unfold one cell
ArrArr     every head an array: cut all of them at the shortest one
=========  ==============================================================

The leading-``emp`` clauses run eagerly at the top of every call.  Where a
clause leaves the choice of right pair open, the lowest index is used.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from typing import Optional

from .sorted import SortedEntailment, lt_sigma, sorted_formula
from .syntax import (
    FALSE, TRUE, And, Arr, Emp, Entailment, Exists, FalseF, Forall,
    Implies, Not, Or, PointsTo, Pure, PureAtom, Sigma, Term, TrueF, all_vars,
    conj, disj, eq, free_vars, gt, le, lt, star_count, var,
)

__all__ = [
    "Obligation", "FreshSupply", "ConditionReport", "ConditionViolationError",
    "TranslationError", "TranslationTimeout", "TraceNode", "check_condition", "translate_p",
    "build_validity_formula", "simplify", "measure",
]

Rights = tuple[tuple[Pure, Sigma], ...]


class TranslationError(RuntimeError):
    """Internal fault: the termination measure went up where it must not."""


class TranslationTimeout(RuntimeError):
    pass


class ConditionViolationError(ValueError):
    def __init__(self, report: "ConditionReport"):
        super().__init__(f"array sizes depend on existential variables: {report}")
        self.report = report


@dataclass(frozen=True)
class Obligation:
    pure: Pure
    left: Sigma
    rights: Rights

    def __str__(self) -> str:
        from .syntax import sigma_str
        rs = ", ".join(f"({p}, {sigma_str(s)})" for p, s in self.rights)
        return f"P({self.pure}, {sigma_str(self.left)}, {{{rs}}})"


@dataclass
class FreshSupply:
    """Deterministic source of variable names unused in the current problem."""

    prefix: str = "z$"
    avoid: frozenset[str] = frozenset()
    counter: int = 0
    drawn: list[str] = field(default_factory=list)

    def draw(self) -> str:
        while True:
            name = f"{self.prefix}{self.counter}"
            self.counter += 1
            if name not in self.avoid:
                self.drawn.append(name)
                return name


@dataclass(frozen=True)
class ConditionReport:
    ok: bool
    # (succedent index, offending array atom, existential variables in its size)
    violations: tuple[tuple[int, Arr, tuple[str, ...]], ...] = ()

    def __str__(self) -> str:
        if self.ok:
            return "ok"
        return "; ".join(f"succedent {i}: {a} has size depending on {', '.join(vs)}"
                         for i, a, vs in self.violations)


def check_condition(e: Entailment) -> ConditionReport:
    """Check that no succedent array size ``hi - lo`` mentions that succedent's
    existential variables.  The test is done on the linear normal form, so
    ``Arr(y, y + 2)`` passes (its size is the constant 2)."""
    bad = []
    for i, phi in enumerate(e.succedents):
        ys = set(phi.ex_vars)
        for a in phi.spatial:
            if not isinstance(a, Arr):
                continue
            hit = tuple(sorted(y for y in ys if a.hi.coefficient(y) != a.lo.coefficient(y)))
            if hit:
                bad.append((i, a, hit))
    return ConditionReport(not bad, tuple(bad))


def measure(left: Sigma, rights: Rights) -> tuple[int, int]:
    return (star_count(left) + sum(star_count(s) for _, s in rights), len(rights))


@dataclass
class TraceNode:
    """One call of the translation, for instrumentation."""

    id: int
    parent: Optional[int]
    depth: int
    clauses: tuple[str, ...]
    measure: tuple[int, int]
    atoms: int


def _strip(sigma: Sigma) -> Sigma:
    i = 0
    while i < len(sigma) and isinstance(sigma[i], Emp):
        i += 1
    return sigma[i:]


def _ground_false(f: Pure) -> bool:
    if isinstance(f, FalseF):
        return True
    if isinstance(f, PureAtom):
        return _cancel(f) == FALSE
    if isinstance(f, And):
        return any(_ground_false(a) for a in f.args)
    return False


def _difference_edges(a: PureAtom) -> Optional[list[tuple[str, str, int]]]:
    """``a`` as constraints ``u - v <= w``, or None when it is not of that shape."""
    c = _cancel(a)
    if not isinstance(c, PureAtom) or c.rel == "neq":
        return None
    sides = []
    for t in (c.lhs, c.rhs):
        if len(t.coeffs) > 1 or (t.coeffs and t.coeffs[0][1] != 1):
            return None
        sides.append((t.coeffs[0][0] if t.coeffs else "", t.const))
    (u, cu), (v, cv) = sides
    # u + cu R v + cv  gives  u - v <= cv - cu (minus one when strict)
    w = cv - cu - (1 if c.rel == "lt" else 0)
    edges = [(u, v, w)]
    if c.rel == "eq":
        edges.append((v, u, cu - cv))
    return edges


def difference_unsat(atoms) -> bool:
    """Sound, incomplete unsatisfiability test over the naturals.

    Atoms of the form ``x + c R y + d`` become difference constraints; the
    rest are ignored.  A negative cycle means the conjunction has no model.
    """
    edges: list[tuple[str, str, int]] = []
    nodes = {""}
    for a in atoms:
        if not isinstance(a, PureAtom):
            continue
        es = _difference_edges(a)
        if es is None:
            continue
        for u, v, w in es:
            nodes.update((u, v))
            edges.append((u, v, w))
    if not edges:
        return False
    # x >= 0, with "" standing for the constant 0
    edges += [("", x, 0) for x in nodes if x]
    dist = {x: 0 for x in nodes}
    for _ in range(len(nodes)):
        changed = False
        for u, v, w in edges:
            # u - v <= w is the edge v -> u
            if dist[v] + w < dist[u]:
                dist[u] = dist[v] + w
                changed = True
        if not changed:
            return False
    return True


@dataclass(frozen=True)
class _Tail:
    """The rest of a call: ``before & run(*args) & after``."""

    before: tuple
    args: tuple
    after: tuple


class _Translator:
    def __init__(self, fresh: FreshSupply, trace: Optional[list], prune_dead: bool, simp: bool,
                 deadline: Optional[float] = None):
        self.fresh = fresh
        self.deadline = deadline
        self.trace = trace
        self.prune_dead = prune_dead
        self.simp = simp
        self.calls = 0
        self.closing: dict[int, bool] = {}
        self.checkpoint: dict[int, int] = {}

    def _leaf(self, f: Pure) -> Pure:
        return simplify(f) if self.simp else f

    def run(self, pi: Pure, left: Sigma, rights: Rights, parent=None, depth=0,
            dead: bool = False) -> Pure:
        # A call with a single live child continues in this loop instead of
        # recursing, so long chains do not exhaust the Python stack.
        wrappers = []
        args = (pi, left, rights, parent, depth, dead)
        while True:
            res = self._step(*args)
            if not isinstance(res, _Tail):
                break
            wrappers.append((res.before, res.after))
            args = res.args
        for before, after in reversed(wrappers):
            res = conj(*before, res, *after) if (before or after) else res
        return res

    def _fan(self, branches) -> "Pure | _Tail":
        """Translate sibling calls given lazily as ``run`` argument tuples.

        Dead siblings are recorded on the spot.  When exactly one sibling is
        live it is handed back as a tail call.
        """
        done: list[Pure] = []
        held = None  # (position in done, args) of the only live sibling so far
        for b in branches:
            if self.prune_dead and b[5]:
                done.append(self.run(*b))
                continue
            if held is None:
                held = (len(done), b)
            elif held is False:
                done.append(self.run(*b))
            else:
                pos, args = held
                done.insert(pos, self.run(*args))
                done.append(self.run(*b))
                held = False
        if held:
            pos, args = held
            return _Tail(tuple(done[:pos]), args, tuple(done[pos:]))
        return conj(*done)

    def _step(self, pi: Pure, left: Sigma, rights: Rights, parent, depth, dead) -> "Pure | _Tail":
        node_id = self.calls
        self.calls += 1
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise TranslationTimeout(f"gave up after {node_id} calls")
        clauses: list[str] = []
        entry = measure(left, rights)

        if self.prune_dead and dead:
            self._record(node_id, parent, depth, ("dead",), entry, left, rights)
            return TRUE

        stripped = _strip(left)
        if stripped != left:
            clauses.append("EmpL")
            left = stripped
        new_rights = tuple((p, _strip(s)) for p, s in rights)
        if new_rights != rights:
            clauses.append("EmpR")
            rights = new_rights

        # Between two consuming clauses the atom count may grow, but each
        # consuming clause must leave fewer atoms than the previous one saw.
        size = len(left) + sum(len(s) for _, s in rights)
        if parent is None:
            self.checkpoint[node_id] = size
        elif self.closing.get(parent, False):
            if size >= self.checkpoint[parent]:
                raise TranslationError(
                    f"atom count {size} did not drop below {self.checkpoint[parent]} at call {node_id}")
            self.checkpoint[node_id] = size
        else:
            self.checkpoint[node_id] = self.checkpoint[parent]
        if not left:
            if any(s for _, s in rights):
                clauses.append("EmpNEmp")
                rights = tuple((p, s) for p, s in rights if not s)
            if rights:
                clauses.append("EmpEmp")
                self._record(node_id, parent, depth, clauses, entry, left, rights)
                return self._leaf(Implies(pi, disj(*(p for p, _ in rights))))
            clauses.append("empty")
            self._record(node_id, parent, depth, clauses, entry, left, rights)
            return self._leaf(Not(conj(pi, sorted_formula(left))))

        if any(not s for _, s in rights):
            clauses.append("NEmpEmp")
            rights = tuple((p, s) for p, s in rights if s)
        if not rights:
            clauses.append("empty")
            self._record(node_id, parent, depth, clauses, entry, left, rights)
            return self._leaf(Not(conj(pi, sorted_formula(left))))

        head = left[0]
        heads = [s[0] for _, s in rights]
        if isinstance(head, PointsTo):
            if all(isinstance(h, PointsTo) for h in heads):
                clauses.append("PtoPto")
                rec = self._pto_pto
            else:
                clauses.append("PtoArr")
                rec = self._pto_arr
        elif any(isinstance(h, PointsTo) for h in heads):
            clauses.append("ArrPto")
            rec = self._arr_pto
        else:
            clauses.append("ArrArr")
            rec = self._arr_arr
        self._record(node_id, parent, depth, clauses, entry, left, rights)
        self.closing[node_id] = clauses[-1] in ("PtoPto", "ArrArr")
        return rec(pi, left, rights, node_id, depth + 1)

    def _record(self, node_id, parent, depth, clauses, entry, left, rights):
        if self.trace is not None:
            atoms = len(left) + sum(len(s) for _, s in rights)
            self.trace.append(TraceNode(node_id, parent, depth, tuple(clauses),
                                        measure(left, rights), atoms))

    def _branch(self, pi: Pure, *conds: Pure) -> tuple[Pure, bool]:
        new_pi = conj(pi, *conds)
        if not self.prune_dead:
            return new_pi, False
        if any(_ground_false(c) for c in conds):
            return new_pi, True
        return new_pi, difference_unsat(new_pi.args if isinstance(new_pi, And) else (new_pi,))

    # -- clauses -----------------------------------------------------------

    def _pto_pto(self, pi, left, rights, nid, depth):
        head = left[0]
        t, u = head.addr, head.val
        rest = left[1:]
        new_pi, dead = self._branch(pi, lt_sigma(t, rest))
        new_rights = []
        for p, s in rights:
            h = s[0]
            new_rights.append((conj(p, eq(t, h.addr), eq(u, h.val), lt_sigma(h.addr, s[1:])), s[1:]))
        return _Tail((), (new_pi, rest, tuple(new_rights), nid, depth, dead), ())

    def _pto_arr(self, pi, left, rights, nid, depth):
        u = left[0].val
        i = next(k for k, (_, s) in enumerate(rights) if isinstance(s[0], Arr))
        p_i, s_i = rights[i]
        a = s_i[0]
        ti, ti2 = a.lo, a.hi
        before, after = rights[:i], rights[i + 1:]
        one = before + ((p_i, (PointsTo(ti, u),) + s_i[1:]),) + after
        more = before + ((p_i, (PointsTo(ti, u), Arr(ti + 1, ti2)) + s_i[1:]),) + after
        def branches():
            for cond, rs in ((eq(ti2, ti), one), (gt(ti2, ti), more), (lt(ti2, ti), before + after)):
                new_pi, dead = self._branch(pi, cond)
                yield new_pi, left, rs, nid, depth, dead
        return self._fan(branches())

    def _arr_pto(self, pi, left, rights, nid, depth):
        a = left[0]
        t, t2 = a.lo, a.hi
        z, z2 = self.fresh.draw(), self.fresh.draw()
        pi1, dead1 = self._branch(pi, gt(t2, t))
        pi2, dead2 = self._branch(pi, eq(t2, t))
        return self._fan([(pi1, (PointsTo(t, var(z)), Arr(t + 1, t2)) + left[1:], rights, nid, depth, dead1),
                          (pi2, (PointsTo(t, var(z2)),) + left[1:], rights, nid, depth, dead2)])

    def _arr_arr(self, pi, left, rights, nid, depth):
        a = left[0]
        t, t2 = a.lo, a.hi
        rest = left[1:]
        m = t2 - t
        heads = [s[0] for _, s in rights]
        ms = [h.hi - h.lo for h in heads]
        n = len(rights)

        def branches():
            for subset in _subsets(n):
                inside = set(subset)
                conds = [eq(m, ms[j]) for j in subset]
                conds += [lt(m, ms[k]) for k in range(n) if k not in inside]
                conds += [le(t, t2), lt_sigma(t2, rest)]
                new_pi, dead = self._branch(pi, *conds)
                yield new_pi, rest, self._cut(rights, heads, inside, m), nid, depth, dead
            for subset in _subsets(n):
                if not subset:
                    continue
                inside = set(subset)
                m1 = ms[subset[0]]
                conds = [lt(m1, m)] + [eq(m1, ms[j]) for j in subset]
                conds += [lt(m1, ms[k]) for k in range(n) if k not in inside]
                new_pi, dead = self._branch(pi, *conds)
                new_left = (Arr(t + m1 + 1, t2),) + rest
                yield new_pi, new_left, self._cut(rights, heads, inside, m1), nid, depth, dead
        return self._fan(branches())

    @staticmethod
    def _cut(rights, heads, inside, m) -> Rights:
        out = []
        for k, ((p, s), h) in enumerate(zip(rights, heads)):
            if k in inside:
                out.append((conj(p, lt_sigma(h.lo + m, s[1:])), s[1:]))
            else:
                out.append((p, (Arr(h.lo + m + 1, h.hi),) + s[1:]))
        return tuple(out)


def _subsets(n: int):
    """Subsets of ``range(n)`` by size, then lexicographically."""
    for k in range(n + 1):
        yield from itertools.combinations(range(n), k)


def translate_p(ob: Obligation, fresh: Optional[FreshSupply] = None, *, trace: Optional[list] = None,
                prune_dead: bool = True, simplify_leaves: bool = False,
                deadline: Optional[float] = None) -> tuple[Pure, list[str]]:
    """Translate ``ob`` and return the formula with the fresh variables drawn.

    With ``prune_dead`` a branch whose accumulated left pure part is found
    unsatisfiable (a conjunct false after cancellation, or a negative cycle
    among its difference constraints) is replaced by ``true``.  Every leaf of
    that branch has the pure part as antecedent, so nothing changes
    logically.
    """
    if fresh is None:
        fresh = FreshSupply(avoid=all_vars(ob.pure) | all_vars(tuple(p for p, _ in ob.rights))
                            | _sigma_vars(ob.left) | frozenset().union(*(_sigma_vars(s) for _, s in ob.rights)))
    start = len(fresh.drawn)
    tr = _Translator(fresh, trace, prune_dead, simplify_leaves, deadline)
    _, dead = tr._branch(TRUE, ob.pure)
    f = tr.run(ob.pure, ob.left, ob.rights, dead=dead)
    if simplify_leaves:
        f = simplify(f)
    return f, list(fresh.drawn[start:])


def _sigma_vars(sigma: Sigma) -> frozenset[str]:
    return free_vars(sigma)


def build_validity_formula(se: SortedEntailment, *, fresh_prefix: str = "z$", check: bool = True,
                           simplify_leaves: bool = False, trace: Optional[list] = None,
                           prune_dead: bool = True, deadline: Optional[float] = None) -> Pure:
    """Closed formula ``All x z. Ex y. P(...)`` valid iff ``se`` is valid.

    ``x`` are the free variables of the entailment, ``z`` the fresh variables
    drawn during the translation and ``y`` the succedents' existential
    variables in succedent order.  All quantifiers range over naturals.
    The antecedent keeps its ``Sorted`` conjunct.
    """
    e = se.as_entailment()
    if check:
        report = check_condition(e)
        if not report.ok:
            raise ConditionViolationError(report)
    ob = Obligation(se.antecedent.pure, se.antecedent.spatial,
                    tuple((phi.pure, phi.spatial) for phi in se.succedents))
    fresh = FreshSupply(prefix=fresh_prefix, avoid=all_vars(e))
    body, zs = translate_p(ob, fresh, trace=trace, prune_dead=prune_dead,
                           simplify_leaves=simplify_leaves, deadline=deadline)
    ys: list[str] = []
    for phi in se.succedents:
        ys.extend(y for y in phi.ex_vars if y not in ys)
    xs = sorted(free_vars(e))
    inner = Exists(tuple(ys), body) if ys else body
    return Forall(tuple(xs) + tuple(zs), inner) if (xs or zs) else inner


# --------------------------------------------------------------------------
# Light simplifier
# --------------------------------------------------------------------------

def _cancel(a: PureAtom) -> Pure:
    lhs, rhs = a.lhs, a.rhs
    assert isinstance(lhs, Term) and isinstance(rhs, Term)
    lc, rc = dict(lhs.coeffs), dict(rhs.coeffs)
    for v in set(lc) & set(rc):
        k = min(lc[v], rc[v])
        lc[v] -= k
        rc[v] -= k
    k = min(lhs.const, rhs.const)
    lhs = Term(lhs.const - k, tuple(sorted((v, c) for v, c in lc.items() if c)))
    rhs = Term(rhs.const - k, tuple(sorted((v, c) for v, c in rc.items() if c)))
    if lhs.is_ground() and rhs.is_ground():
        return TRUE if PureAtom(a.rel, lhs, rhs).holds({}) else FALSE
    if lhs == rhs:
        return TRUE if a.rel in ("eq", "le") else FALSE
    return PureAtom(a.rel, lhs, rhs)


def simplify(f: Pure) -> Pure:
    """Constant folding, common-part cancellation in atoms, duplicate removal
    and true/false absorption.  The result is logically equivalent to ``f``."""
    if isinstance(f, PureAtom):
        return _cancel(f)
    if isinstance(f, (And, Or)):
        unit, zero = (TRUE, FALSE) if isinstance(f, And) else (FALSE, TRUE)
        seen: dict[Pure, None] = {}
        for a in f.args:
            a = simplify(a)
            if a == zero:
                return zero
            if a == unit:
                continue
            for b in (a.args if type(a) is type(f) else (a,)):
                seen.setdefault(b, None)
        args = list(seen)
        return (conj if isinstance(f, And) else disj)(*args) if args else unit
    if isinstance(f, Not):
        a = simplify(f.arg)
        if isinstance(a, TrueF):
            return FALSE
        if isinstance(a, FalseF):
            return TRUE
        if isinstance(a, Not):
            return a.arg
        return Not(a)
    if isinstance(f, Implies):
        a, b = simplify(f.lhs), simplify(f.rhs)
        if isinstance(a, FalseF) or isinstance(b, TrueF):
            return TRUE
        if isinstance(a, TrueF):
            return b
        if isinstance(b, FalseF):
            return simplify(Not(a))
        return Implies(a, b)
    if isinstance(f, (Exists, Forall)):
        body = simplify(f.body)
        used = tuple(v for v in f.vars if v in free_vars(body))
        return type(f)(used, body) if used else body
    return f
