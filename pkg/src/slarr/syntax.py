"""Terms, pure formulas, spatial formulas, symbolic heaps and entailments.

Terms are linear expressions ``c + a1*x1 + ... + an*xn`` with nonnegative
coefficients.  Differences ``u - t`` only show up while the translation is
running; they are represented by :class:`Diff` and disappear as soon as an
atom is built, because :func:`normalize_atom` moves the subtracted part to the
other side of the relation.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Union

__all__ = [
    "Term", "Diff", "var", "const", "as_term",
    "Pure", "TrueF", "FalseF", "TRUE", "FALSE", "PureAtom", "And", "Or", "Not",
    "Implies", "Exists", "Forall", "conj", "disj", "eq", "neq", "lt", "le",
    "gt", "ge", "normalize_atom",
    "SpatialAtom", "Emp", "EMP", "PointsTo", "Arr", "Sigma", "star_count",
    "SymbolicHeap", "Entailment",
    "free_vars", "substitute", "permutations", "all_vars", "fresh_name", "separate_binders",
]


# --------------------------------------------------------------------------
# Terms
# --------------------------------------------------------------------------

def _merge(a: Iterable[tuple[str, int]], b: Iterable[tuple[str, int]]) -> tuple[tuple[str, int], ...]:
    acc: dict[str, int] = {}
    for v, c in itertools.chain(a, b):
        acc[v] = acc.get(v, 0) + c
    return tuple(sorted((v, c) for v, c in acc.items() if c != 0))


@dataclass(frozen=True)
class Term:
    """Linear term over variables with a natural-number constant."""

    const: int = 0
    coeffs: tuple[tuple[str, int], ...] = ()

    def __post_init__(self):
        if self.const < 0 or any(c < 0 for _, c in self.coeffs):
            raise ValueError(f"surface terms cannot be negative: {self.const}, {self.coeffs}")

    @property
    def vars(self) -> frozenset[str]:
        return frozenset(v for v, _ in self.coeffs)

    def is_ground(self) -> bool:
        return not self.coeffs

    def coefficient(self, name: str) -> int:
        return dict(self.coeffs).get(name, 0)

    def __add__(self, other: TermLike) -> Term | Diff:
        if isinstance(other, Diff):
            return other + self
        other = as_term(other)
        return Term(self.const + other.const, _merge(self.coeffs, other.coeffs))

    __radd__ = __add__

    def __sub__(self, other: TermLike) -> Diff:
        return Diff(self) - other

    def subst(self, bindings: Mapping[str, Term]) -> Term:
        out = Term(self.const)
        for v, c in self.coeffs:
            t = bindings.get(v)
            if t is None:
                t = Term(0, ((v, 1),))
            for _ in range(c):
                out = out + t
        return out

    def evaluate(self, store: Mapping[str, int]) -> int:
        return self.const + sum(c * store.get(v, 0) for v, c in self.coeffs)

    def __str__(self) -> str:
        parts = []
        for v, c in self.coeffs:
            parts.extend([v] * c)
        if self.const or not parts:
            parts.append(str(self.const))
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"Term({self})"


@dataclass(frozen=True)
class Diff:
    """Extended term ``pos - neg``; never stored in a finished formula."""

    pos: Term
    neg: Term = field(default_factory=Term)

    @property
    def vars(self) -> frozenset[str]:
        return self.pos.vars | self.neg.vars

    def __add__(self, other: TermLike) -> Diff:
        if isinstance(other, Diff):
            return Diff(self.pos + other.pos, self.neg + other.neg)
        return Diff(self.pos + as_term(other), self.neg)

    __radd__ = __add__

    def __sub__(self, other: TermLike) -> Diff:
        if isinstance(other, Diff):
            return Diff(self.pos + other.neg, self.neg + other.pos)
        return Diff(self.pos, self.neg + as_term(other))

    def subst(self, bindings: Mapping[str, Term]) -> Diff:
        return Diff(self.pos.subst(bindings), self.neg.subst(bindings))

    def evaluate(self, store: Mapping[str, int]) -> int:
        return self.pos.evaluate(store) - self.neg.evaluate(store)

    def __str__(self) -> str:
        if self.neg == Term():
            return str(self.pos)
        return f"({self.pos}) - ({self.neg})"


TermLike = Union[Term, Diff, int, str]


def var(name: str) -> Term:
    return Term(0, ((name, 1),))


def const(n: int) -> Term:
    return Term(n)


def as_term(x: TermLike) -> Term:
    if isinstance(x, Term):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not terms")
    if isinstance(x, int):
        return Term(x)
    if isinstance(x, str):
        return var(x)
    raise TypeError(f"cannot use {x!r} as a surface term")


def _as_ext(x: TermLike) -> Term | Diff:
    return x if isinstance(x, Diff) else as_term(x)


# --------------------------------------------------------------------------
# Pure formulas
# --------------------------------------------------------------------------

class Pure:
    """Base class of Presburger formulas."""

    __slots__ = ()

    def __and__(self, other: Pure) -> Pure:
        return conj(self, other)

    def __or__(self, other: Pure) -> Pure:
        return disj(self, other)

    def __invert__(self) -> Pure:
        return Not(self)


@dataclass(frozen=True)
class TrueF(Pure):
    def __str__(self) -> str:
        return "true"


@dataclass(frozen=True)
class FalseF(Pure):
    def __str__(self) -> str:
        return "false"


TRUE = TrueF()
FALSE = FalseF()

RELATIONS = ("eq", "neq", "lt", "le")
_REL_TEXT = {"eq": "=", "neq": "!=", "lt": "<", "le": "<="}


@dataclass(frozen=True)
class PureAtom(Pure):
    rel: str
    lhs: Term | Diff
    rhs: Term | Diff

    def __post_init__(self):
        if self.rel not in RELATIONS:
            raise ValueError(f"unknown relation {self.rel!r}")

    def holds(self, store: Mapping[str, int]) -> bool:
        a, b = self.lhs.evaluate(store), self.rhs.evaluate(store)
        if self.rel == "eq":
            return a == b
        if self.rel == "neq":
            return a != b
        if self.rel == "lt":
            return a < b
        return a <= b

    def __str__(self) -> str:
        return f"{self.lhs} {_REL_TEXT[self.rel]} {self.rhs}"


@dataclass(frozen=True)
class And(Pure):
    args: tuple[Pure, ...]

    def __str__(self) -> str:
        return "(" + " & ".join(map(str, self.args)) + ")"


@dataclass(frozen=True)
class Or(Pure):
    args: tuple[Pure, ...]

    def __str__(self) -> str:
        return "(" + " | ".join(map(str, self.args)) + ")"


@dataclass(frozen=True)
class Not(Pure):
    arg: Pure

    def __str__(self) -> str:
        return f"~{self.arg}" if isinstance(self.arg, (And, Or, TrueF, FalseF)) else f"~({self.arg})"


@dataclass(frozen=True)
class Implies(Pure):
    lhs: Pure
    rhs: Pure

    def __str__(self) -> str:
        return f"({self.lhs} -> {self.rhs})"


@dataclass(frozen=True)
class Exists(Pure):
    """Existential over naturals; ``vars`` may bind several variables."""

    vars: tuple[str, ...]
    body: Pure

    def __str__(self) -> str:
        if not self.vars:
            return str(self.body)
        return f"(Ex {' '.join(self.vars)}. {self.body})"


@dataclass(frozen=True)
class Forall(Pure):
    vars: tuple[str, ...]
    body: Pure

    def __str__(self) -> str:
        if not self.vars:
            return str(self.body)
        return f"(All {' '.join(self.vars)}. {self.body})"


def conj(*fs: Pure) -> Pure:
    """Conjunction, flattening nested conjunctions.  No other rewriting."""
    args: list[Pure] = []
    for f in fs:
        if isinstance(f, And):
            args.extend(f.args)
        else:
            args.append(f)
    if not args:
        return TRUE
    if len(args) == 1:
        return args[0]
    return And(tuple(args))


def disj(*fs: Pure) -> Pure:
    args: list[Pure] = []
    for f in fs:
        if isinstance(f, Or):
            args.extend(f.args)
        else:
            args.append(f)
    if not args:
        return FALSE
    if len(args) == 1:
        return args[0]
    return Or(tuple(args))


def normalize_atom(a: PureAtom) -> PureAtom:
    """Eliminate extended terms from ``a``.

    ``l1 - l2  R  r1 - r2`` becomes ``l1 + r2  R  r1 + l2``.  Nothing cancels:
    ``x + (5 - 3) = y`` gives ``x + 5 = y + 3``.
    """
    lhs, rhs = a.lhs, a.rhs
    if isinstance(lhs, Term) and isinstance(rhs, Term):
        return a
    lpos, lneg = (lhs.pos, lhs.neg) if isinstance(lhs, Diff) else (lhs, Term())
    rpos, rneg = (rhs.pos, rhs.neg) if isinstance(rhs, Diff) else (rhs, Term())
    return PureAtom(a.rel, lpos + rneg, rpos + lneg)


def _atom(rel: str, a: TermLike, b: TermLike) -> PureAtom:
    return normalize_atom(PureAtom(rel, _as_ext(a), _as_ext(b)))


def eq(a: TermLike, b: TermLike) -> PureAtom:
    return _atom("eq", a, b)


def neq(a: TermLike, b: TermLike) -> PureAtom:
    return _atom("neq", a, b)


def lt(a: TermLike, b: TermLike) -> PureAtom:
    return _atom("lt", a, b)


def le(a: TermLike, b: TermLike) -> PureAtom:
    return _atom("le", a, b)


def gt(a: TermLike, b: TermLike) -> PureAtom:
    return _atom("lt", b, a)


def ge(a: TermLike, b: TermLike) -> PureAtom:
    return _atom("le", b, a)


# --------------------------------------------------------------------------
# Spatial formulas
# --------------------------------------------------------------------------

class SpatialAtom:
    __slots__ = ()


@dataclass(frozen=True)
class Emp(SpatialAtom):
    def __str__(self) -> str:
        return "emp"


EMP = Emp()


def _coerce(obj, *names: str) -> None:
    for n in names:
        v = getattr(obj, n)
        if not isinstance(v, (Term, Diff)):
            object.__setattr__(obj, n, as_term(v))


@dataclass(frozen=True)
class PointsTo(SpatialAtom):
    addr: Term | Diff
    val: Term | Diff

    def __post_init__(self):
        _coerce(self, "addr", "val")

    def __str__(self) -> str:
        return f"{self.addr} -> {self.val}"


@dataclass(frozen=True)
class Arr(SpatialAtom):
    lo: Term | Diff
    hi: Term | Diff

    def __post_init__(self):
        _coerce(self, "lo", "hi")

    def __str__(self) -> str:
        return f"Arr({self.lo}, {self.hi})"


# A spatial formula is the list of its *-separated atoms; () is the empty list.
Sigma = tuple[SpatialAtom, ...]


def star_count(sigma: Sigma) -> int:
    """Number of ``*`` symbols in ``sigma``."""
    return max(len(sigma) - 1, 0)


def sigma_str(sigma: Sigma) -> str:
    return " * ".join(map(str, sigma)) if sigma else "emp"


# --------------------------------------------------------------------------
# Symbolic heaps and entailments
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class SymbolicHeap:
    ex_vars: tuple[str, ...] = ()
    pure: Pure = TRUE
    spatial: Sigma = (EMP,)

    def __post_init__(self):
        if len(set(self.ex_vars)) != len(self.ex_vars):
            raise ValueError(f"repeated existential variable in {self.ex_vars}")

    def __str__(self) -> str:
        body = sigma_str(self.spatial)
        if self.pure != TRUE:
            body = f"{_pure_surface(self.pure)} & {body}"
        if self.ex_vars:
            body = f"Ex {' '.join(self.ex_vars)}. {body}"
        return body


def _pure_surface(f: Pure) -> str:
    if isinstance(f, And):
        return " & ".join(_pure_surface(a) for a in f.args)
    if isinstance(f, PureAtom):
        return str(f)
    return str(f)


@dataclass(frozen=True)
class Entailment:
    antecedent: SymbolicHeap
    succedents: tuple[SymbolicHeap, ...]

    def __post_init__(self):
        if self.antecedent.ex_vars:
            raise ValueError("the antecedent must be quantifier-free")

    def __str__(self) -> str:
        return f"{self.antecedent} |- " + ", ".join(map(str, self.succedents))


# --------------------------------------------------------------------------
# Free variables, substitution, permutations
# --------------------------------------------------------------------------

def free_vars(obj) -> frozenset[str]:
    if isinstance(obj, (Term, Diff)):
        return obj.vars
    if isinstance(obj, (TrueF, FalseF, Emp)):
        return frozenset()
    if isinstance(obj, PureAtom):
        return obj.lhs.vars | obj.rhs.vars
    if isinstance(obj, (And, Or)):
        return frozenset().union(*map(free_vars, obj.args))
    if isinstance(obj, Not):
        return free_vars(obj.arg)
    if isinstance(obj, Implies):
        return free_vars(obj.lhs) | free_vars(obj.rhs)
    if isinstance(obj, (Exists, Forall)):
        return free_vars(obj.body) - set(obj.vars)
    if isinstance(obj, PointsTo):
        return obj.addr.vars | obj.val.vars
    if isinstance(obj, Arr):
        return obj.lo.vars | obj.hi.vars
    if isinstance(obj, tuple):
        return frozenset().union(*map(free_vars, obj))
    if isinstance(obj, SymbolicHeap):
        return (free_vars(obj.pure) | free_vars(obj.spatial)) - set(obj.ex_vars)
    if isinstance(obj, Entailment):
        return free_vars(obj.antecedent) | free_vars(obj.succedents)
    raise TypeError(f"no free variables for {type(obj).__name__}")


def all_vars(obj) -> frozenset[str]:
    """Free and bound variable names occurring anywhere in ``obj``."""
    if isinstance(obj, (Exists, Forall)):
        return all_vars(obj.body) | set(obj.vars)
    if isinstance(obj, (And, Or)):
        return frozenset().union(*map(all_vars, obj.args))
    if isinstance(obj, Not):
        return all_vars(obj.arg)
    if isinstance(obj, Implies):
        return all_vars(obj.lhs) | all_vars(obj.rhs)
    if isinstance(obj, SymbolicHeap):
        return all_vars(obj.pure) | free_vars(obj.spatial) | set(obj.ex_vars)
    if isinstance(obj, Entailment):
        return all_vars(obj.antecedent).union(*map(all_vars, obj.succedents))
    if isinstance(obj, tuple):
        return frozenset().union(*map(all_vars, obj))
    return free_vars(obj)


def _rename_away(name: str, avoid: set[str]) -> str:
    new = name + "'"
    while new in avoid:
        new += "'"
    return new


def substitute(obj, bindings: Mapping[str, TermLike]):
    """Capture-avoiding simultaneous substitution of terms for variables."""
    b = {k: as_term(v) for k, v in bindings.items()}
    return _subst(obj, b)


def _subst(obj, b: Mapping[str, Term]):
    if not b:
        return obj
    if isinstance(obj, (Term, Diff)):
        return obj.subst(b)
    if isinstance(obj, (TrueF, FalseF, Emp)):
        return obj
    if isinstance(obj, PureAtom):
        return normalize_atom(PureAtom(obj.rel, obj.lhs.subst(b), obj.rhs.subst(b)))
    if isinstance(obj, And):
        return And(tuple(_subst(a, b) for a in obj.args))
    if isinstance(obj, Or):
        return Or(tuple(_subst(a, b) for a in obj.args))
    if isinstance(obj, Not):
        return Not(_subst(obj.arg, b))
    if isinstance(obj, Implies):
        return Implies(_subst(obj.lhs, b), _subst(obj.rhs, b))
    if isinstance(obj, (Exists, Forall)):
        inner = {k: v for k, v in b.items() if k not in obj.vars}
        body_fv = free_vars(obj.body)
        inner = {k: v for k, v in inner.items() if k in body_fv}
        if not inner:
            return obj
        incoming = frozenset().union(*(t.vars for t in inner.values()))
        avoid = set(incoming) | set(body_fv) | set(inner) | all_vars(obj.body)
        new_vars = []
        renaming: dict[str, Term] = {}
        for v in obj.vars:
            if v in incoming:
                nv = _rename_away(v, avoid)
                avoid.add(nv)
                renaming[v] = var(nv)
                new_vars.append(nv)
            else:
                new_vars.append(v)
        body = _subst(obj.body, renaming) if renaming else obj.body
        return type(obj)(tuple(new_vars), _subst(body, inner))
    if isinstance(obj, PointsTo):
        return PointsTo(obj.addr.subst(b), obj.val.subst(b))
    if isinstance(obj, Arr):
        return Arr(obj.lo.subst(b), obj.hi.subst(b))
    if isinstance(obj, tuple):
        return tuple(_subst(a, b) for a in obj)
    if isinstance(obj, SymbolicHeap):
        if set(obj.ex_vars) & set(b):
            b = {k: v for k, v in b.items() if k not in obj.ex_vars}
        return replace(obj, pure=_subst(obj.pure, b), spatial=_subst(obj.spatial, b))
    raise TypeError(f"cannot substitute into {type(obj).__name__}")


def permutations(phi: SymbolicHeap) -> list[SymbolicHeap]:
    """All reorderings of the spatial part, in lexicographic index order."""
    return [replace(phi, spatial=tuple(phi.spatial[i] for i in idx))
            for idx in itertools.permutations(range(len(phi.spatial)))]


def fresh_name(base: str, avoid: set[str]) -> str:
    k = 1
    while f"{base}${k}" in avoid:
        k += 1
    return f"{base}${k}"


def separate_binders(e: Entailment) -> Entailment:
    """Rename succedent binders that clash with a free variable of ``e``.

    A clashing ``y`` becomes ``y$k`` for the least ``k`` not already used.
    Entailments without clashes come back unchanged.
    """
    free = free_vars(e)
    if not any(set(phi.ex_vars) & free for phi in e.succedents):
        return e
    avoid = set(all_vars(e))
    out = []
    for phi in e.succedents:
        clash = [y for y in phi.ex_vars if y in free]
        if clash:
            ren = {}
            for y in clash:
                ren[y] = fresh_name(y, avoid)
                avoid.add(ren[y])
            body = replace(phi, ex_vars=())
            body = _subst(body, {y: var(n) for y, n in ren.items()})
            phi = replace(body, ex_vars=tuple(ren.get(y, y) for y in phi.ex_vars))
        out.append(phi)
    return Entailment(e.antecedent, tuple(out))
