"""Seeded synthetic benchmark families.

``Base`` entailments have one conclusion and two or three atoms per side,
split evenly into points-to only, array only and mixed groups.  About half
are valid by construction: the conclusion covers the same cells as the
antecedent with a different partition.  The rest perturb one constant so
that the cell sets or a stored value no longer match.

The other families are derived from ``Base``:

* ``SingleFrame(n)`` appends the same ``n`` atoms to both sides;
* ``SingleNFrame(n)`` appends ``n`` points-to atoms on the left and ``n``
  one-cell arrays over the same cells on the right;
* ``Multi`` adds one or two conclusions whose cell count differs from the
  antecedent's, so the verdict of the base entailment is kept.

Constants in terms never exceed 5.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Optional

from .parser import InputFile, format_file
from .syntax import (
    EMP, TRUE, Arr, Entailment, PointsTo, Pure, SpatialAtom, SymbolicHeap, Term,
    conj, const, le, var,
)

__all__ = ["BenchSpec", "BenchItem", "FAMILIES", "generate_bench", "generate_items",
           "parse_family", "bench_text"]

FAMILIES = ("Base", "SingleFrame", "SingleNFrame", "Multi")
GROUPS = ("pto", "array", "mix")

# free variables usable as region bases and as stored values
_BASES = ("x", "y")
_VALUE_VAR = "a"
MAX_CONST = 5
_FRAME_VAR = "w"


@dataclass(frozen=True)
class BenchSpec:
    family: str = "Base"
    count: int = 120
    seed: int = 0
    n: int = 0  # frame size for SingleFrame / SingleNFrame
    valid_ratio: float = 0.5

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        if self.family in ("SingleFrame", "SingleNFrame") and self.n not in (2, 3):
            raise ValueError("frame size must be 2 or 3")
        if self.count < 0:
            raise ValueError("count must be nonnegative")


def parse_family(text: str) -> tuple[str, int]:
    """``SingleFrame3`` or ``SingleFrame-3`` to ``("SingleFrame", 3)``."""
    for fam in sorted(FAMILIES, key=len, reverse=True):
        if text.lower().startswith(fam.lower()):
            rest = text[len(fam):].lstrip("-(").rstrip(")")
            if not rest:
                return fam, 0
            if rest.isdigit():
                return fam, int(rest)
    raise ValueError(f"unknown family {text!r}")


@dataclass(frozen=True)
class BenchItem:
    name: str
    entailment: Entailment
    group: str
    expected_valid: bool


# --------------------------------------------------------------------------
# Regions and partitions
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class _Region:
    base: Optional[str]  # variable name, or None for a constant region
    start: int  # offset from the base, or the first address
    length: int

    def cell(self, i: int) -> Term:
        off = self.start + i
        return var(self.base) + off if self.base else const(off)


def _regions(rng: random.Random, cells: int) -> list[_Region]:
    """One or two regions holding ``cells`` cells in total."""
    if cells >= 2 and rng.random() < 0.4:
        k = rng.randint(1, cells - 1)
        sizes = [k, cells - k]
    else:
        sizes = [cells]
    out = []
    for b, size in zip(rng.sample(_BASES, len(sizes)), sizes):
        if rng.random() < 0.25 and len(sizes) == 1:
            out.append(_Region(None, rng.randint(1, 6 - size), size))
        else:
            out.append(_Region(b, rng.randint(0, 4 - size), size))
    return out


def _split(rng: random.Random, length: int, parts: int) -> list[tuple[int, int]]:
    """Partition ``0..length-1`` into ``parts`` nonempty intervals."""
    cuts = sorted(rng.sample(range(1, length), parts - 1))
    bounds = [0, *cuts, length]
    return [(bounds[i], bounds[i + 1] - 1) for i in range(parts)]


def _value(rng: random.Random) -> Term:
    return var(_VALUE_VAR) if rng.random() < 0.3 else const(rng.randint(0, 5))


def _layout_atoms(rng: random.Random, regions: list[_Region], pieces: list[list[tuple[int, int]]],
                  kinds: str, values: Optional[dict] = None, ex: Optional[list] = None) -> list[SpatialAtom]:
    atoms: list[SpatialAtom] = []
    for r, (reg, parts) in enumerate(zip(regions, pieces)):
        for lo, hi in parts:
            single = lo == hi
            use_pto = single and (kinds == "pto" or (kinds == "mix" and rng.random() < 0.6))
            if not use_pto:
                atoms.append(Arr(reg.cell(lo), reg.cell(hi)))
                continue
            if values is not None and ex is None:
                v = _value(rng)
                values[(r, lo)] = v
            elif values is not None and (r, lo) in values and rng.random() < 0.6:
                v = values[(r, lo)]
            else:
                name = ("u", "v", "t")[len(ex)]
                ex.append(name)
                v = var(name)
            atoms.append(PointsTo(reg.cell(lo), v))
    return atoms


def _parts_for(rng: random.Random, regions: list[_Region], n_atoms: int, kinds: str) -> list[list[tuple[int, int]]]:
    if kinds == "pto":
        return [[(i, i) for i in range(reg.length)] for reg in regions]
    counts = [1] * len(regions)
    for _ in range(n_atoms - len(regions)):
        choices = [i for i, reg in enumerate(regions) if counts[i] < reg.length]
        counts[rng.choice(choices)] += 1
    return [_split(rng, reg.length, c) for reg, c in zip(regions, counts)]


def _base_item(rng: random.Random, group: str, valid: bool) -> tuple[Entailment, bool]:
    while True:
        e, ok = _base_attempt(rng, group, valid)
        # a mixed entailment must contain a points-to atom somewhere
        if group != "mix" or any(isinstance(a, PointsTo)
                                 for a in e.antecedent.spatial + e.succedents[0].spatial):
            return e, ok


def _base_attempt(rng: random.Random, group: str, valid: bool) -> tuple[Entailment, bool]:
    n_left = rng.randint(2, 3)
    n_right = rng.randint(2, 3)
    if group == "pto":
        n_right = n_left
        cells = n_left
    else:
        cells = rng.randint(max(n_left, n_right), 4)
    regions = _regions(rng, cells)
    # a region too short for its share of atoms gets another partition count
    n_left = min(n_left, sum(r.length for r in regions))
    n_right = min(n_right, sum(r.length for r in regions))
    n_left = max(n_left, len(regions))
    n_right = max(n_right, len(regions))

    values: dict = {}
    left_parts = _parts_for(rng, regions, n_left, group)
    left = _layout_atoms(rng, regions, left_parts, group, values=values)
    ex: list[str] = []
    right_parts = _parts_for(rng, regions, n_right, group)
    right = _layout_atoms(rng, regions, right_parts, group, values=values, ex=ex)
    pure: Pure = TRUE
    if len(regions) == 2 and regions[0].base and regions[1].base:
        first, second = sorted(regions, key=lambda r: r.base)
        # keeps the antecedent satisfiable under any partition
        if rng.random() < 0.5:
            pure = le(first.cell(first.length), second.cell(0))
    rng.shuffle(right)
    if not valid:
        right, valid = _perturb(rng, right, values)
    ante = SymbolicHeap((), pure, tuple(left))
    succ = SymbolicHeap(tuple(v for v in ("u", "v", "t") if v in ex), TRUE, tuple(right))
    return Entailment(ante, (succ,)), valid


def _shifts(t: Term) -> list[Term]:
    """``t`` moved by one in each direction that keeps constants in range."""
    out = []
    if t.const > (0 if t.coeffs else 1):
        out.append(Term(t.const - 1, t.coeffs))
    if t.const < MAX_CONST:
        out.append(t + 1)
    return out


def _perturb(rng: random.Random, right: list[SpatialAtom], values: dict) -> tuple[list[SpatialAtom], bool]:
    """Break the match between the sides; returns the atoms and whether they stay valid."""
    order = list(range(len(right)))
    rng.shuffle(order)
    for i in order:
        a = right[i]
        if isinstance(a, PointsTo) and not a.val.vars - {_VALUE_VAR}:
            return right[:i] + [PointsTo(a.addr, rng.choice(_shifts(a.val)))] + right[i + 1:], False
    for i in order:
        a = right[i]
        if isinstance(a, Arr):
            options = [Arr(a.lo, hi) for hi in _shifts(a.hi) if _le_const(a.lo, hi)]
            options += [Arr(lo, a.hi) for lo in _shifts(a.lo) if _le_const(lo, a.hi)]
            return right[:i] + [rng.choice(options)] + right[i + 1:], False
    i = order[0]
    a = right[i]
    assert isinstance(a, PointsTo)
    return right[:i] + [PointsTo(rng.choice(_shifts(a.addr)), a.val)] + right[i + 1:], False


def _le_const(lo: Term, hi: Term) -> bool:
    return lo.coeffs == hi.coeffs and lo.const <= hi.const


# --------------------------------------------------------------------------
# Derived families
# --------------------------------------------------------------------------

def _frame(rng: random.Random, n: int) -> list[SpatialAtom]:
    atoms: list[SpatialAtom] = []
    off = 0
    for _ in range(n):
        if rng.random() < 0.5:
            atoms.append(PointsTo(var(_FRAME_VAR) + off, const(rng.randint(0, 5))))
            off += 1
        else:
            atoms.append(Arr(var(_FRAME_VAR) + off, var(_FRAME_VAR) + off + 1))
            off += 2
    return atoms


def _frame_guard(e: Entailment) -> Pure:
    """Place the frame after every base cell so the sides stay satisfiable together."""
    hi = 0
    for a in e.antecedent.spatial + e.succedents[0].spatial:
        for t in ([a.addr] if isinstance(a, PointsTo) else [a.lo, a.hi] if isinstance(a, Arr) else []):
            hi = max(hi, t.const)
    guards = [le(var(b) + (hi + 1), var(_FRAME_VAR))
              for b in sorted(set().union(*(_free_bases(a) for a in e.antecedent.spatial)))]
    if not guards:
        guards = [le(const(hi + 1), var(_FRAME_VAR))]
    return conj(*guards)


def _free_bases(a: SpatialAtom) -> set[str]:
    if isinstance(a, PointsTo):
        return set(a.addr.vars)
    if isinstance(a, Arr):
        return set(a.lo.vars | a.hi.vars)
    return set()


def _with_frame(e: Entailment, left: list, right: list) -> Entailment:
    ante = e.antecedent
    new_ante = SymbolicHeap((), conj(ante.pure, _frame_guard(e)) if ante.pure != TRUE else _frame_guard(e),
                            tuple(_nonemp(ante.spatial)) + tuple(left))
    succ = tuple(SymbolicHeap(phi.ex_vars, phi.pure, tuple(_nonemp(phi.spatial)) + tuple(right))
                 for phi in e.succedents)
    return Entailment(new_ante, succ)


def _nonemp(sigma):
    return [a for a in sigma if a != EMP]


def _extra_conclusion(rng: random.Random, e: Entailment) -> SymbolicHeap:
    """A conclusion over the antecedent's variables with a different cell count."""
    cells = sum(1 if isinstance(a, PointsTo) else int(a.hi.const - a.lo.const) + 1
                for a in e.antecedent.spatial if isinstance(a, (PointsTo, Arr)))
    target = rng.choice([c for c in (1, 2, 3, 4, 5) if c != cells])
    bases = sorted(set().union(*(_free_bases(a) for a in e.antecedent.spatial))) or [None]
    b = rng.choice(bases)
    reg = _Region(b, 0, target) if b else _Region(None, 1, target)
    n_atoms = min(target, rng.randint(1, 3))
    parts = _split(rng, target, n_atoms)
    atoms: list[SpatialAtom] = []
    ex: list[str] = []
    for lo, hi in parts:
        if lo == hi and rng.random() < 0.5:
            name = ("p", "q", "r")[len(ex)]
            ex.append(name)
            atoms.append(PointsTo(reg.cell(lo), var(name)))
        else:
            atoms.append(Arr(reg.cell(lo), reg.cell(hi)))
    return SymbolicHeap(tuple(ex), TRUE, tuple(atoms))


# --------------------------------------------------------------------------
# Entry points
# --------------------------------------------------------------------------

def _base_items(rng: random.Random, count: int, ratio: float) -> list[BenchItem]:
    items = []
    per = [count // 3 + (1 if i < count % 3 else 0) for i in range(3)]
    for group, k in zip(GROUPS, per):
        n_valid = round(k * ratio)
        flags = [True] * n_valid + [False] * (k - n_valid)
        rng.shuffle(flags)
        for j, want in enumerate(flags):
            e, valid = _base_item(rng, group, want)
            items.append(BenchItem(f"{group}-{j:03d}", e, group, valid))
    return items


def generate_items(spec: BenchSpec) -> list[BenchItem]:
    """Deterministic for a given spec: the generator only uses ``random.Random(seed)``."""
    rng = random.Random(f"{spec.family}/{spec.n}/{spec.seed}")
    base = _base_items(rng, spec.count, spec.valid_ratio)
    fam = spec.family
    out = []
    for it in base:
        e = it.entailment
        if fam == "SingleFrame":
            f = _frame(rng, spec.n)
            e = _with_frame(e, f, f)
            prefix = f"sf{spec.n}"
        elif fam == "SingleNFrame":
            cells = [var(_FRAME_VAR) + i for i in range(spec.n)]
            left = [PointsTo(c, const(rng.randint(0, 5))) for c in cells]
            right = [Arr(c, c) for c in cells]
            e = _with_frame(e, left, right)
            prefix = f"snf{spec.n}"
        elif fam == "Multi":
            succ = list(e.succedents)
            for _ in range(rng.randint(1, 2)):
                succ.insert(rng.randint(0, len(succ)), _extra_conclusion(rng, e))
            e = Entailment(e.antecedent, tuple(succ))
            prefix = "multi"
        else:
            prefix = "base"
        label = "valid" if it.expected_valid else "invalid"
        out.append(BenchItem(f"{prefix}-{it.name}-{label}", e, it.group, it.expected_valid))
    return out


def generate_bench(spec: BenchSpec) -> InputFile:
    return [(it.name, it.entailment) for it in generate_items(spec)]


def bench_text(spec: BenchSpec) -> str:
    head = f"# family={spec.family} n={spec.n} count={spec.count} seed={spec.seed}\n"
    return head + format_file(generate_bench(spec))
