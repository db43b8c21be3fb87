import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slarr.parser import parse_heap
from slarr.syntax import (
    EMP, TRUE, Arr, Diff, Entailment, Exists, PointsTo, PureAtom, SymbolicHeap, Term,
    all_vars, conj, const, eq, free_vars, gt, lt, neq, normalize_atom, permutations,
    separate_binders, star_count, substitute, var,
)

x, y, z = var("x"), var("y"), var("z")


def test_term_arithmetic_collects_coefficients():
    t = x + y + x + 3
    assert t == Term(3, (("x", 2), ("y", 1)))
    assert t.coefficient("x") == 2 and t.coefficient("w") == 0
    assert str(t) == "x + x + y + 3"


def test_surface_terms_reject_negative_parts():
    with pytest.raises(ValueError):
        Term(-1)
    with pytest.raises(ValueError):
        Term(0, (("x", -1),))


def test_subtraction_builds_extended_term():
    d = (x + 5) - 3
    assert isinstance(d, Diff)
    assert d.evaluate({"x": 1}) == 3


def test_normalize_moves_subtracted_part_across():
    a = PureAtom("eq", x + ((const(5)) - 3), y)
    assert normalize_atom(a) == PureAtom("eq", x + 5, y + 3)


def test_normalize_identity_on_surface_atoms():
    a = PureAtom("eq", x, x)
    assert normalize_atom(a) is a


def test_normalize_strict_example():
    z1, z2 = var("z1"), var("z2")
    a = PureAtom("lt", z1 + (const(2) - z1), z2)
    assert normalize_atom(a) == PureAtom("lt", z1 + 2, z2 + z1)


small_terms = st.builds(
    lambda c, cx, cy, cz: Term(c, tuple((v, k) for v, k in (("x", cx), ("y", cy), ("z", cz)) if k)),
    st.integers(0, 4), st.integers(0, 2), st.integers(0, 2), st.integers(0, 2))


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(["eq", "neq", "lt", "le"]), small_terms, small_terms, small_terms, small_terms)
def test_normalize_preserves_models_exhaustively(rel, a, b, c, d):
    raw = PureAtom(rel, a - b, c - d)
    norm = normalize_atom(raw)
    assert isinstance(norm.lhs, Term) and isinstance(norm.rhs, Term)
    for vals in itertools.product(range(9), repeat=3):
        s = dict(zip("xyz", vals))
        assert raw.holds(s) == norm.holds(s)


def test_gt_and_ge_swap_sides():
    assert gt(x, 0) == lt(0, x)
    assert str(gt(y, 0)) == "0 < y"


def test_free_vars_examples():
    assert free_vars(x + y + 1) == {"x", "y"}
    phi = SymbolicHeap(("y",), gt(y, 0), (PointsTo(x, y),))
    assert free_vars(phi) == {"x"}
    assert free_vars(EMP) == frozenset()


def test_substitute_examples():
    assert substitute(lt(x, y), {"x": 3}) == lt(3, y)
    assert substitute(Arr(var("t"), var("t") + var("u")), {"u": 2}) == Arr(var("t"), var("t") + 2)


def test_substitute_avoids_capture():
    f = Exists(("y",), lt(x, y))
    g = substitute(f, {"x": y})
    assert isinstance(g, Exists) and g.vars == ("y'",)
    assert g.body == lt(y, var("y'"))


@given(st.sampled_from(["x", "y"]), small_terms)
def test_substitution_free_variable_law(name, t):
    f = conj(lt(x, y + 1), neq(y, z))
    g = substitute(f, {name: t})
    assert free_vars(g) == (free_vars(f) - {name}) | t.vars


def test_permutations_counts_and_order():
    s1, s2, s3 = PointsTo(x, 1), PointsTo(y, 2), Arr(z, z)
    assert [p.spatial for p in permutations(SymbolicHeap((), TRUE, (s1, s2)))] == [(s1, s2), (s2, s1)]
    assert [p.spatial for p in permutations(SymbolicHeap())] == [(EMP,)]
    perms = permutations(SymbolicHeap((), TRUE, (s1, s2, s3)))
    assert len(perms) == 6 == len({p.spatial for p in perms})
    assert all(sorted(map(str, p.spatial)) == sorted(map(str, (s1, s2, s3))) for p in perms)


def test_star_count():
    assert star_count((EMP,)) == 0
    assert star_count(()) == 0
    assert star_count((EMP, EMP, EMP)) == 2


def test_entailment_antecedent_must_be_quantifier_free():
    with pytest.raises(ValueError):
        Entailment(SymbolicHeap(("y",)), (SymbolicHeap(),))


def test_repeated_binder_rejected():
    with pytest.raises(ValueError):
        SymbolicHeap(("y", "y"))


def test_separate_binders_renames_only_clashes():
    e = Entailment(parse_heap("Arr(x, x)"), (parse_heap("Ex x u. x -> u"),))
    e2 = separate_binders(e)
    phi = e2.succedents[0]
    assert phi.ex_vars == ("x$1", "u")
    assert phi.spatial == (PointsTo(var("x$1"), var("u")),)
    assert separate_binders(e2) is e2


def test_all_vars_sees_binders():
    phi = SymbolicHeap(("y",), eq(y, 1), (PointsTo(x, y),))
    assert all_vars(phi) == {"x", "y"}
