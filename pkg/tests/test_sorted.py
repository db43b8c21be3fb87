import itertools

from slarr.parser import parse_entailment, parse_heap
from slarr.semantics import layout, oracle_search, sat_qf
from slarr.sorted import decompose, iter_decompose, lt_sigma, sorted_formula, tilde
from slarr.syntax import EMP, TRUE, And, Arr, PointsTo, conj, const, le, lt, permutations, var

x, y, z, t, u = map(var, "xyztu")


def test_lt_sigma_examples():
    assert lt_sigma(x, (EMP,)) == TRUE
    assert lt_sigma(x, ()) == TRUE
    assert lt_sigma(x, (EMP, Arr(y, z))) == lt(x, y)
    assert lt_sigma(const(0), (PointsTo(const(3), 10), PointsTo(const(4), 11))) == lt(0, 3)


def test_sorted_formula_examples():
    assert sorted_formula((EMP,)) == conj(TRUE, TRUE)
    s = sorted_formula((PointsTo(const(3), 10), PointsTo(const(4), 11)))
    assert s == conj(lt(0, 3), lt(3, 4), TRUE, TRUE)
    assert sorted_formula((Arr(t, u),)) == conj(lt(0, t), le(t, u), TRUE, TRUE)


def test_tilde_appends_to_the_right():
    phi = parse_heap("x = 1 & x -> 0 * y -> 0")
    assert tilde(phi).pure == conj(phi.pure, lt(0, x), lt(x, y), TRUE, TRUE)


def test_decompose_section_example_counts():
    e = parse_entailment("2 -> 20 * 1 -> 10 |- 1 -> 10 * 2 -> 20, 3 -> 30")
    ses = decompose(e)
    assert len(ses) == 2
    assert all(len(se.succedents) == 3 for se in ses)
    assert [se.perm for se in ses] == [(0, 1), (1, 0)]


def test_decompose_trivial_and_counting():
    assert [len(se.succedents) for se in decompose(parse_entailment("emp |- emp"))] == [1]
    e = parse_entailment("x -> 0 * y -> 0 * z -> 0 |- Arr(x, y) * z -> 0")
    ses = decompose(e)
    assert len(ses) == 6 and all(len(se.succedents) == 2 for se in ses)
    assert list(iter_decompose(e)) == ses


def test_succedent_order_is_index_major():
    e = parse_entailment("x -> 0 |- x -> 0 * y -> 0, z -> 1")
    succ = decompose(e)[0].succedents
    assert [str(p.spatial[0]) for p in succ] == ["x -> 0", "y -> 0", "z -> 1"]


def test_sorted_conjunct_present_everywhere():
    e = parse_entailment("Arr(x, y) * z -> 0 |- Ex u. Arr(u, u) * z -> 0")
    for se in decompose(e):
        for phi in (se.antecedent, *se.succedents):
            tail = sorted_formula(phi.spatial).args
            assert isinstance(phi.pure, And) and phi.pure.args[-len(tail):] == tail


_PAIRS = ["x -> 0 * y -> 1", "Arr(x, x + 1) * y -> 0", "Arr(x, y) * Arr(y + 1, y + 1)", "x -> 0 * emp"]


def test_some_sorted_permutation_holds_iff_heap_holds():
    heaps = []
    for n in range(4):
        for dom in itertools.combinations(range(1, 6), n):
            for vals in itertools.product((0, 1), repeat=n):
                heaps.append(dict(zip(dom, vals)))
    for text in _PAIRS:
        phi = parse_heap(text)
        perms = [tilde(p) for p in permutations(phi)]
        for sx, sy in itertools.product(range(5), repeat=2):
            s = {"x": sx, "y": sy}
            for h in heaps:
                assert sat_qf(s, h, phi) == any(sat_qf(s, h, p) for p in perms)


def test_layout_agrees_with_sortedness_on_points_to():
    phi = parse_heap("x -> 0 * y -> 0")
    for sx, sy in itertools.product(range(4), repeat=2):
        s = {"x": sx, "y": sy}
        assert (layout(s, phi.spatial) is not None) == (0 < sx != sy > 0)


def test_decomposition_preserves_bounded_verdict_small():
    for text in ("x -> 0 * y -> 0 |- y -> 0 * x -> 0", "x -> 0 * y -> 0 |- x -> 0 * y -> 1",
                 "Arr(x, x) * y -> 0 |- Ex u. x -> u * y -> 0"):
        e = parse_entailment(text)
        whole = oracle_search(e, 3, 2) is None
        parts = all(oracle_search(se.as_entailment(), 3, 2) is None for se in decompose(e))
        assert whole == parts
