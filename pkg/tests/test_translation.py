import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from examples import CONDITION_SUITE, GROUND, MOTIVATING, golden_formula, motivating_body
from helpers import equivalent, trace_violations
from slarr.backend import Answer, bounded_eval, decide_validity
from slarr.parser import parse_entailment, parse_heap
from slarr.semantics import eval_pure, oracle_search
from slarr.sorted import decompose, sorted_formula
from slarr.syntax import (
    TRUE, Exists, Forall, Implies, Not, PureAtom, all_vars, conj, const, free_vars, substitute, var,
)
from slarr.translation import (
    ConditionViolationError, FreshSupply, Obligation, TranslationError, build_validity_formula,
    check_condition, difference_unsat, measure, simplify, translate_p,
)


def sigma(text):
    return parse_heap(text).spatial


def ob(left, *rights, pure=TRUE):
    rs = []
    for r in rights:
        h = parse_heap(r)
        rs.append((h.pure, h.spatial))
    return Obligation(pure, sigma(left), tuple(rs))


# -- side condition -----------------------------------------------------------

@pytest.mark.parametrize("key", ["i", "ii", "iii", "iv"])
def test_condition_suite(key):
    text, expected = CONDITION_SUITE[key]
    assert check_condition(parse_entailment(text)).ok == (expected == "valid")


def test_condition_report_names_offenders():
    r = check_condition(parse_entailment(CONDITION_SUITE["iii"][0]))
    assert not r.ok
    assert [(i, vs) for i, _, vs in r.violations] == [(0, ("y",)), (0, ("y",))]
    assert "succedent 0" in str(r)


def test_condition_uses_normal_form():
    assert check_condition(parse_entailment("Arr(1, 3) |- Ex y. Arr(y, y + 2)")).ok
    assert check_condition(parse_entailment("Arr(x, x + 3) |- Arr(x, x + 3)")).ok
    assert not check_condition(parse_entailment("Arr(1, 3) |- Ex y. Arr(y, y + y)")).ok


# -- the translation on worked examples ----------------------------------------

def test_golden_ground_example(cfg):
    f, zs = translate_p(ob("3 -> 10 * 4 -> 11", "Arr(3, 4)"))
    assert zs == [] and free_vars(f) == frozenset()
    assert bounded_eval(f, 0) and bounded_eval(golden_formula(), 0)
    assert equivalent(f, golden_formula(), cfg)


def test_golden_example_without_pruning_or_with_simplifier(cfg):
    o = ob("3 -> 10 * 4 -> 11", "Arr(3, 4)")
    for kw in ({"prune_dead": False}, {"simplify_leaves": True}):
        f, _ = translate_p(o, **kw)
        assert bounded_eval(f, 0)
        assert equivalent(f, golden_formula(), cfg)


def test_emp_emp():
    f, zs = translate_p(ob("emp", "emp"))
    assert f == Implies(TRUE, TRUE) and zs == []


def test_nonempty_left_against_emp():
    left = sigma("x -> 0 * y -> 0")
    f, _ = translate_p(ob("x -> 0 * y -> 0", "emp"))
    assert f == Not(conj(TRUE, sorted_formula(left)))
    for sx, sy in itertools.product(range(4), repeat=2):
        assert eval_pure(f, {"x": sx, "y": sy}) == (not (0 < sx < sy))


def test_motivating_translation(cfg):
    f, zs = translate_p(ob("Arr(x, x)", "x -> 0", "y > 0 & x -> y"))
    # one fresh value per branch of the array split; the worked text calls both z
    assert len(zs) == 2
    g = substitute(f, {z: var("z") for z in zs})
    assert equivalent(g, motivating_body(), cfg)


def test_fresh_variables_distinct_and_new():
    e = parse_entailment("Arr(x, y) * z -> 0 |- Ex u. Arr(x, x) * u -> 0 * z -> 0, Arr(x, y + 1)")
    used = all_vars(e)
    for se in decompose(e):
        fresh = FreshSupply(prefix="x", avoid=frozenset(used))
        o = Obligation(se.antecedent.pure, se.antecedent.spatial,
                       tuple((p.pure, p.spatial) for p in se.succedents))
        _, zs = translate_p(o, fresh)
        assert len(set(zs)) == len(zs)
        assert not set(zs) & used


def test_prefix_is_forall_only_without_succedent_binders():
    se = decompose(parse_entailment("Arr(1, 1) |- 1 -> 0"))[0]
    f = build_validity_formula(se)
    assert isinstance(f, Forall) and not isinstance(f.body, Exists)
    assert len(f.vars) == 2 and all(v.startswith("z$") for v in f.vars)


def test_ground_entailment_has_no_prefix():
    f = build_validity_formula(decompose(parse_entailment(GROUND))[0])
    assert not isinstance(f, (Forall, Exists))
    assert bounded_eval(f, 0)


def test_validity_formula_motivating(cfg):
    (se,) = decompose(parse_entailment(MOTIVATING))
    f = build_validity_formula(se)
    assert decide_validity(f, cfg).answer is Answer.VALID


def test_build_rejects_violations():
    se = decompose(parse_entailment(CONDITION_SUITE["iii"][0]))[0]
    with pytest.raises(ConditionViolationError):
        build_validity_formula(se)


def test_measure():
    assert measure(sigma("x -> 0 * Arr(y, z)"), ((TRUE, sigma("Arr(x, z)")), (TRUE, sigma("emp")))) == (1, 2)


# -- ground obligations agree with the oracle -------------------------------------

GROUND_CASES = [
    "3 -> 10 * 4 -> 11 |- Arr(3, 4)",
    "Arr(1, 3) |- 1 -> 0 * Arr(2, 3)",
    "Arr(1, 3) |- Ex u. 1 -> u * Arr(2, 3)",
    "1 -> 2 * Arr(2, 4) |- Arr(1, 2) * Arr(3, 4)",
    "Arr(2, 3) * 1 -> 5 |- Arr(1, 3), Arr(1, 1) * 2 -> 0 * 3 -> 0",
    "Arr(1, 2) * Arr(3, 3) |- Arr(1, 1) * Arr(2, 3)",
    "Arr(1, 4) |- Ex y. Arr(1, 1) * y -> 0 * Arr(3, 4)",
    "1 -> 1 * 2 -> 1 |- Ex y. 1 -> y * 2 -> y",
    "1 -> 1 * 2 -> 2 |- Ex y. 1 -> y * 2 -> y",
]


@pytest.mark.parametrize("text", GROUND_CASES)
def test_ground_translation_matches_oracle(text):
    e = parse_entailment(text)
    for se in decompose(e):
        f = build_validity_formula(se)
        # binders range over cells and values, all at most 11 here
        assert bounded_eval(f, 11) == (oracle_search(se.as_entailment(), 1, 3) is None)


# -- difference constraints and the simplifier ------------------------------------

_names = ["a", "b", "c"]
_atoms = st.builds(
    lambda rel, u, cu, v, cv: PureAtom(rel, var(u) + cu if u else const(cu), var(v) + cv if v else const(cv)),
    st.sampled_from(["eq", "lt", "le", "neq"]), st.sampled_from(_names + [None]), st.integers(0, 3),
    st.sampled_from(_names + [None]), st.integers(0, 3))


@settings(max_examples=200, deadline=None)
@given(st.lists(_atoms, min_size=1, max_size=5))
def test_difference_unsat_is_sound(atoms):
    if difference_unsat(atoms):
        f = conj(*atoms)
        for vals in itertools.product(range(7), repeat=3):
            assert not eval_pure(f, dict(zip(_names, vals)))


def test_difference_unsat_finds_cycles():
    a, b = var("a"), var("b")
    assert difference_unsat([PureAtom("lt", a, b), PureAtom("lt", b + 1, a + 2)])
    assert difference_unsat([PureAtom("lt", a + 1, const(1))])
    assert not difference_unsat([PureAtom("le", a, b), PureAtom("le", b, a)])


@settings(max_examples=100, deadline=None)
@given(st.lists(_atoms, min_size=1, max_size=4), st.booleans())
def test_simplify_preserves_meaning(atoms, negate):
    f = conj(*atoms)
    f = Not(f) if negate else f
    g = simplify(f)
    for vals in itertools.product(range(5), repeat=3):
        s = dict(zip(_names, vals))
        assert eval_pure(f, s) == eval_pure(g, s)


PRUNE_CASES = [
    "x -> 0 * y -> 1 |- Ex u. Arr(x, x) * y -> u",
    "Arr(x, x + 1) |- x -> 0 * x + 1 -> 0",
    "Arr(x, y) |- Arr(x, x) * Arr(x + 1, y)",
    "Arr(x, y) |- Ex u. x -> u * Arr(x + 1, y), Arr(x, x)",
    "Arr(1, 3) |- Ex u. 1 -> u * Arr(2, 3)",
]


@pytest.mark.parametrize("text", PRUNE_CASES)
def test_dead_branch_pruning_keeps_meaning(text, cfg):
    for se in decompose(parse_entailment(text)):
        o = Obligation(se.antecedent.pure, se.antecedent.spatial,
                       tuple((p.pure, p.spatial) for p in se.succedents))
        f1, z1 = translate_p(o, FreshSupply(prefix="w"))
        f2, z2 = translate_p(o, FreshSupply(prefix="w"), prune_dead=False)
        ys = sorted(set().union(*(p.ex_vars for p in se.succedents)))
        close = lambda f: Exists(tuple(ys), f) if ys else f
        assert equivalent(close(f1), close(f2), cfg)


# -- instrumentation --------------------------------------------------------------

def test_trace_reaches_base_and_measure_bounded():
    for prune in (True, False):
        trace = []
        translate_p(ob("Arr(x, x + 2) * y -> 0", "x -> 0 * Arr(x + 1, x + 2) * y -> 0",
                       "Arr(x, x + 2) * y -> 1"), trace=trace, prune_dead=prune)
        assert trace[0].parent is None
        assert trace_violations(trace) == []
        assert any(n.clauses[-1] in ("PtoPto", "ArrArr") for n in trace)


def test_measure_guard_exists():
    assert issubclass(TranslationError, RuntimeError)
