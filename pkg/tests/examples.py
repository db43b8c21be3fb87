"""Entailments from the literature used across the tests."""

from slarr.syntax import Implies, Not, conj, disj, eq, gt, le, lt, var

MOTIVATING = "Arr(x, x) |- x -> 0, Ex y. y > 0 & x -> y"

CONDITION_SUITE = {
    "i": (MOTIVATING, "valid"),
    "ii": ("Arr(1, 5) |- Ex y y'. Arr(y, y + 1) * Arr(y', y' + 2)", "valid"),
    "iii": ("Arr(1, 5) |- Ex y. Arr(1, 1 + y) * Arr(2 + y, 5)", "condition-violation"),
    "iv": ("Arr(1, 5) |- Ex y y'. Arr(1, 1 + y) * 2 + y -> y' * Arr(3 + y, 5)", "condition-violation"),
}

GROUND = "3 -> 10 * 4 -> 11 |- Arr(3, 4)"


def golden_formula():
    """Final conjunction of the worked ground example."""
    return conj(
        Not(conj(eq(3, 4), lt(3, 4))),
        Implies(conj(lt(3, 4), eq(4, 4)), conj(eq(3, 3), eq(10, 10), eq(4, 4), eq(11, 11))),
        Not(conj(lt(3, 4), lt(4, 4))),
        Not(conj(gt(3, 4), lt(3, 4))),
    )


def motivating_body(z="z"):
    """Simplified translation of the motivating example, ``z`` fresh."""
    x, y, zz = var("x"), var("y"), var(z)
    return conj(Not(conj(lt(x, x + 1), le(x + 1, x))),
                Implies(lt(x, x + 1), disj(eq(zz, 0), conj(gt(y, 0), eq(zz, y)))))


def motivating_closed():
    x, y, z = var("x"), var("y"), var("z")
    from slarr.syntax import Exists, Forall
    return Forall(("x", "z"), Exists(("y",), conj(
        Not(conj(lt(x, x + 1), le(x + 1, x))), disj(eq(z, 0), conj(gt(y, 0), eq(z, y))))))
