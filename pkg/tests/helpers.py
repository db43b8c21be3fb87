"""Small constructors and checks shared by the tests."""

from slarr.backend import Answer, decide_validity
from slarr.syntax import Forall, Implies, conj, free_vars


def equivalent(f, g, cfg) -> bool:
    """Solver-checked equivalence of two pure formulas over the naturals."""
    both = conj(Implies(f, g), Implies(g, f))
    closed = Forall(tuple(sorted(free_vars(both))), both)
    return decide_validity(closed, cfg).answer is Answer.VALID


BASE_CLAUSES = ("EmpEmp", "empty", "dead")
CONSUMING = ("PtoPto", "ArrArr")


def trace_violations(trace) -> list[str]:
    """Problems in one translation trace.

    A combination is a run of non-consuming clauses closed by a consuming
    one.  After each combination (at the children of the consuming call)
    the measure must not exceed the one where the combination started and
    the atom count must be strictly smaller.  Every leaf must end in a
    base clause, and depth is bounded by four times the initial measure,
    summed, plus one.
    """
    if not trace:
        return ["empty trace"]
    by_id = {n.id: n for n in trace}
    children: dict = {}
    for n in trace:
        children.setdefault(n.parent, []).append(n)
    root = trace[0]
    limit = 4 * (sum(root.measure) + 1)
    out = []
    for n in trace:
        kind = n.clauses[-1]
        if n.id not in children and kind not in BASE_CLAUSES:
            out.append(f"leaf {n.id} ends in {kind}")
        if n.depth > limit:
            out.append(f"node {n.id} at depth {n.depth} > {limit}")
        if kind in CONSUMING:
            start = n
            while start.parent is not None and by_id[start.parent].clauses[-1] not in CONSUMING:
                start = by_id[start.parent]
            for c in children.get(n.id, ()):
                if c.measure > start.measure or c.atoms >= start.atoms:
                    out.append(f"node {c.id} ({c.measure}, {c.atoms} atoms) not below "
                               f"node {start.id} ({start.measure}, {start.atoms} atoms)")
    return out


# criterion number -> (passed, detail); printed at the end of the session
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def record(n: int, ok: bool, detail: str) -> None:
    ACCEPTANCE[n] = (ok, detail)
    print(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
