import shutil

import pytest

from slarr.backend import SolverConfig

HAVE_SOLVER = shutil.which(SolverConfig().executable) is not None

needs_solver = pytest.mark.skipif(not HAVE_SOLVER, reason="no SMT solver on PATH")


@pytest.fixture
def cfg():
    if not HAVE_SOLVER:
        pytest.skip("no SMT solver on PATH")
    return SolverConfig(timeout_ms=20_000)


def pytest_terminal_summary(terminalreporter):
    from helpers import ACCEPTANCE
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
