import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from gnplab.clt import clt_report, run_clt  # noqa: E402
from gnplab.stats import normality  # noqa: E402
from gnplab.threshold import solve_c_hat  # noqa: E402

TRIALS = 2000
GIANT_C = 2.0
GIANT_GRID = (10_000, 40_000, 160_000)
GIANT_ELL_N = 100_000
ELLS = (2, 4, 6)
CORE_K = 3
CORE_GRID = (6_250, 25_000, 100_000)


class Sweep:
    """Per-n CLT trials with cached reports."""

    def __init__(self, results, ells=()):
        self.results = results
        self.ells = ells
        self.report = clt_report(results, ells)

    def z(self, n):
        return np.array([t.z for t in self.results[n]], dtype=float)

    def normality(self, n):
        return normality(self.z(n))

    def approx(self, n):
        return self.report["per_n"][str(n)]["approximation"]

    def var_over_n(self):
        return {n: float(self.z(n).var(ddof=1) / n) for n in sorted(self.results)}


@pytest.fixture(scope="session")
def giant_sweep():
    res = run_clt("giant", GIANT_GRID, GIANT_C, trials=TRIALS, seed=101)
    res.update(run_clt("giant", [GIANT_ELL_N], GIANT_C, ell=ELLS, trials=TRIALS, seed=102))
    return Sweep(res, ELLS)


@pytest.fixture(scope="session")
def core_sweep():
    c = 1.5 * solve_c_hat(CORE_K).c_hat
    return Sweep(run_clt("core", CORE_GRID, c, k=CORE_K, trials=TRIALS, seed=103))


_RESULTS = {}


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line per acceptance criterion."""

    def record(number, title, ok, detail):
        _RESULTS[number] = (title, bool(ok), detail)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_RESULTS):
        title, ok, detail = _RESULTS[num]
        terminalreporter.write_line(
            f"{'PASS' if ok else 'FAIL'}  criterion {num:2d}  {title}: {detail}")
