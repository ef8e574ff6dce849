import time
from contextlib import contextmanager

import numpy as np
import pytest

from hypmetric import Hyp, MapSpec

_LINES = pytest.StashKey[list]()


def affine(su, ou, sv, ov):
    """``(u, v) -> (su*u + ou, sv*v + ov)`` with its exact Lipschitz constant."""
    def fn(x):
        return Hyp(su * x.u + ou, sv * x.v + ov)

    def vec(p):
        return np.column_stack([su * p[:, 0] + ou, sv * p[:, 1] + ov])

    return MapSpec(fn, Hyp(abs(su), abs(sv)), "affine", vec)


@pytest.fixture
def criterion(request):
    lines = request.config.stash.setdefault(_LINES, [])

    @contextmanager
    def run(n, title, budget_s=None):
        t0 = time.perf_counter()
        try:
            yield
        except BaseException as e:
            dt = time.perf_counter() - t0
            msg = str(e).splitlines()[0] if str(e) else ""
            line = f"criterion {n:>2}: FAIL  {title}  [{dt:.2f}s] {type(e).__name__}: {msg}"
            lines.append(line)
            print(line)
            raise
        dt = time.perf_counter() - t0
        budget = f" / {budget_s:g}s" if budget_s else ""
        if budget_s and dt > budget_s:
            line = f"criterion {n:>2}: FAIL  {title}  [{dt:.2f}s{budget}] over time budget"
            lines.append(line)
            print(line)
            pytest.fail(line)
        line = f"criterion {n:>2}: PASS  {title}  [{dt:.2f}s{budget}]"
        lines.append(line)
        print(line)

    return run


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
