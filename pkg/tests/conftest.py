import itertools

import numpy as np
import pytest

from ttlab.metric_core import validate_metric


def random_metric(rng, n, kind="euclid"):
    """Random valid metric: planar points or a random weighted path-graph closure."""
    if kind == "euclid":
        P = rng.random((n, 2))
        D = np.hypot(*(P[:, None] - P[None]).transpose(2, 0, 1))
        return validate_metric(D)
    W = rng.uniform(0.5, 2.0, (n, n))
    W = (W + W.T) / 2
    np.fill_diagonal(W, 0)
    for k in range(n):
        W = np.minimum(W, W[:, k, None] + W[None, k, :])
    return validate_metric(W)


def brute_gh(dX, dY):
    """Half the least distortion over every relation covering both sides."""
    nx, ny = len(dX), len(dY)
    cells = list(itertools.product(range(nx), range(ny)))
    best = np.inf
    for mask in range(1, 1 << len(cells)):
        pairs = [cells[b] for b in range(len(cells)) if mask >> b & 1]
        if {i for i, _ in pairs} != set(range(nx)) or {j for _, j in pairs} != set(range(ny)):
            continue
        xi = [i for i, _ in pairs]
        yi = [j for _, j in pairs]
        dis = np.abs(np.asarray(dX)[np.ix_(xi, xi)] - np.asarray(dY)[np.ix_(yi, yi)]).max()
        best = min(best, dis)
    return 0.5 * best


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES: list[str] = []


def record_criterion(number: int, ok: bool, detail: str) -> None:
    line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
