import numpy as np
import pytest

from phimax.ifs import Affine, Box, IfsSystem, Poly1d


def cantor_system() -> IfsSystem:
    return IfsSystem(Box.unit(1), [Affine.scaling(1 / 3, [0.0]), Affine.scaling(1 / 3, [2 / 3])])


def sierpinski_system() -> IfsSystem:
    offsets = [[0.0, 0.0], [0.5, 0.0], [0.0, 0.5]]
    return IfsSystem(Box.unit(2), [Affine.scaling(0.5, v) for v in offsets])


def convex_pair_system() -> IfsSystem:
    return IfsSystem(Box.unit(1), [Affine.scaling(0.5, [0.0]), Poly1d([0.0, 0.0, 0.5], (0.0, 1.0))])


@pytest.fixture
def cantor():
    return cantor_system()


@pytest.fixture
def sierpinski():
    return sierpinski_system()


@pytest.fixture
def convex_pair():
    return convex_pair_system()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# one summary line per acceptance criterion, filled in by test_acceptance
ACCEPTANCE_RESULTS: dict[str, list[bool]] = {}


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    for mark in report.keywords:
        if mark.startswith("criterion_"):
            ACCEPTANCE_RESULTS.setdefault(mark, []).append(report.passed)


def pytest_configure(config):
    for k in range(1, 10):
        config.addinivalue_line("markers", f"criterion_{k}: acceptance criterion {k}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS, key=lambda s: int(s.split("_")[1])):
        results = ACCEPTANCE_RESULTS[key]
        status = "PASS" if all(results) else "FAIL"
        terminalreporter.write_line(
            f"{status} criterion {key.split('_')[1]}: {sum(results)}/{len(results)} checks passed"
        )
