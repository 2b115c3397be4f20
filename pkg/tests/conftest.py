import numpy as np
import pytest

from instanton_lab.algebra import GF
from instanton_lab.geometry import ProjPoint
from instanton_lab.monad import find_symplectic, special_thooft_monad
from instanton_lab.net import hypernet_from_monad, net_at_point, theta_section_spaces


@pytest.fixture(scope="session")
def f7():
    return GF(7)


@pytest.fixture(scope="session")
def f101():
    return GF(101)


@pytest.fixture(scope="session")
def thooft7(f7):
    return special_thooft_monad(5, f7)


@pytest.fixture(scope="session")
def thooft101(f101):
    return special_thooft_monad(5, f101)


@pytest.fixture(scope="session")
def symplectic101(thooft101):
    return find_symplectic(thooft101)


@pytest.fixture(scope="session")
def hypernet101(thooft101, symplectic101):
    return hypernet_from_monad(thooft101, symplectic101)


@pytest.fixture(scope="session")
def generic_point101(f101):
    return ProjPoint(f101, [1, 5, 17, 33])


@pytest.fixture(scope="session")
def net101(hypernet101, generic_point101):
    return net_at_point(hypernet101, generic_point101)


@pytest.fixture(scope="session")
def spaces101(net101):
    return theta_section_spaces(net101)


@pytest.fixture
def rng():
    return np.random.default_rng(20261015)


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def criterion(request):
    """Record one PASS/FAIL line per acceptance criterion."""
    number = request.node.get_closest_marker("criterion").args[0]
    title = request.node.function.__doc__.strip().splitlines()[0]
    yield
    failed = getattr(request.node, "rep_call", None)
    verdict = "FAIL" if failed is None or failed.failed else "PASS"
    line = f"{verdict} criterion {number:>2}: {title}"
    ACCEPTANCE_LINES.append(line)
    print(f"\n{line}")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): numbered acceptance criterion")
