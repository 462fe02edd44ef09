import pytest

from clam import presets
from clam.estimator import ClamOperator
from clam.windows import BaseWindow, build_window_set

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def cubic():
    return presets.preset_cubic()


@pytest.fixture(scope="session")
def parabola():
    return presets.preset_parabola()


@pytest.fixture(scope="session")
def cubic_hann(cubic):
    ap, _ = cubic
    return build_window_set(BaseWindow("hann"), ap)


@pytest.fixture(scope="session")
def cubic_op(cubic, cubic_hann):
    ap, g = cubic
    return ClamOperator(ap, g, cubic_hann)


@pytest.fixture(scope="session")
def parabola_op(parabola):
    ap, g = parabola
    return ClamOperator(ap, g, build_window_set(BaseWindow("hann"), ap))


@pytest.fixture
def acceptance_report(request):
    """Record a PASS/FAIL line for the terminal summary, then assert."""

    def report(ok, detail):
        name = request.node.name
        ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
        print(ACCEPTANCE_LINES[-1])
        assert ok, detail

    return report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
