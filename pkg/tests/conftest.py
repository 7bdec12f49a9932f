import numpy as np
import pytest

from dbkit.models import bessel_space, paley_wiener


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def pw1():
    return paley_wiener(1.0)


@pytest.fixture(scope="session")
def bessel0():
    return bessel_space(0, 1.0)


_ACCEPTANCE: list[str] = []


@pytest.fixture
def acceptance():
    """Record one line per acceptance criterion; printed again in the terminal summary."""

    def record(number: int, title: str, passed: bool, measured: str, seconds: float, budget: float):
        ok = passed and seconds < budget
        line = (f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {title}: {measured}; "
                f"{seconds:.2f} s (budget {budget:g} s)")
        print(line)
        _ACCEPTANCE.append(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)
