import numpy as np
import pytest

from arrivaltimes.wavepacket import GaussianSpec, MomentumAmplitude


@pytest.fixture(scope="session")
def paper_spec():
    return GaussianSpec(x0=-50.0, dx=10.0, v0=1.0)


@pytest.fixture(scope="session")
def paper_amp(paper_spec):
    return MomentumAmplitude.from_gaussian(paper_spec)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def criterion():
    """Record one pass/fail line; the lines are repeated in the terminal summary."""
    def record(number, name, ok, measured, started):
        import time
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2} {name}: {measured} ({time.perf_counter() - started:.1f} s)"
        print(line)
        ACCEPTANCE_LINES.append(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2])):
            terminalreporter.write_line(line)
