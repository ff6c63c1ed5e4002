import pytest

from dlmnet.experiments import COARSE_SCHEDULE, FINE_SCHEDULE, ExperimentConfig, run_cnot_schedule

ACCEPTANCE_SEED = 0


@pytest.fixture(scope="session")
def coarse_reports():
    cfg = ExperimentConfig(alpha=0.99, seed=ACCEPTANCE_SEED, discard_fraction=0.5)
    return run_cnot_schedule(cfg, COARSE_SCHEDULE)


@pytest.fixture(scope="session")
def fine_reports():
    cfg = ExperimentConfig(alpha=0.999, seed=ACCEPTANCE_SEED, discard_fraction=0.5)
    return run_cnot_schedule(cfg, FINE_SCHEDULE)



_CRITERIA: list[tuple[str, bool, str]] = []


@pytest.fixture
def record_criterion():
    """Record one acceptance verdict; printed now and again in the terminal summary."""

    def record(name: str, passed: bool, detail: str) -> None:
        line = f"{'PASS' if passed else 'FAIL'}  {name}: {detail}"
        _CRITERIA.append((name, passed, detail))
        print(line)

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in _CRITERIA:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {name}: {detail}")
