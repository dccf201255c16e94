import functools

import pytest

from hypstab import harness


@functools.lru_cache(maxsize=None)
def cached_table(table_id: int):
    return harness.reproduce_table(table_id)


@functools.lru_cache(maxsize=None)
def cached_figure(fig_id: int):
    return harness.figure_data(fig_id)


@pytest.fixture(scope="session")
def table():
    return cached_table


@pytest.fixture(scope="session")
def figure():
    return cached_figure


# criterion number -> (passed, detail), filled by the acceptance tests
VERDICTS = {}
N_CRITERIA = 10


@pytest.fixture
def verdict():
    def record(n: int, ok: bool, detail: str) -> bool:
        VERDICTS[n] = (bool(ok), detail)
        print(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
        return bool(ok)
    return record


def pytest_terminal_summary(terminalreporter):
    ran = any(getattr(r, "nodeid", "").startswith("tests/test_acceptance.py")
              or "test_acceptance.py" in getattr(r, "nodeid", "")
              for reps in terminalreporter.stats.values() for r in reps)
    if not ran:
        return
    terminalreporter.section("acceptance criteria")
    for n in range(1, N_CRITERIA + 1):
        ok, detail = VERDICTS.get(n, (False, "not evaluated (test errored or was deselected)"))
        terminalreporter.write_line(f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
