import pytest

_CRITERIA = []


@pytest.fixture
def criterion():
    """Record one acceptance line: ``criterion(id, ok, detail)``; returns ``ok``."""
    def record(cid, ok, detail):
        _CRITERIA.append((cid, bool(ok), detail))
        return bool(ok)
    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for cid, ok, detail in _CRITERIA:
        tr.write_line(f"{'PASS' if ok else 'FAIL'}  [{cid}] {detail}")
