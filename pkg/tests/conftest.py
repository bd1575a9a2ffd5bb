import contextlib
import time

import pytest

_ACCEPTANCE: dict[int, tuple[str, str, float]] = {}


@pytest.fixture
def acceptance():
    """Record one pass/fail line per acceptance criterion."""

    @contextlib.contextmanager
    def criterion(number: int, title: str):
        t0 = time.perf_counter()
        try:
            yield
        except BaseException:
            _ACCEPTANCE[number] = ("FAIL", title, time.perf_counter() - t0)
            raise
        _ACCEPTANCE[number] = ("PASS", title, time.perf_counter() - t0)

    return criterion


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        status, title, secs = _ACCEPTANCE[number]
        terminalreporter.write_line(f"AC{number:<3} {status}  {title}  ({secs:.2f}s)")
