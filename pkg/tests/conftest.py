import time
from contextlib import contextmanager

import pytest

_CRITERIA: dict[int, str] = {}


@pytest.fixture
def criterion():
    """Context manager recording one PASS/FAIL line per acceptance criterion.

    The block's wall time is checked against ``limit`` seconds and counts as
    part of the verdict.
    """

    @contextmanager
    def record(number: int, title: str, limit: float | None = None):
        start = time.perf_counter()
        detail = {"note": ""}
        try:
            yield detail
            elapsed = time.perf_counter() - start
            if limit is not None:
                assert elapsed < limit, f"runtime {elapsed:.1f}s exceeds {limit:.0f}s"
        except BaseException as exc:
            elapsed = time.perf_counter() - start
            _CRITERIA[number] = f"FAIL  criterion {number}: {title} ({elapsed:.1f}s) :: {exc}"
            print(_CRITERIA[number])
            raise
        note = f" :: {detail['note']}" if detail["note"] else ""
        _CRITERIA[number] = f"PASS  criterion {number}: {title} ({elapsed:.1f}s){note}"
        print(_CRITERIA[number])

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        terminalreporter.write_line(_CRITERIA[number])
