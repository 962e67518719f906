import time

import pytest

# one line per acceptance criterion, printed at the end of the session
CRITERIA_LINES = {}


class Criterion:
    """Collects sub-check failures for one acceptance criterion."""

    def __init__(self, number, title, time_limit):
        self.number, self.title, self.time_limit = number, title, time_limit
        self.failures = []
        self.start = time.perf_counter()

    def check(self, ok, message):
        if not ok:
            self.failures.append(message)
        return ok

    def finish(self, detail=""):
        elapsed = time.perf_counter() - self.start
        self.check(elapsed < self.time_limit,
                   f"runtime {elapsed:.1f} s exceeds {self.time_limit:g} s")
        verdict = "PASS" if not self.failures else "FAIL"
        line = f"criterion {self.number:2d} {verdict}  {self.title} ({elapsed:.1f} s)"
        if detail:
            line += f"  {detail}"
        if self.failures:
            line += "  | " + "; ".join(self.failures[:5])
            if len(self.failures) > 5:
                line += f"; ... {len(self.failures) - 5} more"
        CRITERIA_LINES[self.number] = line
        print(line)
        assert not self.failures, "\n".join(self.failures)


@pytest.fixture
def criterion():
    return Criterion


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(CRITERIA_LINES):
        terminalreporter.write_line(CRITERIA_LINES[n])
