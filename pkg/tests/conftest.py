import pytest

_RESULTS = pytest.StashKey[dict]()


class AcceptanceLog:
    def __init__(self, store):
        self.store = store

    def record(self, number, title, checks):
        """``checks`` is a list of (label, passed, detail); returns the failing ones."""
        failed = [c for c in checks if not c[1]]
        self.store[number] = (title, not failed, failed)
        return failed


@pytest.fixture
def acceptance(request):
    return AcceptanceLog(request.config.stash.setdefault(_RESULTS, {}))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = config.stash.get(_RESULTS, {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        title, ok, failed = results[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'} {title}")
        for label, _, detail in failed:
            terminalreporter.write_line(f"    failed: {label}" + (f" ({detail})" if detail else ""))
