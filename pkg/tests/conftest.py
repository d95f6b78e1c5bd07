import pytest

ACCEPTANCE_KEY = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[ACCEPTANCE_KEY] = {}


@pytest.fixture
def record(request):
    """Store one acceptance verdict line: ``record(number, ok, detail)``."""
    results = request.config.stash[ACCEPTANCE_KEY]

    def _record(number: int, ok: bool, detail: str) -> None:
        results[number] = (bool(ok), detail)

    return _record


def pytest_terminal_summary(terminalreporter, config):
    results = config.stash.get(ACCEPTANCE_KEY, {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        ok, detail = results[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}")
