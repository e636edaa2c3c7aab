import pytest

from clustersync import _backend

ACCEPTANCE_RESULTS = []

BACKENDS = _backend.available_backends()


@pytest.fixture
def record_criterion():
    """Store one acceptance verdict line; the terminal summary prints them all."""

    def record(number, title, passed, detail):
        ACCEPTANCE_RESULTS.append((number, title, bool(passed), detail))
        return passed

    return record


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, passed, detail in sorted(ACCEPTANCE_RESULTS):
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{status}] criterion {number}: {title} -- {detail}")
