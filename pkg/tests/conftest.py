import time

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "repo",
    deadline=None,
    derandomize=True,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("repo")

_CRITERIA: list[tuple[int, str, float, float, str]] = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title, bound_s): acceptance criterion with a runtime bound")
    config.addinivalue_line("markers", "invariant: property-test bullet rerun by the invariance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or call.when != "call":
        return
    number, title, bound = marker.args
    status = "PASS" if report.passed else "FAIL"
    if report.passed and call.duration > bound:
        status = "FAIL"
        report.outcome = "failed"
        report.longrepr = f"criterion {number} took {call.duration:.1f}s, bound {bound:.0f}s"
    _CRITERIA.append((number, title, call.duration, bound, status))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, elapsed, bound, status in sorted(_CRITERIA):
        terminalreporter.write_line(f"[{status}] criterion {number:2d}: {title} ({elapsed:.1f}s / {bound:.0f}s)")


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def stopwatch():
    t0 = time.perf_counter()
    return lambda: time.perf_counter() - t0
