import os
import sys

import pytest
from hypothesis import settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", max_examples=40, deadline=None, derandomize=True)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

_CRITERIA: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by the test")


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m is not None:
            num, title = m.args
            _CRITERIA.setdefault(num, {"title": title, "outcomes": []})


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    num = getattr(report, "criterion", None)
    if num is not None and num in _CRITERIA:
        _CRITERIA[num]["outcomes"].append((report.nodeid, report.outcome, report.duration))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    m = item.get_closest_marker("criterion")
    if m is not None:
        rep.criterion = m.args[0]


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for num in sorted(_CRITERIA):
        c = _CRITERIA[num]
        outs = c["outcomes"]
        if not outs:
            status = "NOT RUN"
        elif all(o == "passed" for _, o, _ in outs):
            status = "PASS"
        else:
            status = "FAIL"
        secs = sum(d for _, _, d in outs)
        tr.write_line(f"criterion {num:2d}: {status:7s} {c['title']} ({secs:.2f} s)")


@pytest.fixture(scope="session")
def default_reports():
    """One run of every registry experiment at its default settings."""
    from h2affine import experiments as ex
    return {name: ex.run_experiment(ex.default_spec(name)) for name, _, _ in ex.list_experiments()}
