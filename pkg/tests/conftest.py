import pytest

_outcomes = {}
_titles = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(cid, title): acceptance criterion a test belongs to")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    cid, title = mark.args
    _titles[cid] = title
    ok = rep.passed or (rep.when != "call" and not rep.failed)
    if rep.when == "call" or rep.failed:
        _outcomes[cid] = _outcomes.get(cid, True) and ok


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(_outcomes, key=lambda c: int(c[2:])):
        status = "PASS" if _outcomes[cid] else "FAIL"
        terminalreporter.write_line(f"{status} {cid} {_titles[cid]}")
