import pytest


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")
    config._criteria = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when != "call" and not (report.when == "setup" and report.failed):
        return
    detail = dict(item.user_properties).get("detail", "")
    if report.failed and not detail:
        detail = str(call.excinfo.value).splitlines()[0] if call.excinfo else ""
    item.config._criteria.append(
        (marker.args[0], marker.args[1], "PASS" if report.passed else "FAIL", detail, call.duration)
    )


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    rows = config._criteria
    if not rows:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, verdict, detail, seconds in rows:
        terminalreporter.write_line(f"[{verdict}] criterion {number}: {title} ({seconds:.1f} s) {detail}")
