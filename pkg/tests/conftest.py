"""Collects one pass/fail line per acceptance criterion for the terminal summary."""

import pytest

CRITERIA = {
    1: "accounting identity",
    2: "decision rule matches the oracle",
    3: "stable-world convergence",
    4: "estimator ordering",
    5: "changing-world adaptation",
    6: "reset false-positive ordering",
    7: "policy relationships",
    8: "regression oracles",
    9: "isolation-forest oracle",
    10: "determinism",
}
_outcomes = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or (rep.when != "call" and not rep.failed):
        return
    n = marker.args[0]
    detail = "; ".join(v for k, v in item.user_properties if k == "detail")
    ok = rep.passed and _outcomes.get(n, (True, ""))[0]
    _outcomes[n] = (ok, detail or _outcomes.get(n, (True, ""))[1])


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(CRITERIA):
        if n not in _outcomes:
            continue
        ok, detail = _outcomes[n]
        line = f"criterion {n:>2} {CRITERIA[n]}: {'PASS' if ok else 'FAIL'}"
        terminalreporter.write_line(line + (f" ({detail})" if detail else ""))
