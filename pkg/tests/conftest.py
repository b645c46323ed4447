"""Shared test configuration.

Collects the outcome of every test in test_acceptance.py and prints a
one-line PASS/FAIL summary per criterion at the end of the run, so the
acceptance status is readable without scrolling through the full log.
"""

import pytest

_ACCEPTANCE_RESULTS = {}

_CRITERION_LABELS = {
    "test_criterion_1": "criterion 1 (counterexample reproduction)",
    "test_criterion_2": "criterion 2 (pinned 5x5 operator-norm constants)",
    "test_criterion_3": "criterion 3 (theorem suite, 200 instances)",
    "test_criterion_4": "criterion 4 (structural invariants, 100 instances)",
    "test_criterion_5_desk": "criterion 5 (figure sweeps, desk scale)",
    "test_criterion_5_paper": "criterion 5 (figure sweeps, paper scale)",
    "test_criterion_6": "criterion 6 (expectation bound, informational)",
    "test_criterion_7": "criterion 7 (oracle equivalence)",
}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if report.when != "call" or "test_acceptance" not in item.nodeid:
        return
    for prefix, label in _CRITERION_LABELS.items():
        if item.name.startswith(prefix):
            _ACCEPTANCE_RESULTS[label] = report.outcome
            break


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE_RESULTS:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for label in _CRITERION_LABELS.values():
        outcome = _ACCEPTANCE_RESULTS.get(label)
        if outcome is None:
            continue
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"[ACCEPTANCE] {label}: {status}")
