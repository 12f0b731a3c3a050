"""Acceptance gate: the ten numbered verification criteria at full budget.

Each test runs one criterion through the same verification battery the CLI
exposes (aloha-ge verify) and reports a single machine-greppable line in the
terminal summary:

    ACCEPTANCE <n> (<name>): PASS|FAIL -- <detail>

The suite is intentionally heavier than the unit tests (full Monte-Carlo
budgets); expect it to dominate the total test runtime.
"""

import pytest

from aloha_ge.verify import run_check

CRITERIA = list(range(1, 11))


@pytest.mark.parametrize("criterion", CRITERIA)
def test_acceptance_criterion(criterion, acceptance_report):
    result = run_check(criterion, budget="full")
    flag = "PASS" if result.passed else "FAIL"
    line = (
        f"ACCEPTANCE {result.criterion} ({result.name}): {flag} "
        f"-- {result.detail} [{result.seconds:.1f}s]"
    )
    print(line)
    acceptance_report(line)
    assert result.passed, (
        f"criterion {result.criterion} ({result.name}) failed: {result.detail}"
    )
