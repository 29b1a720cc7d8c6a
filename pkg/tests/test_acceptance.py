"""Acceptance criteria 1 to 12, each at exact equality; one summary line per criterion."""
import pytest

from relspace.acceptance import CRITERIA, CRITERIA_NAMES

from conftest import ACCEPTANCE_LINES


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number):
    result = CRITERIA[number]()
    status = "PASS" if result["passed"] else "FAIL"
    line = f"criterion {number}: {status} ({CRITERIA_NAMES[number]}, {result['seconds']:.2f}s)"
    ACCEPTANCE_LINES[number] = line
    print("\n" + line)
    assert result["passed"], result["details"]
