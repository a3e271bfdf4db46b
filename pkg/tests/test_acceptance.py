"""The acceptance gate: every criterion at its stated tolerance.

Each test prints one PASS/FAIL line with the measured quantities (visible
with ``pytest -s`` or on failure) and asserts the criterion's verdict.
"""

import pytest

from ambiclt import acceptance

IDS = [entry[0] for entry in acceptance.CRITERIA]
DESCRIPTIONS = {entry[0]: entry[1] for entry in acceptance.CRITERIA}


@pytest.mark.parametrize("cid", IDS)
def test_criterion(cid):
    result = acceptance.run_criterion(cid)
    status = "PASS" if result.passed else "FAIL"
    print(f"{status} criterion {cid}: {DESCRIPTIONS[cid]} "
          f"[{result.detail}] ({result.runtime:.1f}s)")
    assert result.passed, f"criterion {cid}: {result.detail}"
