"""End-to-end acceptance criteria C1-C11, one PASS/FAIL line each.

Limits are restated here rather than read from the library so that a
loosened threshold in the package cannot pass silently.  Checks that
combine several sub-criteria report the worst error divided by its own
limit, so their limit is 1.
"""

import math

import pytest

from helmholtz_ermakov.selfcheck import CHECKS

LIMITS = {
    "C1": (1e-8, 1.0),
    "C2": (1.0, 5.0),
    "C3": (1.0, math.inf),
    "C4": (1e-10, math.inf),
    "C5": (1.0, math.inf),
    "C6": (1.0, math.inf),
    "C7": (1e-6, math.inf),
    "C8": (1e-6, math.inf),
    "C9": (1e-8, math.inf),
    "C10": (1.0, math.inf),
    "C11": (0.02, math.inf),
}


def test_every_criterion_is_covered():
    assert list(CHECKS) == list(LIMITS)


@pytest.mark.parametrize("key", list(LIMITS))
def test_criterion(key, capsys):
    result = CHECKS[key]()
    limit, time_limit = LIMITS[key]
    assert (result.limit, result.time_limit) == (limit, time_limit)
    passed = result.error <= limit and result.seconds <= time_limit
    with capsys.disabled():
        print(f"\n{result.line()}")
    assert passed, result.line()
