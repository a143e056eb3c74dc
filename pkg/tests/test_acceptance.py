"""The acceptance gate: every criterion at its stated tolerance.

Runs with the standard configuration (q = 3, prec = 200 exponent units
at ramification 8, slack 10, fixed seed).  Criterion runtimes print with
pytest -s; the full file takes on the order of half a minute.
"""

import pytest

from tmotive.acceptance import run_criterion
from tmotive.config import Config

CFG = Config()

NAMES = {
    1: "base-point coefficients vs closed form",
    2: "period valuation and root residuals",
    3: "exponential functional equation",
    4: "first-order slope of the lattice map",
    5: "diagram commutes on random members",
    6: "stabilizer fixes the base point; action composes",
    7: "isomorphism pipeline end to end",
    8: "precision soundness of every pipeline output",
    9: "negative controls",
}


@pytest.mark.parametrize("number", sorted(NAMES))
def test_criterion(number):
    res = run_criterion(number, CFG)
    print(res.line())
    assert res.passed, f"criterion {number} failed: {res.details}"
