from fractions import Fraction as F

import pytest
from hypothesis import settings

from gabor_multipliers import Mat2

settings.register_profile("ci", deadline=None, max_examples=60)
settings.load_profile("ci")

# the exact-certificate suite, keyed by expected type label
EXACT_SUITE = {
    "I": Mat2.diag(1, F(3, 2)),
    "II(b)": Mat2.diag(F(3, 2), F(5, 2)),
    "II(a)": Mat2.diag(2, 3),
    "III": Mat2.diag(1, 1),
    "IV(b)": Mat2.of([[F(3, 2), 1], [0, F(3, 2)]]),
    "V": Mat2.of([[1, 1], [0, 1]]),
    "IX(a)": Mat2.diag(F(2, 3), F(3, 2)),
    "IX(d)": Mat2.diag(F(1, 2), 2),
    "X(b)": Mat2.of([[1, 1], [-1, 1]]),
}

PAIRS = [(1, 1), (1, 2), (2, 1), (2, 2)]


@pytest.fixture(scope="session")
def exact_suite():
    return EXACT_SUITE
