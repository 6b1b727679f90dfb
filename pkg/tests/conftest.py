"""Shared fixtures for the test suite.

The (n1=20, n2=30, w1=0.3) design and its observed estimate u=0.03
(k1=2, k2=0) appear throughout: they are the reference design whose
frozen interval values anchor the worked-example tests.
"""

import pytest

from binmix import Model


@pytest.fixture(scope="session")
def model2030():
    """Reference design: two samples of 20 and 30 trials, weight 0.3."""
    return Model(20, 30, 0.3)


@pytest.fixture(scope="session")
def tiny_model():
    """Smallest design used for exhaustive/brute-force comparisons."""
    return Model(2, 3, 0.4)
