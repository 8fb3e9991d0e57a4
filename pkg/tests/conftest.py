import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20260825)


def random_primitives(rng, n=1, degenerate_every=0):
    """Admissible primitive states (8, n); optionally zero out tangential
    or full field components on a stride to hit eigensystem degeneracies."""
    w = np.empty((8, n))
    w[0] = rng.uniform(0.1, 5.0, n)
    w[1:4] = rng.uniform(-2.0, 2.0, (3, n))
    w[4] = rng.uniform(0.05, 5.0, n)
    w[5:8] = rng.uniform(-2.0, 2.0, (3, n))
    if degenerate_every:
        k = degenerate_every
        w[6:8, ::k] = 0.0
        w[5, 1::2 * k] = 0.0
        w[5:8, 2::3 * k] = 0.0
    return w
