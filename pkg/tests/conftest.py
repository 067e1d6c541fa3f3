import numpy as np
import pytest

from nmipf import ContingencyTable, margins

Z_TP = [[500, 500], [100, 900]]
Z_TA = [[500, 700], [100, 700]]
NM_OUT = [[520, 680], [80, 720]]
IPF_FOUR_ITER_ROUNDED = [[534, 665], [66, 735]]


@pytest.fixture
def z_tp():
    return ContingencyTable(Z_TP)


@pytest.fixture
def z_ta():
    return ContingencyTable(Z_TA)


@pytest.fixture
def ta_margins():
    return margins(Z_TA)


def random_ll_table(rng, shape, low=1, high=40, max_tries=10_000):
    """Random integer table whose Liu-Lu value is defined and strictly
    positive at every cut."""
    from nmipf import liu_lu_generalized
    from nmipf.errors import TableError

    for _ in range(max_tries):
        z = rng.integers(low, high, size=shape).astype(float)
        # push mass onto the diagonal band to favour positive association
        k = min(shape)
        z[np.arange(k), np.arange(k)] += rng.integers(0, 3 * high, size=k)
        try:
            ll = liu_lu_generalized(z).as_array()
        except TableError:
            continue
        if np.all(ll > 0):
            return ContingencyTable(z)
    raise RuntimeError("could not draw a table")


def random_targets(rng, shape, low=1.0, high=100.0):
    from nmipf import MarginTargets

    rows = rng.uniform(low, high, size=shape[0])
    cols = rng.uniform(low, high, size=shape[1])
    cols *= rows.sum() / cols.sum()
    return MarginTargets(rows, cols)
