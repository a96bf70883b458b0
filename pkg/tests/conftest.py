import numpy as np
import pytest

from midsearch.game import GameMatrix, NoiseModel


def brute_force_psne(a):
    """Independent double-loop column-max / row-min checker."""
    a = np.asarray(a)
    n, m = a.shape
    for i in range(n):
        for j in range(m):
            col_max = True
            strict = True
            for k in range(n):
                if k == i:
                    continue
                if a[k, j] > a[i, j]:
                    col_max = False
                if a[k, j] == a[i, j]:
                    strict = False
            row_min = True
            for k in range(m):
                if k == j:
                    continue
                if a[i, k] < a[i, j]:
                    row_min = False
                if a[i, k] == a[i, j]:
                    strict = False
            if col_max and row_min:
                return (i, j, strict)
    return None


def planted_strict(n, m, rng, noise_kind="zero"):
    """Random matrix with a saddle forced at a random position.

    Rejection sampling is hopeless past ~10x10, so larger test matrices
    plant the saddle: the equilibrium value sits strictly above its column
    and strictly below its row, everything else free.
    """
    i = int(rng.integers(n))
    j = int(rng.integers(m))
    a = rng.uniform(-1.0, 1.0, size=(n, m))
    v = rng.uniform(-0.4, 0.4)
    a[i, j] = v
    margin = 0.02
    if n > 1:
        col = rng.uniform(-1.0, v - margin, size=n)
        col[i] = v
        a[:, j] = col
    if m > 1:
        row = rng.uniform(v + margin, 1.0, size=m)
        row[j] = v
        a[i, :] = row
    a[i, j] = v
    return GameMatrix(entries=a, noise=NoiseModel(kind=noise_kind)), (i, j)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
