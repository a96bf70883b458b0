"""Robust near-median value estimation for a set of noisy arms.

Both routines repeatedly subsample arms with replacement, estimate each
subsampled arm's mean, take an order statistic one third from the edge, and
return the median of those statistics across repetitions.  With means sorted
descending, the column variant lands in [mu_{n/2} - eps, mu_{n/4+1} + eps]
with probability 1 - delta; the row variant mirrors it from below.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EmptyArmSet
from .game import SamplingOracle


@dataclass(frozen=True)
class MidValConfig:
    """Derived constants for one quantile-estimation call.

    ``ell`` outer repetitions, ``k`` arms per subsample (rounded up to a
    multiple of 3 so the order-statistic index ``z = k/3 + 1`` is an
    integer), ``per_arm_pulls`` pulls for each subsampled arm slot.
    """

    ell: int
    k: int
    z: int
    per_arm_pulls: int
    delta1: float = 0.05
    delta2: float = 0.05

    @classmethod
    def from_params(cls, epsilon: float, delta: float, delta1: float = 0.05, delta2: float = 0.05):
        if epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if not 0 < delta < 1:
            raise ValueError("delta must lie in (0, 1)")
        ell = math.ceil(14.0 * math.log(1.0 / delta))
        k = math.ceil(108.0 * math.log(4.0 / delta2))
        k += -k % 3
        z = k // 3 + 1
        per_arm = math.ceil(2.0 * math.log(2.0 * k / delta1) / epsilon**2)
        return cls(ell=ell, k=k, z=z, per_arm_pulls=per_arm, delta1=delta1, delta2=delta2)

    @property
    def budget(self) -> int:
        """Exact number of oracle samples one call consumes."""
        return self.ell * self.k * self.per_arm_pulls


def _as_arm_arrays(arms):
    arr = np.asarray(arms, dtype=np.intp)
    if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] == 0:
        raise EmptyArmSet("arms must be a nonempty sequence of (row, col) pairs")
    return arr[:, 0], arr[:, 1]


def _midval(oracle: SamplingOracle, arms, epsilon, delta, rng, highest: bool) -> float:
    rows, cols = _as_arm_arrays(arms)
    if rng is None:
        rng = oracle.spawn_rng()
    cfg = MidValConfig.from_params(epsilon, delta)
    idx = rng.integers(0, rows.shape[0], size=(cfg.ell, cfg.k))
    means = oracle.sample_mean_many(
        rows[idx].ravel(), cols[idx].ravel(), cfg.per_arm_pulls
    ).reshape(cfg.ell, cfg.k)
    if highest:
        pos = cfg.k - cfg.z  # z-th highest in ascending order
    else:
        pos = cfg.z - 1  # z-th lowest
    stat = np.partition(means, pos, axis=1)[:, pos]
    return float(np.median(stat))


def cmidval(arms, epsilon: float, delta: float, oracle: SamplingOracle, rng=None) -> float:
    """Value near the upper-middle of the arm means (z-th highest statistic)."""
    return _midval(oracle, arms, epsilon, delta, rng, highest=True)


def rmidval(arms, epsilon: float, delta: float, oracle: SamplingOracle, rng=None) -> float:
    """Mirror of :func:`cmidval` using the z-th lowest statistic."""
    return _midval(oracle, arms, epsilon, delta, rng, highest=False)
