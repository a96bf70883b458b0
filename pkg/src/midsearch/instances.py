"""Benchmark instance generators and reductions to matrix games."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParams, RejectionLimit, SkewViolation
from .game import GameMatrix, NoiseModel, psne_exact

REJECTION_ATTEMPTS = 100_000


@dataclass(frozen=True)
class AHardParams:
    """Parameters of the d x d adversarial block family.

    The instance has its saddle at (0, 0) with one gap equal to
    ``delta_min`` in the first row and first column, the remaining first
    row/column gaps equal to ``beta``, and a cyclic-dominance lower block
    that lures self-play learners toward entry (1, 1).
    """

    d: int
    delta_min: float
    beta: float

    def __post_init__(self):
        if self.d < 3:
            raise InvalidParams("a-hard requires d >= 3")
        # delta_min == beta is allowed: the saddle stays strict and the
        # benchmark sweeps include that corner.
        if not 0.0 < self.delta_min <= self.beta:
            raise InvalidParams("a-hard requires 0 < delta_min <= beta")
        if self.beta > 0.5:
            raise InvalidParams("a-hard requires beta <= 0.5 to keep entries in [0, 1]")

    def h1(self) -> float:
        """Benchmark-reference hardness used to size budgets (e.g. T = 50 * h1).

        This is the closed form (d-2)/beta^2 + 1/delta_min^2, i.e. the
        one-sided count over a single arm of the underlying dueling
        instance.  The two-sided statistic of ``hardness_stats`` is exactly
        twice this value.
        """
        return (self.d - 2) / self.beta**2 + 1.0 / self.delta_min**2


def make_a_hard(params: AHardParams) -> GameMatrix:
    """Build the adversarial d x d instance with Bernoulli observations."""
    d, dm, b = params.d, params.delta_min, params.beta
    a = np.empty((d, d))
    # lower-right (d-1) x (d-1) block: 0.5 on the diagonal, 1 above, 0 below
    block = np.where(
        np.eye(d - 1, dtype=bool), 0.5, np.triu(np.ones((d - 1, d - 1)), k=1)
    )
    a[1:, 1:] = block
    a[0, 0] = 0.5
    a[0, 1] = 0.5 + dm
    a[0, 2:] = 0.5 + b
    a[1, 0] = 0.5 - dm
    a[2:, 0] = 0.5 - b
    tags = ("a-hard", f"d={d}", f"delta_min={dm}", f"beta={b}", "dueling")
    return GameMatrix(entries=a, noise=NoiseModel(kind="bernoulli"), tags=tags)


@dataclass(frozen=True)
class DuelingInstance:
    """A K x K preference matrix: p[i, j] is the chance that i beats j."""

    p: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "p", np.asarray(self.p, dtype=np.float64))
        if self.p.ndim != 2 or self.p.shape[0] != self.p.shape[1]:
            raise InvalidParams("preference matrix must be square")
        if np.any(self.p < 0.0) or np.any(self.p > 1.0):
            raise InvalidParams("preference probabilities must lie in [0, 1]")
        if np.max(np.abs(self.p + self.p.T - 1.0)) > 1e-12:
            raise SkewViolation("p[i, j] + p[j, i] must equal 1")

    @property
    def k(self) -> int:
        return self.p.shape[0]


def dueling_to_game(inst: DuelingInstance) -> GameMatrix:
    """Interpret duels as a matrix game: a query of (i, j) plays one duel.

    The winner indicator of the duel is exactly a Bernoulli observation of
    p[i, j].  The mirrored entry (j, i) is not credited; one duel is one
    sample, same accounting as every other instance.
    """
    return GameMatrix(
        entries=inst.p.copy(), noise=NoiseModel(kind="bernoulli"), tags=("dueling",)
    )


def mab_to_game(means) -> GameMatrix:
    """Embed an n-armed bandit as an n x 1 game (column player has no move)."""
    means = np.asarray(means, dtype=np.float64).reshape(-1, 1)
    return GameMatrix(entries=means, noise=NoiseModel(kind="gaussian", sigma=1.0), tags=("mab",))


def make_random_strict(n: int, m: int, seed=0) -> GameMatrix:
    """Rejection-sample a uniform matrix until it has a strict saddle.

    Entries are iid uniform on [-1, 1].  Deterministic per seed.  The
    acceptance probability decays fast with size (n! m! / (n+m-1)!), so this
    is meant for small test instances; larger sizes hit RejectionLimit.
    """
    if n < 1 or m < 1:
        raise InvalidParams("n and m must be positive")
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    for _ in range(REJECTION_ATTEMPTS):
        a = rng.uniform(-1.0, 1.0, size=(n, m))
        p = psne_exact(a)
        if p is not None and p.strict:
            return GameMatrix(entries=a, noise=NoiseModel(kind="gaussian", sigma=1.0))
    raise RejectionLimit(
        f"no strict saddle found in {REJECTION_ATTEMPTS} attempts for {n}x{m}"
    )
