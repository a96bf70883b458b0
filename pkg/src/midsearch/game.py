"""Hidden payoff matrices, noise models, and the counting sample oracle.

All indices in this package are 0-based.  Command-line reports and file
formats that face the user convert to 1-based on the way out.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import InvalidParams, NoStrictPSNE

NOISE_KINDS = ("zero", "gaussian", "bernoulli")

# integer codes shared with the jit kernels
NOISE_CODE = {"zero": 0, "gaussian": 1, "bernoulli": 2}


@dataclass(frozen=True)
class NoiseModel:
    """Observation noise attached to a matrix.

    ``gaussian`` adds N(0, sigma^2) with sigma <= 1 so observations stay
    1-sub-Gaussian.  ``bernoulli`` replaces the observation with a coin flip
    of success probability equal to the entry (entries must lie in [0, 1];
    a centered Bernoulli is 1/2-sub-Gaussian, so the same contract holds).
    """

    kind: str = "gaussian"
    sigma: float = 1.0

    def __post_init__(self):
        if self.kind not in NOISE_KINDS:
            raise InvalidParams(f"unknown noise kind {self.kind!r}")
        if self.kind == "gaussian" and not 0.0 <= self.sigma <= 1.0:
            raise InvalidParams("gaussian sigma must lie in [0, 1]")


@dataclass
class GameMatrix:
    """An n x m payoff matrix with entries in [-1, 1] plus its noise model.

    The row player receives ``entries[i, j]`` and maximizes; the column
    player pays it and minimizes.  Algorithms never touch ``entries``
    directly; they observe it through a :class:`SamplingOracle`.
    """

    entries: np.ndarray
    noise: NoiseModel = field(default_factory=NoiseModel)
    tags: tuple = ()

    def __post_init__(self):
        self.entries = np.asarray(self.entries, dtype=np.float64)
        if self.entries.ndim != 2 or self.entries.size == 0:
            raise InvalidParams("entries must be a nonempty 2-D array")
        if np.any(np.abs(self.entries) > 1.0):
            raise InvalidParams("entries must lie in [-1, 1]")
        if self.noise.kind == "bernoulli" and (
            np.any(self.entries < 0.0) or np.any(self.entries > 1.0)
        ):
            raise InvalidParams("bernoulli noise requires entries in [0, 1]")
        self.tags = tuple(self.tags)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def m(self) -> int:
        return self.entries.shape[1]


class Psne(NamedTuple):
    row: int
    col: int
    strict: bool


def psne_exact(matrix) -> Psne | None:
    """Exact saddle point of a known matrix: column max and row min.

    Accepts a :class:`GameMatrix` or a raw 2-D array.  Returns the
    lexicographically first entry that attains the maximum of its column and
    the minimum of its row, with ``strict=True`` when both are attained
    uniquely.  Returns ``None`` when no such entry exists.
    """
    a = matrix.entries if isinstance(matrix, GameMatrix) else np.asarray(matrix, dtype=np.float64)
    col_max = a.max(axis=0)
    row_min = a.min(axis=1)
    mask = (a == col_max[None, :]) & (a == row_min[:, None])
    if not mask.any():
        return None
    i, j = np.unravel_index(np.flatnonzero(mask.ravel())[0], a.shape)
    i, j = int(i), int(j)
    strict = (np.count_nonzero(a[:, j] == col_max[j]) == 1) and (
        np.count_nonzero(a[i, :] == row_min[i]) == 1
    )
    return Psne(i, j, strict)


def saddle_violation(a: np.ndarray) -> np.ndarray:
    """Per-entry distance from being a saddle: (colmax - a) + (a - rowmin).

    Zero exactly at saddle points.
    """
    a = np.asarray(a, dtype=np.float64)
    return (a.max(axis=0)[None, :] - a) + (a - a.min(axis=1)[:, None])


def empirical_saddle(a: np.ndarray) -> tuple[int, int, bool]:
    """Best saddle guess for an (empirical) matrix.

    Returns ``(row, col, degraded)`` where the entry minimizes the saddle
    violation, ties broken lexicographically.  ``degraded`` is True when the
    matrix has no exact saddle so the returned entry is only the least-bad
    candidate.
    """
    v = saddle_violation(a)
    flat = int(np.argmin(v.ravel()))
    i, j = np.unravel_index(flat, v.shape)
    return int(i), int(j), bool(v[i, j] > 0.0)


@dataclass(frozen=True)
class HardnessStats:
    """Gap structure of a matrix with a strict saddle point.

    ``h1`` is the sum of inverse squared gaps along the equilibrium column
    and row; ``delta_g`` the harmonic-average gap sqrt((n+m-2)/h1);
    ``delta_min`` the smallest nonzero gap.
    """

    psne: Psne
    row_gaps: np.ndarray  # length n, gap of entry (i, j*); zero at i*
    col_gaps: np.ndarray  # length m, gap of entry (i*, j); zero at j*
    h1: float
    delta_g: float
    delta_min: float
    strict: bool


def hardness_stats(matrix) -> HardnessStats:
    """Closed-form hardness statistics; raises for non-strict instances."""
    a = matrix.entries if isinstance(matrix, GameMatrix) else np.asarray(matrix, dtype=np.float64)
    p = psne_exact(a)
    if p is None or not p.strict:
        raise NoStrictPSNE("matrix has no strict pure-strategy saddle point")
    value = a[p.row, p.col]
    row_gaps = np.abs(a[:, p.col] - value)
    col_gaps = np.abs(a[p.row, :] - value)
    h1 = float(np.sum(1.0 / row_gaps[np.arange(a.shape[0]) != p.row] ** 2)
               + np.sum(1.0 / col_gaps[np.arange(a.shape[1]) != p.col] ** 2))
    n, m = a.shape
    delta_g = math.sqrt((n + m - 2) / h1) if n + m > 2 else math.inf
    nonzero = np.concatenate([row_gaps[row_gaps > 0], col_gaps[col_gaps > 0]])
    delta_min = float(nonzero.min()) if nonzero.size else math.inf
    return HardnessStats(
        psne=p,
        row_gaps=row_gaps,
        col_gaps=col_gaps,
        h1=h1,
        delta_g=delta_g,
        delta_min=delta_min,
        strict=True,
    )


class SamplingOracle:
    """Serves noisy observations of a hidden matrix and counts every query.

    One oracle owns one pseudorandom stream derived from its seed, so a
    fixed seed plus a fixed query sequence reproduces the observation
    sequence exactly.  Batched queries (``sample_mean`` with count > 1) draw
    the batch mean in one step using the exact distribution of the mean, so
    budgets in the billions stay cheap; a batch counts as one query event in
    the stream.

    Not safe for concurrent use; run one oracle per thread.
    """

    def __init__(self, matrix: GameMatrix, seed=0):
        self.matrix = matrix
        if isinstance(seed, np.random.SeedSequence):
            self._seed_seq = seed
        else:
            self._seed_seq = np.random.SeedSequence(seed)
        self.rng = np.random.default_rng(self._seed_seq)
        self.per_entry_counts = np.zeros(matrix.entries.shape, dtype=np.int64)
        self.total_count = 0
        self._kind = matrix.noise.kind
        self._sigma = matrix.noise.sigma

    @property
    def n(self) -> int:
        return self.matrix.n

    @property
    def m(self) -> int:
        return self.matrix.m

    def _check(self, i: int, j: int):
        if not (0 <= i < self.n and 0 <= j < self.m):
            raise IndexError(f"entry ({i}, {j}) outside {self.n}x{self.m} matrix")

    def sample(self, i: int, j: int) -> float:
        """One noisy observation of entry (i, j)."""
        self._check(i, j)
        mu = self.matrix.entries[i, j]
        if self._kind == "zero":
            x = mu
        elif self._kind == "gaussian":
            x = mu + self._sigma * self.rng.standard_normal()
        else:
            x = 1.0 if self.rng.random() < mu else 0.0
        self.per_entry_counts[i, j] += 1
        self.total_count += 1
        return float(x)

    def sample_mean(self, i: int, j: int, count: int) -> float:
        """Mean of ``count`` independent observations of entry (i, j)."""
        self._check(i, j)
        if count <= 0:
            raise ValueError("count must be positive")
        mu = self.matrix.entries[i, j]
        if self._kind == "zero":
            x = mu
        elif self._kind == "gaussian":
            x = mu + self._sigma / math.sqrt(count) * self.rng.standard_normal()
        else:
            x = self.rng.binomial(count, mu) / count
        self.per_entry_counts[i, j] += count
        self.total_count += int(count)
        return float(x)

    def sample_mean_many(self, rows, cols, counts) -> np.ndarray:
        """Vectorized batch means for parallel index arrays.

        ``counts`` may be a scalar or an array broadcastable to the index
        shape; every count must be positive.  Repeated (row, col) pairs get
        independent batches.
        """
        rows = np.asarray(rows, dtype=np.intp)
        cols = np.asarray(cols, dtype=np.intp)
        if rows.size == 0:
            return np.empty(0, dtype=np.float64)
        if rows.min() < 0 or rows.max() >= self.n or cols.min() < 0 or cols.max() >= self.m:
            raise IndexError("index outside matrix")
        counts = np.broadcast_to(np.asarray(counts, dtype=np.int64), rows.shape)
        if counts.min() <= 0:
            raise ValueError("counts must be positive")
        mu = self.matrix.entries[rows, cols]
        if self._kind == "zero":
            x = mu.copy()
        elif self._kind == "gaussian":
            x = mu + self._sigma / np.sqrt(counts) * self.rng.standard_normal(rows.shape)
        else:
            x = self.rng.binomial(counts, mu) / counts
        np.add.at(self.per_entry_counts, (rows, cols), counts)
        self.total_count += int(counts.sum())
        return x

    def noise_draws(self, t: int) -> np.ndarray:
        """Pre-draw per-round noise for a sequential kernel of ``t`` rounds.

        Zero noise yields zeros (additive), gaussian yields sigma-scaled
        normals (additive), bernoulli yields uniforms (round r observes
        1 if u[r] < entry else 0).  Consuming one value per round is exactly
        the single-query stream in batched form.
        """
        if self._kind == "zero":
            return np.zeros(t)
        if self._kind == "gaussian":
            return self._sigma * self.rng.standard_normal(t)
        return self.rng.random(t)

    def record_plays(self, counts: np.ndarray):
        """Fold per-entry play counts from a kernel back into the ledger."""
        counts = np.asarray(counts, dtype=np.int64)
        if counts.shape != self.per_entry_counts.shape:
            raise ValueError("counts shape mismatch")
        self.per_entry_counts += counts
        self.total_count += int(counts.sum())

    def spawn_rng(self) -> np.random.Generator:
        """Independent generator split off this oracle's seed."""
        return np.random.default_rng(self._seed_seq.spawn(1)[0])


# ---------------------------------------------------------------------------
# instance files


def matrix_to_dict(matrix: GameMatrix) -> dict:
    d = {
        "n": matrix.n,
        "m": matrix.m,
        "entries": [[float(x) for x in row] for row in matrix.entries],
        "noise": {"kind": matrix.noise.kind},
        "tags": list(matrix.tags),
    }
    if matrix.noise.kind == "gaussian":
        d["noise"]["sigma"] = matrix.noise.sigma
    return d


def matrix_from_dict(d: dict) -> GameMatrix:
    entries = np.asarray(d["entries"], dtype=np.float64)
    if entries.shape != (d["n"], d["m"]):
        raise InvalidParams("entries shape disagrees with n, m")
    noise_d = d.get("noise", {"kind": "gaussian", "sigma": 1.0})
    noise = NoiseModel(kind=noise_d["kind"], sigma=float(noise_d.get("sigma", 1.0)))
    return GameMatrix(entries=entries, noise=noise, tags=tuple(d.get("tags", ())))


def save_instance(matrix: GameMatrix, path):
    with open(path, "w") as f:
        json.dump(matrix_to_dict(matrix), f, indent=1)
        f.write("\n")


def load_instance(path) -> GameMatrix:
    with open(path) as f:
        return matrix_from_dict(json.load(f))
