"""Fixed-budget competitor identifiers: self-play learners, a
confidence-bound sampler, and uniform round-robin sampling.

The self-play baselines run two independent no-regret learners, one picking
rows to maximize reward and one picking columns to minimize it, each fed the
same noisy payoff mapped into [0, 1].  Their guess at any point is the
most-played row and column so far.  All per-round loops live in
``_kernels`` (numba by default, numpy fallback via MIDSEARCH_NO_NUMBA=1).

Checkpoint guesses for the sampling baselines follow the benchmark scoring
convention: the guess is the exact saddle of the empirical mean matrix and
is None when no exact saddle exists.  The run's ``final_guess`` is always a
concrete entry (the least-violating one, flagged degraded when it is not an
exact saddle).
"""

from __future__ import annotations

import numpy as np

from . import _kernels
from .errors import BudgetTooSmall, BudgetZero
from .game import NOISE_CODE, SamplingOracle, empirical_saddle, psne_exact
from .search import find_psne_heuristic
from .trajectory import AlgorithmRun, empty_run, normalize_checkpoints

LUCB_WARM_FRACTION = 5  # warm pulls per entry ~ budget / (5 n m)
LUCB_BATCH = 10  # contest pulls per candidate refresh


def _check_budget(budget: int):
    if budget < 0:
        raise BudgetZero("budget must be nonnegative")


def _selfplay_run(kernel, oracle, budget, checkpoints, rng):
    _check_budget(budget)
    if budget == 0:
        return empty_run()
    if rng is None:
        rng = oracle.spawn_rng()
    cps = normalize_checkpoints(checkpoints, budget)
    kind = NOISE_CODE[oracle.matrix.noise.kind]
    u_row = rng.random(budget)
    u_col = rng.random(budget)
    noise = oracle.noise_draws(budget)
    counts, _, _, cp_rows, cp_cols = kernel(
        oracle.matrix.entries, kind, u_row, u_col, noise, cps
    )
    oracle.record_plays(counts)
    guesses = [(int(r), int(c)) for r, c in zip(cp_rows, cp_cols)]
    final = guesses[-1] if guesses else None
    return AlgorithmRun(
        checkpoints=cps, guesses=guesses, samples_used=budget, final_guess=final
    )


def run_exp3ix_selfplay(
    oracle: SamplingOracle, budget: int, checkpoints=None, rng=None
) -> AlgorithmRun:
    """Two implicit-exploration exponential-weights learners in self-play.

    Anytime learning rate sqrt(ln K / (K t)) per learner with exploration
    bonus eta_t / 2.
    """
    return _selfplay_run(_kernels.exp3ix_run, oracle, budget, checkpoints, rng)


def run_tsallis_inf_selfplay(
    oracle: SamplingOracle, budget: int, checkpoints=None, rng=None
) -> AlgorithmRun:
    """Self-play with 1/2-Tsallis mirror descent learners.

    Learning rate 2/sqrt(t), reduced-variance importance-weighted losses;
    the per-round normalization is solved by safeguarded Newton/bisection
    to 1e-10.
    """
    return _selfplay_run(_kernels.tsallis_run, oracle, budget, checkpoints, rng)


def run_lucb_g(
    oracle: SamplingOracle, budget: int, delta: float = 0.1, checkpoints=None, rng=None
) -> AlgorithmRun:
    """Confidence-bound sampling until a saddle certifies or budget runs out.

    A warm phase spreads ~budget/5 samples round-robin so the empirical
    structure is meaningful, then each step samples the current least-
    violation candidate plus its strongest row and column challengers (by
    upper/lower confidence bounds with radius
    sqrt(2 ln(4 n m s^2 / delta) / s)).  Stops early when the candidate's
    bounds separate from every challenger.
    """
    _check_budget(budget)
    n, m = oracle.n, oracle.m
    if budget < n * m:
        raise BudgetTooSmall(f"budget {budget} < one pull per entry ({n * m})")
    cps = normalize_checkpoints(checkpoints, budget)
    kind = NOISE_CODE[oracle.matrix.noise.kind]
    noise = oracle.noise_draws(budget)
    warm = max(1, budget // (LUCB_WARM_FRACTION * n * m))
    counts, cp_rows, cp_cols, total, certified, gi, gj, si, sj = _kernels.lucb_run(
        oracle.matrix.entries, kind, noise, budget, delta, warm, LUCB_BATCH, cps
    )
    oracle.record_plays(counts)
    guesses = [
        None if r < 0 else (int(r), int(c)) for r, c in zip(cp_rows, cp_cols)
    ]
    degraded = si < 0  # no exact empirical saddle at the end
    final = (int(gi), int(gj))
    return AlgorithmRun(
        checkpoints=cps,
        guesses=guesses,
        samples_used=int(total),
        final_guess=final,
        degraded=degraded,
    )


def run_uniform(oracle: SamplingOracle, budget: int, checkpoints=None, rng=None) -> AlgorithmRun:
    """Round-robin over all entries; guess is the empirical saddle.

    Consumes exactly ``budget`` samples, walking the entries in row-major
    order and cycling.
    """
    _check_budget(budget)
    if budget == 0:
        return empty_run()
    n, m = oracle.n, oracle.m
    nm = n * m
    cps = normalize_checkpoints(checkpoints, budget)
    sums = np.zeros(nm)
    counts = np.zeros(nm, dtype=np.int64)
    flat = np.arange(nm)
    rows, cols = np.divmod(flat, m)

    def advance(upto: int, start: int):
        window = upto - start
        if window <= 0:
            return
        full, rem = divmod(window, nm)
        add = np.full(nm, full, dtype=np.int64)
        if rem:
            np.add.at(add, (np.arange(rem) + start) % nm, 1)
        mask = add > 0
        mu = oracle.sample_mean_many(rows[mask], cols[mask], add[mask])
        sums[mask] += mu * add[mask]
        counts[mask] += add[mask]

    guesses = []
    prev = 0
    for cp in cps:
        cp = int(min(cp, budget))
        advance(cp, prev)
        prev = max(prev, cp)
        means = np.where(counts > 0, sums / np.maximum(counts, 1), 0.0).reshape(n, m)
        p = psne_exact(means)
        guesses.append((p.row, p.col) if p is not None else None)
    advance(budget, prev)
    means = np.where(counts > 0, sums / np.maximum(counts, 1), 0.0).reshape(n, m)
    i, j, degraded = empirical_saddle(means)
    return AlgorithmRun(
        checkpoints=cps,
        guesses=guesses,
        samples_used=budget,
        final_guess=(i, j),
        degraded=degraded,
    )


def run_midsearch(
    oracle: SamplingOracle, budget: int, delta: float = 0.1, checkpoints=None, rng=None,
    trace=None,
) -> AlgorithmRun:
    """Budgeted halving search (see :func:`midsearch.search.find_psne_heuristic`)."""
    return find_psne_heuristic(
        oracle, budget, delta=delta, rng=rng, checkpoints=checkpoints, trace=trace
    )


BASELINES = {
    "midsearch": run_midsearch,
    "exp3ix": run_exp3ix_selfplay,
    "tsallis": run_tsallis_inf_selfplay,
    "lucb_g": run_lucb_g,
    "uniform": run_uniform,
}
