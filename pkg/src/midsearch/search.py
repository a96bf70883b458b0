"""Staged halving search for the saddle point of a noisy matrix game.

``find_psne_with_gap`` is the guarantee-carrying form: given a guess of the
harmonic-average gap it alternates between halving the active rows and the
active columns, scoring the opposing side with a robust near-median value to
decide where to sample.  ``find_psne_heuristic`` is the fixed-budget variant
used in benchmarks: same staged skeleton, but the expensive quantile
subroutine is replaced by an aggressive halving subsample and all pull
counts come from even splits of the remaining budget (stage shares are
roughly what the guarantee form would spend at the gap implied by the
budget, gap ~ sqrt((n+m)/T)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BudgetTooSmall
from .game import SamplingOracle, empirical_saddle
from .midval import cmidval, rmidval
from .trajectory import AlgorithmRun, CheckpointRecorder, normalize_checkpoints

ROW, COL, TERMINAL = "row", "col", "terminal"


@dataclass(frozen=True)
class GapSearchResult:
    row: int
    col: int
    degraded: bool
    samples_used: int

    @property
    def pair(self) -> tuple[int, int]:
        return (self.row, self.col)


def stage_schedule(n: int, m: int) -> list[tuple[str, int, int]]:
    """Deterministic (branch, |rows|, |cols|) sequence the search follows."""
    stages = []
    x, y = n, m
    while max(x, y) > 2:
        if x >= y:
            stages.append((ROW, x, y))
            x = (x + 1) // 2
        else:
            stages.append((COL, x, y))
            y = (y + 1) // 2
    stages.append((TERMINAL, x, y))
    return stages


def find_psne_with_gap(
    oracle: SamplingOracle,
    delta_guess: float,
    delta: float,
    rng=None,
    trace: list | None = None,
) -> GapSearchResult:
    """Identify the saddle point assuming ``delta_guess`` lower-bounds the
    harmonic-average gap.

    Succeeds with probability at least 1 - delta whenever the guess is
    valid.  The sample count is a deterministic function of (n, m,
    delta_guess, delta): each stage's pull counts depend only on the active
    set sizes, never on observations.
    """
    if not 0 < delta_guess <= 2.0:
        raise ValueError("delta_guess must lie in (0, 2]")
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    if rng is None:
        rng = oracle.spawn_rng()
    n, m = oracle.n, oracle.m
    start = oracle.total_count
    if n == 1 and m == 1:
        return GapSearchResult(0, 0, False, 0)

    tot = n + m - 2
    inner_delta = delta / (2.0 * m * m * n * n)
    halve_pull_scale = 162.0 * math.log(4.0 * n * n * m * m / delta) / delta_guess**2
    x_idx = np.arange(n)
    y_idx = np.arange(m)

    while max(len(x_idx), len(y_idx)) > 2:
        if len(x_idx) >= len(y_idx):
            eps = (1.0 / 9.0) * math.sqrt(len(x_idx) / tot) * delta_guess
            scores = np.array(
                [
                    cmidval([(i, j) for i in x_idx], eps, inner_delta, oracle, rng)
                    for j in y_idx
                ]
            )
            j_hat = y_idx[int(np.argmin(scores))]
            pulls = math.ceil(tot / len(x_idx) * halve_pull_scale)
            means = oracle.sample_mean_many(
                x_idx, np.full(len(x_idx), j_hat), pulls
            )
            keep = (len(x_idx) + 1) // 2
            order = np.argsort(-means, kind="stable")
            if trace is not None:
                trace.append(
                    f"rows {len(x_idx)}->{keep}: scored {len(y_idx)} cols, "
                    f"split on col {j_hat}, {pulls} pulls per entry"
                )
            x_idx = np.sort(x_idx[order[:keep]])
        else:
            eps = (1.0 / 9.0) * math.sqrt(len(y_idx) / tot) * delta_guess
            scores = np.array(
                [
                    rmidval([(i, j) for j in y_idx], eps, inner_delta, oracle, rng)
                    for i in x_idx
                ]
            )
            i_hat = x_idx[int(np.argmax(scores))]
            pulls = math.ceil(tot / len(y_idx) * halve_pull_scale)
            means = oracle.sample_mean_many(
                np.full(len(y_idx), i_hat), y_idx, pulls
            )
            keep = (len(y_idx) + 1) // 2
            order = np.argsort(means, kind="stable")
            if trace is not None:
                trace.append(
                    f"cols {len(y_idx)}->{keep}: scored {len(x_idx)} rows, "
                    f"split on row {i_hat}, {pulls} pulls per entry"
                )
            y_idx = np.sort(y_idx[order[:keep]])

    pulls = math.ceil(tot / 2.0 * 50.0 * math.log(16.0 / delta) / delta_guess**2)
    rr, cc = np.meshgrid(x_idx, y_idx, indexing="ij")
    sub = oracle.sample_mean_many(rr.ravel(), cc.ravel(), pulls).reshape(
        len(x_idx), len(y_idx)
    )
    si, sj, degraded = empirical_saddle(sub)
    if trace is not None:
        trace.append(
            f"terminal {len(x_idx)}x{len(y_idx)}: {pulls} pulls per entry"
            + (" (no exact saddle, degraded guess)" if degraded else "")
        )
    return GapSearchResult(
        int(x_idx[si]), int(y_idx[sj]), degraded, oracle.total_count - start
    )


def expected_gap_search_samples(n: int, m: int, delta_guess: float, delta: float) -> int:
    """Closed-form total sample count of :func:`find_psne_with_gap`."""
    from .midval import MidValConfig

    if n == 1 and m == 1:
        return 0
    tot = n + m - 2
    inner_delta = delta / (2.0 * m * m * n * n)
    halve_pull_scale = 162.0 * math.log(4.0 * n * n * m * m / delta) / delta_guess**2
    total = 0
    for branch, x, y in stage_schedule(n, m):
        if branch == TERMINAL:
            total += x * y * math.ceil(tot / 2.0 * 50.0 * math.log(16.0 / delta) / delta_guess**2)
            continue
        big = x if branch == ROW else y
        eps = (1.0 / 9.0) * math.sqrt(big / tot) * delta_guess
        cfg = MidValConfig.from_params(eps, inner_delta)
        sets = y if branch == ROW else x
        total += sets * cfg.budget + big * math.ceil(tot / big * halve_pull_scale)
    return total


# ---------------------------------------------------------------------------
# fixed-budget heuristic


def _quantile_rounds(pool_size: int) -> list[int]:
    sizes = [pool_size]
    while sizes[-1] > 2:
        sizes.append((sizes[-1] + 1) // 2)
    return sizes[:-1] if len(sizes) > 1 else sizes


def _rounds_cost(pool_size: int) -> int:
    return sum(s * 2**r for r, s in enumerate(_quantile_rounds(pool_size)))


class _State:
    """Cumulative per-entry statistics plus checkpoint hooks."""

    def __init__(self, oracle, budget, recorder):
        self.oracle = oracle
        self.sums = np.zeros((oracle.n, oracle.m))
        self.counts = np.zeros((oracle.n, oracle.m), dtype=np.int64)
        self.budget = budget
        self.used = 0
        self.recorder = recorder
        self.x_idx = np.arange(oracle.n)
        self.y_idx = np.arange(oracle.m)

    def pull(self, rows, cols, per_pull: int):
        rows = np.asarray(rows, dtype=np.intp)
        cols = np.asarray(cols, dtype=np.intp)
        means = self.oracle.sample_mean_many(rows, cols, per_pull)
        np.add.at(self.sums, (rows, cols), means * per_pull)
        np.add.at(self.counts, (rows, cols), per_pull)
        self.used += per_pull * rows.size
        self.recorder.update(self.used, self.guess)
        return means

    def means_at(self, rows, cols):
        c = self.counts[rows, cols]
        return np.where(c > 0, self.sums[rows, cols] / np.maximum(c, 1), 0.0)

    def guess(self):
        sub_counts = self.counts[np.ix_(self.x_idx, self.y_idx)]
        sub = np.where(
            sub_counts > 0,
            self.sums[np.ix_(self.x_idx, self.y_idx)] / np.maximum(sub_counts, 1),
            0.0,
        )
        i, j, _ = empirical_saddle(sub)
        return (int(self.x_idx[i]), int(self.y_idx[j]))


def _halving_quantile(state: _State, rows, cols, budget: int, from_top: bool, rng) -> float:
    """Cheap quantile score: halve a subsampled pool while doubling pulls.

    Tracks the one-third-from-the-edge rank through the halvings and returns
    that arm's cumulative mean.  Spends at most ``budget`` samples; with no
    budget it scores from whatever statistics already exist.
    """
    size = len(rows)
    pool = np.arange(size)
    if budget >= 2:
        p = size
        while p > 2 and _rounds_cost(p) > budget:
            p = (p + 1) // 2
        if p < size:
            pool = rng.choice(size, size=p, replace=False)
    sizes = _quantile_rounds(len(pool))
    weight = sum(s * 2**r for r, s in enumerate(sizes))
    p0 = budget // weight  # 0 when even one pull per pool arm does not fit
    q = len(pool) // 3
    order = None
    for r, s in enumerate(sizes):
        if r > 0:
            half = sizes[r]
            start = min(max(q - half // 2, 0), len(pool) - half)
            pool = pool[order[start : start + half]]
            q = min(max(q - start, 0), half - 1)
        if p0 > 0:
            state.pull(rows[pool], cols[pool], p0 * 2**r)
        mu = state.means_at(rows[pool], cols[pool])
        order = np.argsort(-mu if from_top else mu, kind="stable")
    return float(state.means_at(rows[pool[order[q]]], cols[pool[order[q]]]))


def find_psne_heuristic(
    oracle: SamplingOracle,
    budget: int,
    delta: float = 0.1,
    rng=None,
    checkpoints=None,
    trace: list | None = None,
) -> AlgorithmRun:
    """Budgeted saddle-point search; never consumes more than ``budget``.

    Splits the remaining budget evenly over the remaining stages (terminal
    stage weighted double), spends half of each stage's share scoring the
    opposing side and the rest sampling the chosen split line, and reuses
    every observation through cumulative means.  The anytime guess is the
    empirical saddle of the surviving submatrix.
    """
    n, m = oracle.n, oracle.m
    if budget < 0:
        raise BudgetTooSmall("budget must be nonnegative")
    schedule = stage_schedule(n, m)
    min_need = sum(x * y for _, x, y in schedule)
    if budget < max(min_need, n * m):
        raise BudgetTooSmall(
            f"budget {budget} cannot cover one pull per surviving entry "
            f"(needs {max(min_need, n * m)})"
        )
    if rng is None:
        rng = oracle.spawn_rng()
    cps = normalize_checkpoints(checkpoints, budget)
    recorder = CheckpointRecorder(cps)
    state = _State(oracle, budget, recorder)

    n_stages = len(schedule)
    for s_i, (branch, _, _) in enumerate(schedule):
        stages_left = n_stages - s_i
        remaining = budget - state.used
        reserve = sum(x * y for _, x, y in schedule[s_i + 1 :])
        if branch == TERMINAL:
            cells_r = state.x_idx
            cells_c = state.y_idx
            rr, cc = np.meshgrid(cells_r, cells_c, indexing="ij")
            per = max(1, remaining // (len(cells_r) * len(cells_c)))
            state.pull(rr.ravel(), cc.ravel(), per)
            if trace is not None:
                trace.append(
                    f"terminal {len(cells_r)}x{len(cells_c)}: {per} pulls per entry"
                )
            break

        # spend at most the per-stage share and never dip into the reserve
        # needed to give every later surviving entry one pull
        avail = max(0, remaining - reserve)
        share = min(avail, remaining // (stages_left + 1))
        score_budget = share // 2
        used_before = state.used
        if branch == ROW:
            sets = state.y_idx
            per_set = score_budget // max(1, len(sets))
            scores = np.array(
                [
                    _halving_quantile(
                        state,
                        state.x_idx,
                        np.full(len(state.x_idx), j),
                        per_set,
                        from_top=True,
                        rng=rng,
                    )
                    for j in sets
                ]
            )
            j_hat = int(sets[int(np.argmin(scores))])
            elim = max(share - (state.used - used_before), 0)
            avail2 = max(0, budget - state.used - reserve)
            per = min(max(1, elim // len(state.x_idx)), avail2 // len(state.x_idx))
            if per > 0:
                state.pull(state.x_idx, np.full(len(state.x_idx), j_hat), per)
            mu = state.means_at(state.x_idx, np.full(len(state.x_idx), j_hat))
            keep = (len(state.x_idx) + 1) // 2
            order = np.argsort(-mu, kind="stable")
            if trace is not None:
                trace.append(
                    f"rows {len(state.x_idx)}->{keep}: split on col {j_hat}, "
                    f"{per} pulls per entry"
                )
            state.x_idx = np.sort(state.x_idx[order[:keep]])
        else:
            sets = state.x_idx
            per_set = score_budget // max(1, len(sets))
            scores = np.array(
                [
                    _halving_quantile(
                        state,
                        np.full(len(state.y_idx), i),
                        state.y_idx,
                        per_set,
                        from_top=False,
                        rng=rng,
                    )
                    for i in sets
                ]
            )
            i_hat = int(sets[int(np.argmax(scores))])
            elim = max(share - (state.used - used_before), 0)
            avail2 = max(0, budget - state.used - reserve)
            per = min(max(1, elim // len(state.y_idx)), avail2 // len(state.y_idx))
            if per > 0:
                state.pull(np.full(len(state.y_idx), i_hat), state.y_idx, per)
            mu = state.means_at(np.full(len(state.y_idx), i_hat), state.y_idx)
            keep = (len(state.y_idx) + 1) // 2
            order = np.argsort(mu, kind="stable")
            if trace is not None:
                trace.append(
                    f"cols {len(state.y_idx)}->{keep}: split on row {i_hat}, "
                    f"{per} pulls per entry"
                )
            state.y_idx = np.sort(state.y_idx[order[:keep]])

    sub_counts = state.counts[np.ix_(state.x_idx, state.y_idx)]
    sub = np.where(
        sub_counts > 0,
        state.sums[np.ix_(state.x_idx, state.y_idx)] / np.maximum(sub_counts, 1),
        0.0,
    )
    i, j, degraded = empirical_saddle(sub)
    final = (int(state.x_idx[i]), int(state.y_idx[j]))
    recorder.finish(final)
    assert state.used <= budget
    return AlgorithmRun(
        checkpoints=cps,
        guesses=recorder.guesses,
        samples_used=state.used,
        final_guess=final,
        degraded=degraded,
    )
