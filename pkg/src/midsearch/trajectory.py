"""Trajectories of (samples used, current guess) produced by identifiers."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class AlgorithmRun:
    """What an identifier believed at each sample checkpoint.

    ``checkpoints[k]`` is a cumulative sample count and ``guesses[k]`` the
    algorithm's current (row, col) guess at the moment its consumption first
    reached that count.  ``samples_used`` is the run's final consumption,
    which may fall short of the last checkpoint when the algorithm stops
    early (the guess is then carried forward).
    """

    checkpoints: np.ndarray
    guesses: list
    samples_used: int
    final_guess: tuple | None
    degraded: bool = False
    stages: list = field(default_factory=list)  # optional per-stage log lines

    def guess_at(self, samples: int):
        """Guess in force once ``samples`` samples had been consumed."""
        idx = int(np.searchsorted(self.checkpoints, samples, side="right")) - 1
        if idx < 0:
            return None
        return self.guesses[idx]


def empty_run() -> AlgorithmRun:
    return AlgorithmRun(
        checkpoints=np.empty(0, dtype=np.int64),
        guesses=[],
        samples_used=0,
        final_guess=None,
    )


def normalize_checkpoints(checkpoints, budget: int | None) -> np.ndarray:
    """Sorted int64 checkpoint grid; defaults to the single point ``budget``."""
    if checkpoints is None:
        if budget is None:
            return np.empty(0, dtype=np.int64)
        return np.asarray([budget], dtype=np.int64)
    cps = np.asarray(checkpoints, dtype=np.int64)
    if cps.ndim != 1 or (cps.size > 1 and np.any(np.diff(cps) <= 0)):
        raise ValueError("checkpoints must be strictly increasing")
    return cps


class CheckpointRecorder:
    """Fills a checkpoint grid as an algorithm's sample count advances."""

    def __init__(self, checkpoints: np.ndarray):
        self.checkpoints = checkpoints
        self.guesses: list = [None] * len(checkpoints)
        self._next = 0

    def update(self, samples_used: int, guess):
        """Record crossed checkpoints; ``guess`` may be a lazy callable."""
        if self._next >= len(self.checkpoints) or samples_used < self.checkpoints[self._next]:
            return
        g = guess() if callable(guess) else guess
        while self._next < len(self.checkpoints) and samples_used >= self.checkpoints[self._next]:
            self.guesses[self._next] = g
            self._next += 1

    def finish(self, guess):
        while self._next < len(self.checkpoints):
            self.guesses[self._next] = guess
            self._next += 1
