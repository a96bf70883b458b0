"""Exception types raised by the midsearch library."""


class MidsearchError(Exception):
    """Base class for all library errors."""


class NoStrictPSNE(MidsearchError):
    """The matrix has no pure-strategy saddle point with strict gaps.

    Gap-based hardness statistics are undefined in this case, so we fail
    loudly instead of emitting infinite values.
    """


class InvalidParams(MidsearchError, ValueError):
    """A generator or configuration parameter violates its constraints."""


class SkewViolation(InvalidParams):
    """A preference matrix is not skew-consistent (P[i,j] + P[j,i] != 1)."""


class EmptyArmSet(MidsearchError, ValueError):
    """An arm-set operation was called with no arms."""


class BudgetTooSmall(MidsearchError, ValueError):
    """The sample budget cannot cover the algorithm's minimal schedule."""


class BudgetZero(MidsearchError, ValueError):
    """A negative sample budget was supplied."""


class RejectionLimit(MidsearchError):
    """Rejection sampling failed to produce an instance within the attempt cap."""


class MaxRoundsExceeded(MidsearchError):
    """The doubling search exceeded its round limit.

    Usually means the instance has no strict saddle point, so no guess can
    ever be verified.
    """


class InvalidCounts(MidsearchError, ValueError):
    """Success/trial counts passed to an interval routine are inconsistent."""
