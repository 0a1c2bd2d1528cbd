"""Exception hierarchy shared by all solver modules."""


class UnmixError(Exception):
    """Base class for every error raised by this package."""


class DimensionMismatch(UnmixError):
    """Array lengths or shapes are inconsistent with the problem."""


class NonFiniteInput(UnmixError):
    """An input array contains NaN or infinite entries."""


class InfeasibleLowerBounds(UnmixError):
    """Lower bounds are negative or their sum exceeds one."""


class RankDeficientLibrary(UnmixError):
    """The Gram matrix restricted to the free set is not positive definite."""


class EmptyFreeSet(UnmixError):
    """A subproblem was requested on an empty free set."""


class NoBlockingIndex(UnmixError):
    """No descent coordinate hits its bound although one was expected."""


class InstanceTooLarge(UnmixError):
    """The brute-force oracle was asked to enumerate too many free sets."""


class NoFeasibleCandidate(UnmixError):
    """Exhaustive enumeration found no primal-feasible subproblem solution."""
