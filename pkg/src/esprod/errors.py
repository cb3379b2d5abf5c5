"""Exception hierarchy shared by every esprod module."""


class ESProdError(Exception):
    """Base class for all library errors."""


class InvalidInput(ESProdError, ValueError):
    """Malformed arguments or set files."""


class SingularPoint(ESProdError, ArithmeticError):
    """A factor 1 - e(a*theta) vanishes to machine resolution."""


class AllocationCap(ESProdError, MemoryError):
    """A table or grid would exceed the configured memory cap."""


class DegreeCap(ESProdError):
    """sum(a_j) exceeds the cap for exact coefficient expansion."""


class NonFinite(ESProdError, ArithmeticError):
    """A refinement produced a non-finite iterate."""


class GapNotReached(ESProdError):
    """Certified bracket did not reach the requested gap.

    The best bracket obtained is attached as ``estimate``.
    """

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


class SetNotInRange(ESProdError, ValueError):
    """Frequency set is not contained in {1, ..., n}."""


class SumCap(ESProdError):
    """Signed-sum search exceeds both the table and meet-in-the-middle caps."""


class EmptySample(ESProdError):
    """A random selector draw produced no elements."""


class CapOverflow(ESProdError, OverflowError):
    """Generated integer exceeds the configured element cap."""
