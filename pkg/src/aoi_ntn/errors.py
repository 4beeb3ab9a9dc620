"""Exception types raised across the package."""


class AoIError(Exception):
    """Base class for all package errors."""


# spatial
class EmptyUavSet(AoIError):
    pass


class NoAssociatedNodes(AoIError):
    pass


# channel
class DegenerateChannel(AoIError):
    pass


class UnassociatedSource(AoIError):
    pass


# analytic
class NotExponential(AoIError):
    pass


class PoleAt(AoIError):
    def __init__(self, s):
        super().__init__(f"denominator vanishes at s={s!r}")
        self.s = s


class IndexOutOfRange(AoIError, IndexError):
    pass


class Unstable(AoIError):
    """Raised when a chain node has non-positive response rate."""

    def __init__(self, node, value):
        super().__init__(f"node {node} unstable (response rate {value:.6g} <= 0)")
        self.node = node
        self.value = value


class ZeroSuccessProbability(AoIError):
    pass


# des
class InsufficientDeliveries(AoIError):
    pass


class HorizonTooShort(AoIError):
    """Too few deliveries for statistics; the partial trace is attached."""

    def __init__(self, message, traces=None):
        super().__init__(message)
        self.traces = traces


# harness
class ParseError(AoIError):
    pass


class ValidationError(AoIError):
    def __init__(self, field, constraint):
        super().__init__(f"{field}: {constraint}")
        self.field = field
        self.constraint = constraint
