"""Exception hierarchy shared by all modules.

The CLI maps these onto exit codes: usage errors -> 2, resource/not-found -> 3,
verification failures -> 1.
"""


class GraphCodeError(Exception):
    pass


class UsageError(GraphCodeError, ValueError):
    """Bad arguments or violated preconditions."""


class InfeasibleError(UsageError):
    """A construction cannot be carried out at the requested parameters."""


class ResourceError(GraphCodeError, RuntimeError):
    """An enumeration or search exceeded its configured budget."""

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class NotFoundError(GraphCodeError, LookupError):
    """A randomized or bounded search finished without a result."""

    def __init__(self, message, stats=None):
        super().__init__(message)
        self.stats = stats or {}


class VerificationError(GraphCodeError, AssertionError):
    """A produced object failed its own independent check."""
