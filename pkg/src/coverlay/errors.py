"""Exception types shared across the library."""


class InputError(ValueError):
    """Caller-supplied data violates a documented requirement."""


class PreconditionError(InputError):
    """A structural precondition failed; ``witness`` points at the culprit."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class InternalInvariantError(RuntimeError):
    """A property the theory guarantees did not hold.

    Reaching this means a bug in the library (or a genuinely surprising
    instance); it must surface loudly instead of being folded into a verdict.
    """
