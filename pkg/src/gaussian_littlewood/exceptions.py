"""Exception types raised across the package."""


class ValidationError(ValueError):
    """An argument failed a precondition.

    ``key`` names the offending parameter so callers (notably the CLI) can
    report it without parsing the message.
    """

    def __init__(self, key, message):
        super().__init__(f"invalid {key}: {message}")
        self.key = key


class NotACovarianceError(ValueError):
    """A matrix has an eigenvalue below ``-psd_tol`` (scaled)."""


class NonConvergenceError(RuntimeError):
    """An iterative method stopped before meeting its tolerance."""

    def __init__(self, message, last_estimate=None):
        super().__init__(message)
        self.last_estimate = last_estimate
