"""Exception hierarchy."""


class SemnomaError(Exception):
    """Base class for toolkit errors."""


class AllocationError(SemnomaError, ValueError):
    """An allocation violates the scenario budget or the scheme structure."""


class ConfigError(SemnomaError, ValueError):
    """Bad experiment configuration (unknown key, out-of-range value, ...)."""


class InfeasibleError(SemnomaError):
    """The primary-rate requirement cannot be met even with a silent secondary."""

    def __init__(self, message: str, achievable: float):
        super().__init__(message)
        self.achievable = achievable
