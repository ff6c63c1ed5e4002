class DlmError(Exception):
    """Base class for all errors raised by dlmnet."""


class ValidationError(DlmError, ValueError):
    """An input value violates a documented precondition."""


class ConfigurationError(DlmError, ValueError):
    """A network or processor is wired or dimensioned inconsistently."""
