"""Exception types shared across the package."""


class PadicLabError(Exception):
    """Base class."""


class PrecisionLoss(PadicLabError):
    """A digit needed by the computation lies below the working window."""


class DomainError(PadicLabError, ValueError):
    pass


class ConfigError(PadicLabError, ValueError):
    pass


class WindowError(PadicLabError, ValueError):
    pass


class ModelError(PadicLabError, ValueError):
    pass


class PoleError(PadicLabError, ZeroDivisionError):
    pass
