"""Exception types shared across the package."""


class OlpError(Exception):
    """Base class for package errors."""


class DimensionMismatch(OlpError):
    pass


class UnsupportedConsumption(OlpError):
    """Queried conditional reward CDF at a consumption vector outside the support."""


class SolverBudgetExceeded(OlpError):
    pass


class DegenerateFit(OlpError):
    """Growth-exponent probe found only a flat region."""


class WrongDimension(OlpError):
    pass


class RecoveryFailed(OlpError):
    """Primal recovery could not close the duality gap (dual point not optimal)."""


class ConfigError(OlpError):
    pass


class InsufficientData(OlpError):
    pass
