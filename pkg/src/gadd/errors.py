"""Exception hierarchy shared across the package."""


class GaddError(Exception):
    """Base class for all errors raised by gadd."""


class DomainError(GaddError, ValueError):
    """An argument lies outside the domain of the operation."""


class ResourceError(GaddError):
    """A request exceeds a configured size cap (degree, subset size, ...)."""


class NumericalError(GaddError, ArithmeticError):
    """A numerical procedure failed or produced an unusable result."""


class IllConditionedError(NumericalError):
    pass


class SolverError(NumericalError):
    pass


class DegenerateResponseError(GaddError):
    """The response variance is (numerically) zero, so indices are undefined."""


class ModelProtocolError(GaddError):
    """An external model violated the line protocol."""


class ConfigError(GaddError, ValueError):
    pass
