"""Exception taxonomy shared by all sbo modules."""


class SboError(Exception):
    """Base class for all errors raised by this package."""


class ContractViolation(SboError, ValueError):
    """An operation was called with arguments violating its contract
    (dimension mismatch, non-finite input, invalid bounds)."""


class ConfigurationError(SboError, ValueError):
    """A solver / problem configuration is infeasible. The message names
    the violated condition so harness output can surface it verbatim."""


class ParseError(SboError, ValueError):
    """Malformed text input (matrix/vector/instance/config file)."""

    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class DivergenceError(SboError, RuntimeError):
    """A solver iterate left the finite-float range. Carries the index of
    the failing step and the last finite iterate."""

    def __init__(self, message: str, k: int, last_finite):
        super().__init__(message)
        self.k = k
        self.last_finite = last_finite


class PowerIterationError(SboError, RuntimeError):
    """Power iteration exhausted max_iter before reaching tolerance.
    Carries the best eigenvalue estimate found so far."""

    def __init__(self, message: str, best_estimate: float):
        super().__init__(message)
        self.best_estimate = best_estimate
