"""Exception and warning types raised across the package."""


class HypomixError(Exception):
    """Base class for all package errors."""


class DimensionError(HypomixError, ValueError):
    """Operands live on different numbers of qubits / different dimensions."""


class SizeError(HypomixError, ValueError):
    """Requested dense object exceeds the dimension cap."""


class FrameError(HypomixError):
    """The stationary state cannot define a GNS frame (e.g. it is singular)."""

    def __init__(self, message, smallest_eigenvalue=None):
        super().__init__(message)
        self.smallest_eigenvalue = smallest_eigenvalue


class ContractError(HypomixError):
    """A callable handed to the library violated its contract (e.g. nonlinearity)."""


class DependencyError(HypomixError):
    """A required upstream object (frame, certificate, ...) was not supplied."""


class SolverError(HypomixError):
    """A numerical routine failed to produce a usable answer."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class ConditionError(HypomixError):
    """One of the four hypocoercivity conditions does not hold."""

    def __init__(self, condition, message, value=None):
        super().__init__(f"condition {condition}: {message}")
        self.condition = condition
        self.value = value


class ModelError(HypomixError, ValueError):
    """Invalid model parameters or model file."""


class HorizonError(HypomixError):
    """The target distance was not reached within the supplied time grid."""

    def __init__(self, message, last_distance):
        super().__init__(message)
        self.last_distance = last_distance


class MultiplicityWarning(UserWarning):
    """The generator has more than one stationary state."""


class AmbiguousKernelWarning(UserWarning):
    """An eigenvalue sits close to the kernel threshold."""


class ConditioningWarning(UserWarning):
    """A linear solve was badly conditioned."""
