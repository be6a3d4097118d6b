"""Exception hierarchy shared by all modules."""


class EisenKernelError(Exception):
    """Base class for every error raised by this package."""


class ParameterError(EisenKernelError, ValueError):
    pass


class DomainError(EisenKernelError, ValueError):
    """Argument lies outside the region where an operation is defined or validated."""


class PoleError(DomainError):
    def __init__(self, message, location=None):
        super().__init__(message)
        self.location = location


class ConvergenceError(EisenKernelError, ArithmeticError):
    """A series or quadrature failed to settle within its cap.

    ``partial`` carries whatever was computed before giving up and ``trace``
    the sequence of refinements that were tried.
    """

    def __init__(self, message, partial=None, trace=None):
        super().__init__(message)
        self.partial = partial
        self.trace = trace or []


class CapabilityError(EisenKernelError):
    pass


class InsufficientCoefficientsError(ParameterError):
    def __init__(self, message, required):
        super().__init__(message)
        self.required = required


class PreconditionError(ParameterError):
    pass
