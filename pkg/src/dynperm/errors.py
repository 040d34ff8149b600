"""Exception types shared across the package."""


class InvalidSizeError(ValueError):
    pass


class InvalidTranspositionError(ValueError):
    pass


class BoundsError(IndexError):
    pass


class ExhaustedDynamicsError(RuntimeError):
    """Raised when the cross-cycle sampler has nothing left to merge."""


class ConsistencyError(RuntimeError):
    pass


class DomainError(ValueError):
    pass


class InsufficientDataError(RuntimeError):
    pass
