"""Exception types.  The CLI maps them onto its exit-code contract."""


class LimitLabError(Exception):
    pass


class DomainError(LimitLabError, ValueError):
    """An argument is outside the domain of the operation."""


class PrimalityError(DomainError):
    """A formula that needs a prime modulus was called with a composite one."""


class FormulaDomainError(DomainError):
    """A closed form produced a value outside its meaningful range."""

    def __init__(self, message: str, n: int):
        super().__init__(message)
        self.n = n


class ValidationError(DomainError):
    """Malformed input object (e.g. a sequence that is not a permutation)."""


class ResourceError(LimitLabError):
    """The request is too large for exact enumeration at desk scale."""


class PartialResultError(LimitLabError):
    """Some points of a multi-point computation failed; ``completed`` holds the rest."""

    def __init__(self, message: str, completed):
        super().__init__(message)
        self.completed = completed
