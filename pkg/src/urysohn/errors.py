"""Exception types shared across the package."""


class UrysohnError(Exception):
    """Base class for all package-specific errors."""


class DomainError(UrysohnError, ValueError):
    """An argument lies outside the declared domain (e.g. t outside [0, T])."""


class EvaluationError(UrysohnError, ArithmeticError):
    """A catalog function produced a non-finite value."""


class NonPositiveForcing(UrysohnError):
    """Manufactured construction would produce a negative forcing term."""


class RoleViolated(UrysohnError):
    """A grid function could not be certified in the requested role.

    Carries the worst node index and the margin value there.
    """

    def __init__(self, message: str, node: int, margin: float):
        super().__init__(message)
        self.node = node
        self.margin = margin


class PreconditionUnmet(UrysohnError):
    """An operation's stated precondition does not hold."""


class FamilySolveFailed(UrysohnError):
    """A member of a perturbation family failed to converge.

    ``index`` identifies the failing member, ``eps`` its perturbation size.
    """

    def __init__(self, message: str, index: int, eps: float):
        super().__init__(message)
        self.index = index
        self.eps = eps


class ConfigError(UrysohnError):
    """Configuration text failed to parse or validate.

    ``issues`` is a list of human-readable field-level diagnostics.
    """

    def __init__(self, issues):
        self.issues = list(issues)
        super().__init__("; ".join(self.issues))
