"""Exception hierarchy shared by all modules."""


class DomainConstError(Exception):
    """Base class for every error raised by the package."""


class GeometryError(DomainConstError, ValueError):
    """Invalid domain description (self-intersecting polygon, bad radius, ...)."""


class DomainMembershipError(DomainConstError, ValueError):
    """A query point is not strictly inside the domain."""


class StarShapeError(DomainConstError, ValueError):
    """The polygon has an empty (or degenerate) kernel."""


class FormError(DomainConstError, ValueError):
    """A bilinear form was requested for an incompatible basis family."""


class IllConditionedBasisError(DomainConstError, ArithmeticError):
    """The mass matrix of a trial space is numerically singular.

    Attributes:
        pivot: index of the failing Cholesky pivot, or None when the
            factorization succeeded but the condition estimate overflowed.
        condition: condition estimate when available.
    """

    def __init__(self, message, pivot=None, condition=None):
        super().__init__(message)
        self.pivot = pivot
        self.condition = condition


class ContradictionError(DomainConstError):
    """Interval propagation produced an empty interval.

    Attributes:
        rule: name of the rule whose application emptied the interval.
        constants: names of the constants involved.
    """

    def __init__(self, rule, constants, detail=""):
        names = ", ".join(constants)
        msg = f"contradiction in rule '{rule}' on {names}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)
        self.rule = rule
        self.constants = tuple(constants)
