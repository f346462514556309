"""Exception types shared across the package.

Every error condition promised by a public operation maps to one of these,
so callers (and the CLI) can distinguish usage errors from verification
failures without string matching.
"""


class InvalidRankError(ValueError):
    """Root-system rank outside the supported range."""


class InvalidParabolicError(ValueError):
    """Empty or out-of-range set of crossed Dynkin nodes."""


class UnsupportedDimensionError(ValueError):
    """Requested a case the theory deliberately excludes (e.g. n = 2)."""


class InconsistencyError(ArithmeticError):
    """An element failed to expand in the stored basis; signals a wrong basis."""


class HousingAmbiguityError(RuntimeError):
    """Zero or several candidate subspaces matched an extreme weight."""


class SpecFormatError(ValueError):
    """ODE spec file violates the documented schema."""


class DegeneratePointError(ValueError):
    """A pointwise reduction lost rank, typically because C vanishes there."""


class TorsionPreconditionError(ValueError):
    """Operation requires vanishing contact torsion and it does not vanish."""


class SingularArcError(RuntimeError):
    """Integration ran into C -> 0; carries the last good state."""

    def __init__(self, message, t, state):
        super().__init__(message)
        self.t = t
        self.state = state


class ExprError(ValueError):
    """Base class for expression language failures."""


class ExprSyntaxError(ExprError):
    """Malformed source text; `offset` is the byte position of the failure."""

    def __init__(self, message, offset):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


class ExprNameError(ExprError):
    """Reference to an undeclared variable or unknown function."""


class ExprEvalError(ExprError):
    """Runtime evaluation failure: division by zero or log domain."""
