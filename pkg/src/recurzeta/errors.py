"""Exception hierarchy.  ``module`` names the pipeline stage that raised."""


class RecurZetaError(Exception):
    module = "recurzeta"

    def __init__(self, message: str, module: str | None = None):
        super().__init__(message)
        if module is not None:
            self.module = module


class PolynomialParseError(RecurZetaError, ValueError):
    module = "polyarith"


class MathematicalError(RecurZetaError):
    """A mathematical precondition does not hold for the input."""


class RepeatedRootError(MathematicalError):
    module = "polyarith"


class ReducibleError(MathematicalError):
    module = "polyarith"


class NotMonicError(MathematicalError):
    module = "polyarith"


class NotPerronError(MathematicalError):
    module = "polyarith"


class BinetError(MathematicalError):
    module = "recurrence"


class PoleProximityError(MathematicalError):
    module = "zeta"


class DomainError(MathematicalError):
    """Argument outside the region where an evaluation is defined."""

    module = "zeta"


class PrecisionError(RecurZetaError):
    """Certification failed at every precision up to the configured cap."""


class InconsistencyError(RecurZetaError):
    """Lattice reduction proposed a relation that certification refutes."""

    module = "relations"

    def __init__(self, message: str, candidate=None, module: str | None = None):
        super().__init__(message, module)
        self.candidate = candidate


class LatticeError(RecurZetaError):
    module = "poles"
