"""Exception hierarchy.

Every error derives from :class:`RelEntError` (itself a ``ValueError``) so
callers can catch validation problems in one place. The CLI maps the
subclasses below to exit codes.
"""


class RelEntError(ValueError):
    """Base class for all library errors."""


# linear algebra
class NonHermitian(RelEntError):
    def __init__(self, deviation: float, tol: float = 1e-10):
        self.deviation = deviation
        super().__init__(
            f"matrix is not Hermitian: max |M - M^H| = {deviation:.3e} exceeds {tol:.0e}"
        )


class NonPositiveEigenvalue(RelEntError):
    pass


class SupportViolation(RelEntError):
    pass


class DimensionMismatch(RelEntError):
    pass


# states
class InvalidState(RelEntError):
    pass


class DimensionTooSmall(RelEntError):
    pass


class NonOrthonormalBasis(RelEntError):
    pass


class InvalidEnsemble(RelEntError):
    pass


class InvalidCoefficients(RelEntError):
    pass


class NotHermitian(InvalidCoefficients):
    pass


class NotPSD(InvalidCoefficients):
    pass


class TraceNotOne(InvalidCoefficients):
    pass


# closed form
class IndexOutOfRange(RelEntError, IndexError):
    pass


class InvalidParameters(RelEntError):
    pass


# minimizer
class DimensionTooLarge(RelEntError):
    pass


class NonConvergence(RelEntError):
    pass


class SandwichViolation(RelEntError):
    def __init__(self, er_claim: float, value: float, tol: float):
        self.er_claim = er_claim
        self.value = value
        self.gap = value - er_claim
        super().__init__(
            f"numerical minimum {value:.10g} and closed form {er_claim:.10g} "
            f"differ by {self.gap:.3e} (tolerance {tol:.0e})"
        )
