"""Exception types shared across the package."""


class SingularMatrixError(ArithmeticError):
    """A pivot vanished at working precision during elimination."""


class PrecisionExhaustedError(ArithmeticError):
    """The working precision was insufficient to certify a result.

    Raised instead of returning a plausible-looking but unreliable number.
    """


class NotHermitianError(ValueError):
    """A matrix required to be Hermitian is not, beyond tolerance."""


class StepTooLargeError(ValueError):
    """Requested integration step is too coarse for the system's energy scale."""


class InvalidPolarizationError(ValueError):
    """Plane-wave polarization vector is not transverse to the wavevector."""
