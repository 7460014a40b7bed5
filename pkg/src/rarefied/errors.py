"""Exception hierarchy shared by every layer of the package."""


class RarefiedError(ValueError):
    """Base class for all errors raised by the library."""


class InvalidBaseError(RarefiedError):
    """A nome/base parameter lies outside the open unit disk."""


class ZeroArgumentError(RarefiedError):
    """A multiplicative argument equal to zero was supplied."""


class TruncationExhaustedError(RarefiedError):
    """An infinite product did not reach its tail threshold within max_terms."""


class PoleError(RarefiedError):
    """An argument sits within tolerance of a pole (or a vanishing denominator).

    ``family`` names the pole family that was hit and ``index`` the offending
    factor position inside a product, when known.
    """

    def __init__(self, message, family=None, index=None):
        super().__init__(message)
        self.family = family
        self.index = index


class BalanceError(RarefiedError):
    """Parameters violate the balancing condition of their kind."""


class ConvergenceError(RarefiedError):
    """A quadrature refinement sequence did not settle within its limits."""

    def __init__(self, message, value=None, est_rel_error=None):
        super().__init__(message)
        self.value = value
        self.est_rel_error = est_rel_error


class NonDecayError(ConvergenceError):
    """A vertical-line integrand is not negligible at the height cut."""


class SamplerExhaustedError(RarefiedError):
    """The balanced-parameter sampler ran out of resampling attempts."""


class ImageOutOfDomainError(RarefiedError):
    """A transformed parameter set leaves the domain where the unit torus is a valid contour."""
