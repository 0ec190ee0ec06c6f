"""Exception hierarchy shared by all modules."""


class FracBesselError(Exception):
    """Base class for every error raised by the package."""


class DomainError(FracBesselError, ValueError):
    """Argument outside the domain of a function."""


class PoleError(DomainError):
    """Argument sits on a pole (nonpositive integer for gamma-type functions)."""


class UnsupportedOrderError(FracBesselError, ValueError):
    """Requested derivative/polygamma order is beyond what is implemented."""


class ValidationError(FracBesselError, ValueError):
    """Equation input failed validation.

    ``problems`` holds one human-readable entry per violation so callers can
    report all of them at once.
    """

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class NotApplicableError(FracBesselError):
    """Quantity is undefined for this equation (e.g. threshold of an integer-only spec)."""


class RootScanError(FracBesselError):
    """Root scan failed (bad window, too many roots, ...)."""


class InvalidRootError(FracBesselError, ValueError):
    """A rejected characteristic root was passed where a valid one is required."""


class DummyRootDenominator(FracBesselError):
    """A coefficient recursion denominator vanished.

    Raised when ``gamma + beta*index`` is (numerically) another root of the
    characteristic equation.
    """

    def __init__(self, index, denominator):
        self.index = index
        self.denominator = denominator
        super().__init__(
            f"recursion denominator vanishes at n={index} (|G - nu2| = {abs(denominator):.3e}); "
            "the root is a dummy root"
        )


class SeriesOverflowError(FracBesselError, ArithmeticError):
    """Series coefficients overflowed."""


class TruncationError(FracBesselError):
    """No truncation order up to the cap meets the requested accuracy."""

    def __init__(self, message, achieved):
        self.achieved = achieved
        super().__init__(message)


class DivergenceError(DomainError):
    """The Caputo derivative of the requested function does not exist."""


class QuadratureError(FracBesselError):
    """Quadrature did not reach the requested accuracy."""

    def __init__(self, message, estimate, error):
        self.estimate = estimate
        self.error = error
        super().__init__(message)
