"""Exception types shared across the package.

Every error raised by quasi1d derives from :class:`Quasi1dError`, so callers
can distinguish numerical/domain failures from programming errors.  The CLI
maps configuration problems to exit code 1 and everything else to exit code 2.
"""


class Quasi1dError(Exception):
    """Base class for all quasi1d errors."""


# --- matrix kernels ---------------------------------------------------------

class RankDeficient(Quasi1dError):
    """QR factor has a diagonal entry below the relative rank tolerance."""


class Overflow(Quasi1dError):
    """An intermediate matrix entry exceeded the representable range."""


class LogUndefined(Quasi1dError):
    """Principal matrix logarithm undefined (eigenvalue on the closed
    negative real ray)."""


class BadOrder(Quasi1dError):
    """Exterior-power order outside [1, n]."""


class SizeTooLarge(Quasi1dError):
    """Exterior dimension exceeds the supported cap."""


class NotLorentz(Quasi1dError):
    """Input matrix fails the Lorentz-membership precondition."""


# --- randomness -------------------------------------------------------------

class BadLaw(Quasi1dError):
    """Disorder law with empty, single-point or unbounded support."""


# --- model families ---------------------------------------------------------

class DimensionMismatch(Quasi1dError):
    """Vector or matrix argument has the wrong length/shape for the model."""


class DegenerateTransmission(Quasi1dError):
    """Unitary Anderson transfer matrix undefined at t = 0."""


class VerblunskyTooLarge(Quasi1dError):
    """Verblunsky coefficient matrix with ||alpha* alpha|| >= 1."""


class SingularBeta(Quasi1dError):
    """Top-right scattering block not invertible within tolerance."""


class UnsupportedModel(Quasi1dError):
    """Operation not defined for this model family."""


# --- estimators and probes --------------------------------------------------

class EmptyGenerators(Quasi1dError):
    """Lie closure called with no generators."""


class NotHyperbolic(Quasi1dError):
    """Top exponent not resolved away from zero; Oseledets probe undefined."""


class NotSymmetric(Quasi1dError):
    """Matrix fails the symmetry residual required by the eigensolver."""


class NoInteriorModes(Quasi1dError):
    """No eigenpair passed the interior-mass filter."""


class BoundaryContamination(Quasi1dError):
    """Evolved wave packet reached the guard zone at the lattice edge."""


# --- configuration ----------------------------------------------------------

class ParseError(Quasi1dError):
    """Malformed configuration text."""


class ValidationError(Quasi1dError):
    """Configuration or model parameter violates a documented constraint."""


class UnknownKey(Quasi1dError):
    """Configuration key not in the documented schema."""
