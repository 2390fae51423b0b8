"""Exception types shared across the package."""


class JcScatterError(Exception):
    """Base class for all package-specific errors."""


class DomainError(JcScatterError, ValueError):
    """Input outside the physically meaningful domain (e.g. momentum <= 0)."""


class DegenerateSpectrum(JcScatterError):
    """Dressed eigenvalue pair closer than the degeneracy tolerance.

    At such an exceptional point the bi-orthogonal basis collapses and every
    formula dividing by the eigenvalue splitting loses all significant digits.
    """


class NonFiniteResult(JcScatterError):
    """A closed-form evaluation produced a non-finite value."""


class VanishingBackground(JcScatterError):
    """Uncorrelated background is numerically zero; asymptotic g2 undefined.

    Callers must switch to box normalization with an explicit quantization
    length.
    """


class ConvergenceFailure(JcScatterError):
    """A numerical oracle failed its internal accuracy checks."""


class SchemaMismatch(JcScatterError):
    """Comparison inputs disagree on grids or parameter sets."""


class ConfigError(JcScatterError, ValueError):
    """Invalid run configuration (unknown key, bad value, missing field)."""
