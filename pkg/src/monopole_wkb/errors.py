"""Exception hierarchy.

Every error raised by the library derives from :class:`MonopoleError` and
carries an ``exit_code`` used by the command-line front end.
"""


class MonopoleError(Exception):
    """Base class for all library errors."""

    exit_code = 1


class ValidationError(MonopoleError, ValueError):
    """An argument is outside its admissible range."""

    exit_code = 2


class DomainError(ValidationError):
    """A coordinate lies outside the domain of a gauge patch or chart."""


class PoleProximityError(DomainError):
    """The polar angle is too close to a pole where the chart degenerates."""


class PoleCrossingError(PoleProximityError):
    """A trajectory or loop reached a pole."""


class OpenLoopError(ValidationError):
    """A loop used for holonomy is not closed."""


class EmptyTorusError(ValidationError):
    """The level set Lambda(E, P) is empty (P**2 >= E + B**2)."""


class OutOfAnnulusError(DomainError):
    """The polar angle lies outside the projection of a torus."""


class CausticError(DomainError):
    """A quantity that is singular on the caustic circles was requested there."""


class GridResolutionError(ValidationError):
    """A sampling grid is too coarse for the requested computation."""


class ConvergenceError(MonopoleError, ArithmeticError):
    """A numerical procedure failed to converge."""

    exit_code = 3
