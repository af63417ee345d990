"""Exception and warning types shared across the rgflow modules."""


class RgflowError(Exception):
    """Base class for all rgflow numerical errors."""


class IllConditioned(RgflowError):
    """Polynomial root finding failed its residual check."""


class RepeatedRoots(RgflowError):
    """Denominator roots collide within tolerance; the partial-fraction
    decomposition (and hence the log-form reduction) is not valid."""


class SingularPade(RgflowError):
    """The Pade linear system is singular or the approximant fails to
    reproduce the input series; the requested approximant does not exist."""


class DomainError(RgflowError):
    """Argument outside the real domain of the requested branch or of a
    logarithm in an iterative formula."""


class DerivativeVanishes(RgflowError):
    """f'(a) is too small for series inversion around a."""


class NoConvergence(RgflowError):
    """Series terms failed the decrease test within the term budget."""


class NegativeBase(RgflowError):
    """A negative base would be raised to a non-integer power in real mode."""


class LandauPole(RgflowError):
    """The requested scale is at or below the perturbative pole (u <= 0)."""


class NoSolution(RgflowError):
    """No lambda parameter makes the flow pass through the reference point."""


class NoBracket(RgflowError):
    """No sign change found while expanding the root bracket."""


class StiffnessBudget(RgflowError):
    """ODE integration exceeded its step budget."""


class PoleEncountered(RgflowError):
    """The coupling diverged between the reference scale and a target."""


class MultiRootWarning(UserWarning):
    """The bracketed interval contains more than one root; all roots found
    are attached to the warning as ``roots``."""

    def __init__(self, message, roots=()):
        super().__init__(message)
        self.roots = tuple(roots)


class CancellationWarning(UserWarning):
    """A near-common factor of numerator and denominator was cancelled."""


class FallbackWarning(UserWarning):
    """A closed-form solver fell back to a slower or more general method."""
