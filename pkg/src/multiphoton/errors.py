"""Exception types shared across the package."""


class MultiphotonError(Exception):
    """Base class for all package errors."""


class CutoffError(MultiphotonError, ValueError):
    """A cavity occupancy would exceed the configured photon cutoff."""


class DimensionError(MultiphotonError, ValueError):
    """Objects built for different numbers of sites or ports were combined."""


class DomainError(MultiphotonError, ValueError):
    """A state has support outside the domain of a partial isometry."""


class NormalizationError(MultiphotonError, ValueError):
    """An operation needing a normalized state received something else."""


class NonUnitaryError(MultiphotonError, ValueError):
    """A scattering matrix failed the unitarity check."""

    def __init__(self, residual: float, tol: float):
        self.residual = residual
        self.tol = tol
        super().__init__(
            f"matrix is not unitary: max |U^dag U - I| = {residual:.3e} (tolerance {tol:.1e})"
        )


class StepTooCoarseError(MultiphotonError, ValueError):
    """The fixed-step integrator drifted too far; more samples are needed."""


class EmptyAcceptanceError(MultiphotonError, ValueError):
    """No detection pattern with nonzero probability is accepted."""


class ProtocolError(MultiphotonError, RuntimeError):
    """The repeat-until-success loop ran out of attempts."""
