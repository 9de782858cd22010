"""Exception types shared across the package."""


class SpiralFlowError(Exception):
    """Base class for all package-specific errors."""


class DegenerateDomain(SpiralFlowError):
    """Domain geometry violates a structural requirement."""


class HoleTooSmall(SpiralFlowError):
    """Grid spacing is too coarse to resolve the excluded holes."""


class NotOnBoundary(SpiralFlowError):
    """Queried point is not within tolerance of the domain boundary."""


class SingularPoint(SpiralFlowError):
    """Evaluation requested at (or too close to) a spiral center."""


class NumericalFailure(SpiralFlowError):
    """A numerical routine produced non-finite or inconsistent values."""


class Blowup(NumericalFailure):
    """Solution left the a-priori barrier corridor; the run is invalid."""


class NotReady(SpiralFlowError):
    """Operation requires state that has not been initialized yet."""


class InsufficientData(SpiralFlowError):
    """Not enough samples to produce the requested estimate."""


class HypothesisViolated(SpiralFlowError):
    """Analytical result invoked outside the regime where it holds."""


class DegenerateLevelSet(SpiralFlowError):
    """Phase field is too flat for a meaningful curve extraction."""


class UnknownScenario(SpiralFlowError):
    """Requested scenario name is not in the catalog."""


class SnapshotIOFailure(SpiralFlowError):
    """Writing a snapshot or report artifact failed."""
