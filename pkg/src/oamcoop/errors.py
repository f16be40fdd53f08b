"""Exception types shared across the simulator."""


class OamCoopError(Exception):
    """Base class for all simulator errors."""


class NoRingError(OamCoopError, ValueError):
    """A ring-based operation was asked for a beam with no off-axis ring (mode 0)."""


class ModeOrderError(OamCoopError, ValueError):
    """Requested OAM mode order is outside the modeled range."""


class WaistInfeasibleError(OamCoopError, ValueError):
    """No waist produces the requested ring radius at the requested distance.

    ``deficit`` is how far the target radius falls short of the smallest
    achievable ring radius at that distance, in meters.
    """

    def __init__(self, message: str, deficit: float):
        super().__init__(message)
        self.deficit = deficit


class DegenerateChordError(OamCoopError, ValueError):
    """A chord operation received two coincident endpoints."""


class ParallelChordsError(OamCoopError, ValueError):
    """Perpendicular bisectors do not meet in a unique point."""


class NotSimpleQuadrilateralError(OamCoopError, ValueError):
    """Four points in cycle order do not form a simple quadrilateral."""


class InsufficientUsersError(OamCoopError, ValueError):
    """Fewer than four users are available for group selection."""


class OracleSizeError(OamCoopError, ValueError):
    """Instance is too large for the exhaustive selection oracle."""


class InfeasiblePlacementError(OamCoopError, ValueError):
    """A placement violates the chord feasibility bounds at its true distances."""


class InfeasibleScenarioError(OamCoopError, RuntimeError):
    """A scenario yields no usable user selection."""


class ConfigError(OamCoopError, ValueError):
    """A configuration file or value is invalid."""
