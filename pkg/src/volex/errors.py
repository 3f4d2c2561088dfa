"""Exception types shared across the package."""


class VolexError(Exception):
    """Base class for all package-specific errors."""


class ConfigurationError(VolexError):
    """Invalid run or environment parameters."""


class VoxelFormatError(VolexError):
    """Base class for voxel file parse errors."""


class MalformedHeaderError(VoxelFormatError):
    """Magic line, dims line, or resolution line is missing or unreadable."""


class DimensionMismatchError(VoxelFormatError):
    """Declared dimensions are invalid (wrong count, non-positive, unparseable)."""


class PayloadSizeError(VoxelFormatError):
    """Payload length or content does not match the declared dimensions."""


class ObservationConflictError(VolexError):
    """An observation contradicts a cell that is already known.

    Sensing is noiseless, so a conflict means the caller fused observations
    from inconsistent worlds; the belief map refuses to flip a known cell.
    """


class EnumerationLimitError(VolexError):
    """An exact-expectation query touches more unknown cells than allowed."""


class PlannerIntegrityError(VolexError):
    """A coordinator committed a trajectory that is not safe to execute."""
