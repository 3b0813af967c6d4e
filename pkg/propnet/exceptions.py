__all__ = [
    "PropnetError",
    "ParseError",
    "DimensionMismatch",
    "InvalidResolution",
    "InvalidPatchSize",
    "AntennaOutsideMap",
    "AllNoData",
    "AngleOutOfRange",
    "MissingCut",
    "InvalidPattern",
    "ScaleOverflow",
    "NonSquare",
    "OutOfValidityRange",
    "RangeWarning",
    "NonPositiveDistance",
    "NonPositiveInput",
    "RankDeficient",
    "SamePixel",
    "DegenerateGeometry",
    "ShapeMismatch",
    "NonDivisibleSize",
    "NoValidPixels",
    "PlacementExhausted",
    "EmptySplit",
    "ConfigError",
]


class PropnetError(ValueError):
    """Base class of every error raised by propnet."""


class ParseError(PropnetError):
    """A file does not follow its declared text or binary format."""


class DimensionMismatch(PropnetError):
    """The declared and the actual number of cells of a raster differ, or layers do not align."""


class InvalidResolution(PropnetError):
    """A raster resolution is not strictly positive."""


class InvalidPatchSize(PropnetError):
    """A requested patch is smaller than the minimal 8x8 pixels."""


class AntennaOutsideMap(PropnetError):
    """The antenna location falls outside the map bounds."""


class AllNoData(PropnetError):
    """A layer holds no valid cell at all."""


class AngleOutOfRange(PropnetError):
    """An elevation angle outside [-90, 90] degrees."""


class MissingCut(PropnetError):
    """A radiation pattern file lacks its horizontal or vertical cut."""


class InvalidPattern(PropnetError):
    """Radiation pattern cuts violate the relative-gain conventions."""


class ScaleOverflow(PropnetError):
    """A scaled tensor channel exceeds the admissible magnitude, usually because of wrong units."""


class NonSquare(PropnetError):
    """A 90 or 270 degree rotation was requested on a non-square tensor."""


class OutOfValidityRange(PropnetError):
    """Empirical model inputs outside the published validity ranges (strict mode)."""


class RangeWarning(UserWarning):
    """Empirical model inputs outside the published validity ranges (permissive mode)."""


class NonPositiveDistance(PropnetError):
    """A distance that must be strictly positive is not."""


class NonPositiveInput(PropnetError):
    """A distance or frequency that must be strictly positive is not."""


class RankDeficient(PropnetError):
    """Too few measurements to determine the free parameters of a fit."""


class SamePixel(PropnetError):
    """A path profile was requested from the antenna pixel to itself."""


class DegenerateGeometry(PropnetError):
    """A diffraction edge coincides with one of the path endpoints."""


class ShapeMismatch(PropnetError):
    """Array shapes are inconsistent with each other or with the architecture."""


class NonDivisibleSize(PropnetError):
    """The spatial size of a tensor is not divisible by 2 ** depth."""


class NoValidPixels(PropnetError):
    """A validity mask selects no pixel."""


class PlacementExhausted(PropnetError):
    """Antennas cannot be placed with the required separation."""


class EmptySplit(PropnetError):
    """A dataset split holds no sample."""


class ConfigError(PropnetError):
    """A run configuration is invalid or refers to missing paths."""
