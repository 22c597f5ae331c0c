"""Exception types raised across the package."""


class RPRegError(Exception):
    """Base class for all package errors."""


class UnsupportedFormatError(RPRegError, ValueError):
    pass


class ChannelUnavailableError(RPRegError, ValueError):
    pass


class ImageTooSmallError(RPRegError, ValueError):
    pass


class AngleOutOfRangeError(RPRegError, ValueError):
    pass


class EmptyRegionError(RPRegError, ValueError):
    pass


class PatchOutOfBoundsError(RPRegError, IndexError):
    pass


class DimensionMismatchError(RPRegError, ValueError):
    pass


class TooFewSamplesError(RPRegError, ValueError):
    pass


class DegenerateSampleError(RPRegError, ArithmeticError):
    """The sample makes the estimate non-finite (duplicate points, zero extent)."""


class ZeroVolumeError(DegenerateSampleError):
    pass


class AlphaInvalidError(RPRegError, ValueError):
    pass


class InvalidRangeError(RPRegError, ValueError):
    pass


class GroupTooLargeError(RPRegError, ValueError):
    pass


class AllGroupsDegenerateError(DegenerateSampleError):
    pass


class EmptyInputError(RPRegError, ValueError):
    pass


class ConfigError(RPRegError, ValueError):
    pass


class DatasetError(RPRegError):
    pass
