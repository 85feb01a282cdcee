"""Exception types shared across the package."""


class PenError(Exception):
    """Base class for all errors raised by this package."""


class DecodeError(PenError):
    """Raised when an image file exists but cannot be decoded."""


class ShapeMismatchError(PenError, ValueError):
    """Two arrays that must share a shape do not."""


class BadShapeError(PenError, ValueError):
    """An input violates a size/divisibility requirement of the network."""


class InvalidSizeError(PenError, ValueError):
    """Requested image size is out of the supported range."""


class InvalidFactorError(PenError, ValueError):
    """Photometric enhancement factor must be > 0."""


class EmptyDatasetError(PenError):
    """A dataset root yields no usable samples."""


class EmptyTextError(PenError, ValueError):
    """Text rendering was requested with no glyphs to draw."""


class GlyphOverflowError(PenError, ValueError):
    """A rendered glyph would fall outside the target image."""


class LengthMismatchError(PenError, ValueError):
    """Paired sequences have different lengths."""


class NonFiniteTermError(PenError, ValueError):
    """A loss term is NaN or infinite."""


class TooSmallError(PenError, ValueError):
    """Image too small for a windowed metric."""


class NoDetectorError(PenError):
    """Detection-based evaluation was requested without an injected detector."""


class ConfigError(PenError):
    """Malformed configuration file or override."""


class BadCheckpointError(PenError):
    """Checkpoint file is missing, malformed, or inconsistent."""


class MissingStrokeInitError(PenError):
    """A training stage requires an earlier checkpoint that was not provided."""
