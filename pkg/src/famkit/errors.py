"""Typed error hierarchy.

Every data-dependent failure raises a subclass of :class:`FamError` so the
CLI can report the error name on stderr and exit with a stable code instead
of dumping a traceback.
"""


class FamError(Exception):
    """Base class for all validation and computation errors."""

    @property
    def name(self) -> str:
        return type(self).__name__


# ---- tensor validation -------------------------------------------------

class NonFinite(FamError):
    """Input contains NaN or Inf."""


class EmptyDimension(FamError):
    """A tensor dimension is zero."""


class DimMismatch(FamError):
    """Shapes of two operands are incompatible."""


class LengthMismatch(FamError):
    """Two vectors that must match in length do not."""


# ---- tensor file exchange ----------------------------------------------

class NpyFormatError(FamError):
    """Base class for tensor-file parsing failures."""


class BadMagic(NpyFormatError):
    """File does not start with the expected magic/version bytes."""


class BadHeader(NpyFormatError):
    """Header dict is malformed, fortran-ordered, or has an unusable shape."""


class UnsupportedDtype(NpyFormatError):
    """Only little-endian 32/64-bit floats are accepted."""


class TruncatedPayload(NpyFormatError):
    """Payload size does not match the shape declared in the header."""


class IoFailure(FamError):
    """Underlying OS write failed."""


# ---- similarity and contributions --------------------------------------

class ZeroNorm(FamError):
    """Cosine similarity is undefined for a zero-norm vector."""


class EmptySupportSet(FamError):
    """At least one support embedding is required."""


class ZeroSimilarity(FamError):
    """A support pair has exactly zero similarity; the per-channel weight
    denominator vanishes and the pair carries no sign information."""


# ---- projection ---------------------------------------------------------

class BiasUnsupported(FamError):
    """Projection bias breaks the contribution-conservation identity; pass
    --ignore-bias to use it for embedding projection only."""


# ---- map composition -----------------------------------------------------

class NotNormalized(FamError):
    """compose expects max-min normalized weights."""


class BadClassIndex(FamError):
    """Class index outside the classifier weight matrix."""


# ---- evaluation -----------------------------------------------------------

class ZeroEnergy(FamError):
    """Saliency map sums to zero; energy proportion is undefined."""


class BoxOutOfBounds(FamError):
    """Bounding box extends past the image extent."""


class InvalidBox(FamError):
    """Box coordinates violate 0 <= x0 < x1, 0 <= y0 < y1."""


class NonPositiveMax(FamError):
    """Binarization threshold needs a positive map maximum."""


class EmptyMask(FamError):
    """Mask has no true pixel."""


class ZeroScore(FamError):
    """Relative drop is undefined for zero or negative reference scores."""


# ---- toy forward engine ---------------------------------------------------

class KernelLargerThanPaddedInput(FamError):
    """Convolution kernel does not fit inside the padded input."""


class WindowTooLarge(FamError):
    """Pooling window larger than the input."""


class BadLayerSpec(FamError):
    """Model description JSON is malformed."""


# ---- manifests -------------------------------------------------------------

class ManifestError(FamError):
    """Experiment or corpus manifest is malformed."""
