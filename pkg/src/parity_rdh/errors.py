"""Exception classes.

Every domain failure derives from :class:`StegoError`; the CLI prints the
class name as the machine-readable error token.
"""


class StegoError(Exception):
    """Base class for all domain errors raised by this package."""


# image_core
class PgmError(StegoError):
    pass


class MalformedHeader(PgmError):
    pass


class UnsupportedMaxval(PgmError):
    pass


class TruncatedData(PgmError):
    pass


class RegionTooLarge(StegoError):
    pass


# bit_io
class EnvelopeError(StegoError):
    pass


class PayloadTooLarge(EnvelopeError):
    pass


class TruncatedEnvelope(EnvelopeError):
    pass


class LengthNotByteAligned(EnvelopeError):
    pass


# map_codec / sidecar parsing
class CorruptMapStream(StegoError):
    pass


# layer_codec
class NotEmbeddable(StegoError):
    pass


class InconsistentMap(StegoError):
    pass


class InsufficientCapacity(StegoError):
    def __init__(self, message, needed=None, available=None):
        super().__init__(message)
        self.needed = needed
        self.available = available


class OverlapViolation(StegoError):
    pass


class AuxOrderingViolation(StegoError):
    pass


class SecretExhausted(StegoError):
    pass


# pipeline
class LayerCountMismatch(StegoError):
    pass


# metrics
class DimensionMismatch(StegoError):
    pass


# bench
class RoundTripFailure(StegoError):
    """An embed/extract cycle did not reproduce the payload and cover exactly."""
