"""Exception hierarchy shared by all flmlab modules."""


class FlmError(Exception):
    """Base class for flmlab errors."""


class DimensionMismatch(FlmError, ValueError):
    pass


class RepresentationMismatch(FlmError, TypeError):
    pass


class NotOriginInterior(FlmError, ValueError):
    """The origin is not an interior point, so polarity is undefined."""


class DegenerateInput(FlmError, ValueError):
    """Point set or constraint system is not full-dimensional."""


class UnboundedBody(FlmError, ValueError):
    pass


class EnumerationLimit(FlmError, RuntimeError):
    """A brute-force enumeration would exceed the configured limits."""


class InvalidParameter(FlmError, ValueError):
    pass


class HypothesisViolated(FlmError):
    """Raised only when a caller asks for strict hypothesis checking."""


class UnknownExperiment(FlmError, KeyError):
    pass


class ChecksumMismatch(FlmError):
    pass
