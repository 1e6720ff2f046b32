"""Exception hierarchy.

Every error raised on bad input derives from :class:`MorreyLabError`, which
is itself a ``ValueError`` so callers that only care about "bad argument" can
catch that.
"""


class MorreyLabError(ValueError):
    pass


class InvalidDomainError(MorreyLabError):
    pass


class SamplingError(MorreyLabError):
    pass


class RadiusTooSmallError(MorreyLabError):
    pass


class InvalidRadiiError(MorreyLabError):
    pass


class InvalidExponentError(MorreyLabError):
    pass


class InvalidFieldError(MorreyLabError):
    pass


class IncompatibleFieldsError(MorreyLabError):
    pass


class InvalidKernelError(MorreyLabError):
    pass


class TruncationBelowGridError(MorreyLabError):
    pass


class InadmissibleExponentsError(MorreyLabError):
    pass


class InvalidCorpusError(MorreyLabError):
    pass


class UnknownOperatorError(MorreyLabError):
    pass


class InvalidCoefficientsError(MorreyLabError):
    pass


class SupportViolationError(MorreyLabError):
    pass


class ConfigError(MorreyLabError):
    """Configuration parse/validation failure; message names the field."""
