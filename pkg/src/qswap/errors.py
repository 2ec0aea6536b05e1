"""Exception hierarchy shared by every module of the package."""


class SwapError(Exception):
    """Base class for all errors raised by qswap."""


class ChannelError(SwapError, ValueError):
    """Invalid Schmidt-channel input."""


class NonNormalizedError(ChannelError):
    pass


class NegativeCoefficientError(ChannelError):
    pass


class DimensionOrderError(ChannelError):
    pass


class LengthMismatchError(ChannelError):
    pass


class IndexOutOfRangeError(SwapError, IndexError):
    pass


class ZeroProbabilitySetError(SwapError):
    """The requested outcome s has p_s = 0 and never occurs."""


class EmptySupportError(SwapError):
    pass


class CompletionFailureError(SwapError):
    """Orthonormal completion of a dilation unitary could not be found."""


class ExhaustedStagesError(SwapError):
    """No further sequential MC stage is meaningful for this set."""


class InvalidPolicyError(SwapError):
    pass


class ZeroSuccessProbabilityError(SwapError):
    pass


class ConfigError(SwapError):
    """Malformed or unknown configuration content."""
