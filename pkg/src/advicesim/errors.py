"""Exception hierarchy shared by every module.

All errors derive from :class:`AdviceSimError`; the ones signalling a bad
argument also derive from :class:`ValueError` so callers can catch either.
"""


class AdviceSimError(Exception):
    pass


class DistributionError(AdviceSimError, ValueError):
    pass


class NotNormalized(DistributionError):
    pass


class IndexOutOfRange(DistributionError):
    pass


class NegativeProbability(DistributionError):
    pass


class DuplicateIndex(DistributionError):
    pass


class WidthMismatch(DistributionError):
    pass


class DistributionFileError(DistributionError):
    pass


class EmptyBatch(DistributionError):
    pass


class AllMassInS(DistributionError):
    pass


class AdviceTooLongForWidth(AdviceSimError, ValueError):
    pass


class DecodeFailed(AdviceSimError):
    """Decoding could not produce a trustworthy advice string."""


class GuardMismatch(DecodeFailed):
    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class DegenerateEstimate(DecodeFailed):
    pass


class HTooLarge(AdviceSimError, ValueError):
    pass


class InsufficientNonSSamples(AdviceSimError):
    pass


class BoundVacuous(AdviceSimError, ValueError):
    pass


class ZeroTV(AdviceSimError, ValueError):
    pass


class InconsistentTrainingSet(AdviceSimError, ValueError):
    pass


class ExactModeTooLarge(AdviceSimError, ValueError):
    pass


class PTooLarge(AdviceSimError, ValueError):
    pass


class EvenK(AdviceSimError, ValueError):
    pass


class TooLarge(AdviceSimError, ValueError):
    pass


class PeOutOfRange(AdviceSimError, ValueError):
    pass


class P0OutOfBounds(AdviceSimError, ValueError):
    pass


class UnknownExperiment(AdviceSimError, KeyError):
    pass


class InvalidParameters(AdviceSimError, ValueError):
    pass
