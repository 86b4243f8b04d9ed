"""exceptions: custom exceptions for the dynamic inference toolkit"""


class DynInferException(Exception):
    """base for every error the toolkit raises on purpose"""

    @property
    def code(self):
        return type(self).__name__


class ModelError(DynInferException):
    """problem data could not be turned into a valid Problem"""
    pass


class DimensionMismatch(ModelError):
    """kernel or loss table shaped for the wrong alphabet"""
    pass


class NotStochastic(ModelError):
    """a distribution row has a negative entry or does not sum to one"""
    pass


class HorizonMismatch(ModelError):
    """kernel count does not agree with the horizon"""
    pass


class ModelFormatError(ModelError):
    """malformed model/strategy document"""
    pass


class UnknownLabel(DynInferException):
    """label is not part of the alphabet"""
    pass


class RoundOutOfRange(DynInferException):
    """round index outside 1..n"""
    pass


class MismatchedResult(DynInferException):
    """a result table was produced for a different problem"""
    pass


class ShapeMismatch(DynInferException):
    """strategy does not cover the problem's rounds and observations"""
    pass


class HistoryIncomplete(DynInferException):
    """history strategy has no decision for a history it is asked about"""
    pass


class SearchSpaceTooLarge(DynInferException):
    """exhaustive enumeration would exceed the configured limit"""

    def __init__(self, message, count=None, limit=None):
        super(SearchSpaceTooLarge, self).__init__(message)
        self.count = count
        self.limit = limit


class InvalidParams(DynInferException):
    """example model parameters are out of range"""
    pass
