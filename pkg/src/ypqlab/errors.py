"""Exception hierarchy for the ypqlab package."""


class YpqError(Exception):
    """Base class for all package errors."""


class ParamOutOfRange(YpqError):
    pass


class UnsupportedC(YpqError):
    pass


class RootFindingFailed(YpqError):
    pass


class PointOutOfDomain(YpqError):
    pass


class DimensionMismatch(YpqError):
    pass


class DegreeOverflow(YpqError):
    pass


class ZeroDegree(YpqError):
    pass


class MixedValence(YpqError):
    pass


class BadSlots(YpqError):
    pass


class SingularMetric(YpqError):
    pass


class DegreeMismatch(YpqError):
    pass


class StepFailure(YpqError):
    pass


class DegenerateState(YpqError):
    pass


class BadInitialState(YpqError):
    pass
