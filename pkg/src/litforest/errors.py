"""Exception hierarchy shared across the package."""


class LitForestError(Exception):
    """Base class for all errors raised by this package."""


class MissingEvidence(LitForestError):
    """No study contributes a moment for the requested (variable, group)."""


class MissingFallback(LitForestError):
    """A correlation is absent from the evidence and no fallback covariance was given."""


class ShapeError(LitForestError):
    """A matrix or vector has the wrong shape or is not symmetric."""


class NotPositiveSemidefinite(LitForestError):
    """A covariance matrix has a numerically negative pivot; repair it first."""


class SchemaMismatch(LitForestError):
    """Two datasets or a dataset and a model disagree on the feature space."""


class InsufficientData(LitForestError):
    """Too few rows to estimate the requested statistics."""


class EmptyColumn(LitForestError):
    """A training column contains no observed value."""


class DegenerateReliability(LitForestError):
    """Reliability of 1 makes the reliable-change denominator zero."""


class SingleClass(LitForestError):
    """An operation requiring both classes received only one."""


class EmptyData(LitForestError):
    """A fit was requested on an empty dataset."""


class InvalidWeight(LitForestError):
    """A pretraining weight outside [0, inf) was supplied."""


class StratificationError(LitForestError):
    """A class is too small to be present in every cross-validation fold."""


class UndefinedRate(LitForestError):
    """Sensitivity or specificity is undefined because a class is absent."""


class InsufficientIterations(LitForestError):
    """The corrected t-test needs at least two paired differences."""


class DegenerateVariance(LitForestError):
    """All paired differences are identical but nonzero; the t-statistic diverges."""


class PairingError(LitForestError):
    """Two approaches cannot be compared because their iterations do not pair up."""
