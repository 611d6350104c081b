"""Exception types shared across the package."""


class BnlabError(Exception):
    """Base class for package errors."""


class NonFiniteKL(BnlabError):
    """A positive-probability outcome has zero model probability."""


class EmptySurvivorSet(BnlabError):
    """An elimination round removed every profile (inconsistent spec or
    too-coarse mixture search)."""


class NotConverged(BnlabError):
    """Iteration hit its round limit before reaching a fixed set/point."""

    def __init__(self, message, history=None):
        super().__init__(message)
        self.history = history


class UnidentifiedModel(BnlabError):
    """A KL-minimizer tie exceeds tolerance where a unique minimizer is
    required."""


class DegenerateLikelihood(BnlabError):
    """All parameter likelihoods underflowed to zero simultaneously."""


class NotCorrectlySpecified(BnlabError):
    """Operation requires a correctly specified model (alpha == alpha*)."""


class UnknownExample(BnlabError):
    """Unrecognized worked-example name."""


class SchemaError(BnlabError):
    """Spec document fails schema validation."""
