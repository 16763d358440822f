"""Exception taxonomy shared across the package.

The CLI maps these onto exit codes: malformed input -> 2, precondition
failures -> 3, internal invariant violations -> 4. Verifier mismatches are
reported through structured reports (exit 1), not exceptions.
"""


class NaiveAError(Exception):
    """Base class for every error raised by this package."""


class MalformedInputError(NaiveAError):
    """Input file, schema, or parameter that cannot be interpreted."""


class UnknownPointError(MalformedInputError):
    """A point id that does not belong to the space at hand."""


class PreconditionError(NaiveAError):
    """A well-formed input that fails a documented precondition.

    Carries an optional structured report (e.g. the instance check report)
    so the CLI can print per-violation detail.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class InternalInvariantError(NaiveAError):
    """A condition the construction guarantees was observed to fail."""
