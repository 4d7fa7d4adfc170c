"""Exceptions raised by fairness_probe.

Every exception carries the exit code the command line returns for it.

"""


class FairnessProbeError(Exception):

    """Base class of every error fairness_probe raises on purpose.

    Attributes:
        exit_code (int): Process exit code returned by the command line for this error.
        partial: Partial ScoreResult or SearchResult computed before the failure, or None.

    """

    exit_code = 1

    def __init__(self, message, partial=None):
        super(FairnessProbeError, self).__init__(message)
        self.partial = partial


class UsageError(FairnessProbeError):
    """Bad command line flags or invalid configuration values."""


class FixtureError(FairnessProbeError):
    """A fixture spec that is malformed or does not fit the schema."""


class SchemaError(FairnessProbeError):
    """A malformed or invalid schema document, or an input that does not fit a schema."""

    exit_code = 3


class SuiteError(FairnessProbeError):
    """A malformed test-suite file."""

    exit_code = 3


class ProfileError(FairnessProbeError):
    """A malformed operational profile."""

    exit_code = 3


class BoundExceededError(FairnessProbeError):
    """A domain or subset lattice too large for exhaustive enumeration."""

    exit_code = 4


class SubjectError(FairnessProbeError):

    """The subject under test failed to answer a request.

    Attributes:
        request (str): The serialized request line, so the failure can be reproduced by hand.

    """

    exit_code = 2

    def __init__(self, message, request=None, partial=None):
        if request is not None:
            message = f"{message} (request: {request!r})"
        super(SubjectError, self).__init__(message, partial=partial)
        self.request = request


class SubjectCrashedError(SubjectError):
    """The subject process exited or closed its output."""


class MalformedResponseError(SubjectError):
    """The subject answered with something other than true, false, 1 or 0."""


class SubjectTimeoutError(SubjectError):
    """The subject did not answer within the configured timeout."""


class DeterminismError(SubjectError):
    """The subject answered the same input differently on two evaluations."""
