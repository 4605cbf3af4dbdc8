"""Exception hierarchy.

Validation problems (bad user input) and internal consistency failures (bugs
or corrupted fixtures) are kept apart because the CLI maps them to different
exit codes.
"""


class ValidationError(ValueError):
    """Input violates a documented precondition or invariant."""


class UnsupportedError(ValidationError):
    """Input is well formed but outside the range this library handles."""


class NotApplicableError(ValidationError):
    """A sufficient criterion was asked about a case its hypotheses do not cover."""


class FixtureRequiredError(LookupError):
    """The computation needs data that is only available as a fixture."""


class InternalError(AssertionError):
    """A result failed a self-check; signals a bug or a corrupted fixture."""
