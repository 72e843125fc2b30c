"""Exception taxonomy shared by all revdoe modules.

Two failure classes matter to callers: bad input (the request can never
succeed as posed) and numerical breakdown (the request is well posed but
the computation could not be completed). The CLI maps them to exit codes
2 and 3 respectively.
"""


class RevdoeError(Exception):
    """Base class for all revdoe errors."""


class ValidationError(RevdoeError):
    """Input violates a documented precondition or type invariant."""


class NumericalError(RevdoeError):
    """A numerical procedure failed: singular system, unbounded problem,
    or an iteration cap was exceeded."""
