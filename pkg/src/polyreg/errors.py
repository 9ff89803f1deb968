"""Exception hierarchy shared across the package.

CLI exit codes: InvalidInputError and subclasses map to exit code 2,
SolverFailureError to exit code 3.
"""


class PolyregError(Exception):
    """Base class for all package errors."""


class InvalidInputError(PolyregError, ValueError):
    """Bad user input: malformed data, out-of-range parameters."""


class InvalidConfigError(InvalidInputError):
    """Configuration that cannot be satisfied by the data."""


class TransformDomainError(InvalidInputError):
    """A nonlinear transform was applied outside its domain."""

    def __init__(self, message, column=None):
        super().__init__(message)
        self.column = column


class ParseError(InvalidInputError):
    """Malformed file content; carries location context."""

    def __init__(self, message, path=None, line=None):
        loc = ""
        if path is not None:
            loc += str(path)
        if line is not None:
            loc += ":%d" % line
        if loc:
            message = "%s: %s" % (loc, message)
        super().__init__(message)
        self.path = path
        self.line = line


class UnsupportedVersionError(ParseError):
    """Model/config file written by an unknown format version."""


class SolverFailureError(PolyregError, RuntimeError):
    """Numerical failure inside the LP/MILP machinery."""
