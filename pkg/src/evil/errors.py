"""Exception hierarchy shared by all toolkit modules.

The CLI maps these onto exit codes: contract/validation problems exit 1,
I/O problems exit 2.
"""


class EvilError(Exception):
    """Base class for all toolkit errors."""


class DataLoadError(EvilError):
    """A required file or directory is missing or unreadable."""


class RecordParseError(EvilError):
    """A record in an input file could not be decoded."""

    def __init__(self, message, *, index=None, path=None):
        self.index = index
        self.path = path
        detail = message
        if path is not None:
            detail = f"{path}: {detail}"
        if index is not None:
            detail = f"{detail} (record {index})"
        super().__init__(detail)


class ValidationError(EvilError):
    """Data violates a domain invariant (names the offending sample/field)."""


class ContractError(EvilError):
    """An operation was called outside its stated precondition."""


class CoordinateRangeError(ContractError):
    """A pixel coordinate falls outside its image extent."""


class JoinError(ContractError):
    """Predictions and gold samples could not be joined by id."""

    def __init__(self, message, *, missing_ids=()):
        self.missing_ids = tuple(missing_ids)
        super().__init__(message)


class AuthorizationError(EvilError):
    """Caller is not on the annotator allow-list."""


class ConflictError(EvilError):
    """Submission conflicts with a missing lease or an earlier submission."""


class ProviderError(EvilError):
    """An embedding provider could not produce vectors."""
