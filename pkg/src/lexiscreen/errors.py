"""Exception hierarchy shared across the package.

Every error raised on a user-facing path derives from LexiscreenError so the
command line layer can map failure classes onto exit codes without matching
on message strings.
"""


class LexiscreenError(Exception):
    """Base class for all package errors."""


class DataError(LexiscreenError):
    """Malformed input data: corpora, dictionaries, schemas, feature files."""


class ModelError(LexiscreenError):
    """Model fitting, serialization, or model/feature compatibility failures."""


class UsageError(LexiscreenError):
    """Invalid arguments or configuration supplied by the caller."""
