"""Exception types shared across the package."""


class GraphCFError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(GraphCFError):
    """Malformed input bytes. Carries an approximate byte offset when known."""

    def __init__(self, message, offset=None):
        if offset is not None:
            message = f"{message} (byte offset {offset})"
        super().__init__(message)
        self.offset = offset


class ValidationError(GraphCFError):
    """A domain invariant does not hold for the given value."""


class ConfigError(GraphCFError):
    """Inconsistent configuration: dimension mismatch, missing seed, bad flag."""


class NumericalError(GraphCFError):
    """A computation produced a non-finite intermediate value."""


class MissingArtifactError(GraphCFError):
    """A prerequisite artifact file is absent."""

    def __init__(self, path):
        super().__init__(f"missing artifact: {path}")
        self.path = str(path)
