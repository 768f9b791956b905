"""Exception types shared across the package."""


class GnattyError(Exception):
    """Base class for all library errors."""


class ConfigError(GnattyError):
    """Invalid parameter or precondition violation (CLI exit code 1)."""


class DatasetFormatError(GnattyError):
    """Malformed dataset file (CLI exit code 2)."""

    def __init__(self, path, line_no, message):
        self.path = str(path)
        self.line_no = line_no
        super().__init__(f"{path}:{line_no}: {message}")


class OracleMismatchError(GnattyError):
    """An index returned results that differ from the linear-scan oracle (CLI exit code 3)."""
