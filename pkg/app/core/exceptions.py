"""Custom exceptions for the application."""


class CKPException(Exception):
    """Base exception for the ckp-algebra application."""

    def __init__(
        self,
        message: str,
        detail: str | None = None,
        exit_code: int = 1,
    ) -> None:
        self.message = message
        self.detail = detail
        self.exit_code = exit_code
        super().__init__(self.message)


class ValidationError(CKPException):
    """Malformed user input exception."""

    def __init__(self, message: str, detail: str | None = None) -> None:
        super().__init__(message, detail, exit_code=2)


class PartitionError(ValidationError):
    """Invalid partition or part operation exception."""


class MatrixError(ValidationError):
    """Invalid matrix for a Pfaffian or Hafnian exception."""


class SeriesError(CKPException):
    """Formal series that cannot be expanded exception."""

    def __init__(self, message: str, detail: str | None = None) -> None:
        super().__init__(message, detail, exit_code=1)


class GradingError(CKPException):
    """Inconsistent grading exception."""

    def __init__(self, message: str, detail: str | None = None) -> None:
        super().__init__(message, detail, exit_code=1)


class WindowError(CKPException):
    """Expansion window too small for the requested cap exception."""

    def __init__(self, message: str, detail: str | None = None) -> None:
        super().__init__(message, detail, exit_code=2)


class ConfigurationError(CKPException):
    """Configuration error exception."""

    def __init__(self, message: str, detail: str | None = None) -> None:
        super().__init__(message, detail, exit_code=2)
