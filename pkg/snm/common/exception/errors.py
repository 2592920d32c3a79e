from typing import Any

from snm.common.enums import ExitCode


class BaseExceptionError(Exception):
    """Base exception mixin class"""

    code: int

    def __init__(self, *, msg: str | None = None, data: Any = None) -> None:
        self.msg = msg
        self.data = data
        super().__init__(msg)


class ConfigError(BaseExceptionError):
    """Invalid configuration or call arguments"""

    code = ExitCode.config_error

    def __init__(self, *, msg: str = 'Invalid configuration', data: Any = None) -> None:
        super().__init__(msg=msg, data=data)


class DomainError(BaseExceptionError):
    """Argument outside the mathematical domain"""

    code = ExitCode.config_error

    def __init__(self, *, msg: str = 'Argument outside domain', data: Any = None) -> None:
        super().__init__(msg=msg, data=data)


class CapabilityError(BaseExceptionError):
    """Requested functional not available for the family"""

    code = ExitCode.config_error

    def __init__(self, *, msg: str = 'Unsupported moment', data: Any = None) -> None:
        super().__init__(msg=msg, data=data)


class EvaluationError(BaseExceptionError):
    """Non-finite integrand value"""

    code = ExitCode.validation_failure

    def __init__(self, *, msg: str = 'Non-finite integrand value', data: Any = None) -> None:
        super().__init__(msg=msg, data=data)


class DegenerateSampleError(BaseExceptionError):
    """Sample carries no information for the fit"""

    code = ExitCode.config_error

    def __init__(self, *, msg: str = 'Degenerate sample', data: Any = None) -> None:
        super().__init__(msg=msg, data=data)


class EnumerationRefusedError(BaseExceptionError):
    """Exact enumeration cannot certify its result"""

    code = ExitCode.config_error

    def __init__(self, *, msg: str = 'Enumeration refused', data: Any = None) -> None:
        super().__init__(msg=msg, data=data)


class ValidationFailure(BaseExceptionError):
    """Engine and oracle disagree"""

    code = ExitCode.validation_failure

    def __init__(self, *, msg: str = 'Validation failed', data: Any = None) -> None:
        super().__init__(msg=msg, data=data)
