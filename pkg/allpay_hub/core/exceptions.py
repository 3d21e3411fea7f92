from typing import Any, Dict, List, Optional


def _rebuild(cls, args, state):
    error = Exception.__new__(cls)
    error.args = args
    error.__dict__.update(state)
    return error


class AllPayError(Exception):

    # Ошибки пересекают границу процессов в пуле испытаний
    def __reduce__(self):
        return _rebuild, (self.__class__, self.args, self.__dict__)


class InvalidParameterError(AllPayError, ValueError):
    pass


class DomainError(InvalidParameterError):

    def __init__(self, name: str, value: float, lower: float, upper: float):
        self.name = name
        self.value = value
        self.lower = lower
        self.upper = upper
        super().__init__(
            f"Значение {name}={value:.6f} вне допустимого диапазона "
            f"[{lower:.6f}, {upper:.6f}]"
        )


class SingularParameterError(InvalidParameterError):
    pass


class SolverError(AllPayError):

    def __init__(self, reason: str, bracket: Optional[tuple] = None,
                 residuals: Optional[tuple] = None):
        self.reason = reason
        self.bracket = bracket
        self.residuals = residuals
        message = f"Ошибка численного решателя: {reason}"
        if bracket is not None and residuals is not None:
            message += (f" (интервал [{bracket[0]:.6f}, {bracket[1]:.6f}], "
                        f"невязки {residuals[0]:.6e} / {residuals[1]:.6e})")
        super().__init__(message)


class NoRootError(SolverError):

    def __init__(self, reason: str, parameters: Dict[str, Any]):
        self.parameters = parameters
        details = ", ".join(f"{k}={v}" for k, v in parameters.items())
        super().__init__(f"{reason} [{details}]")


class ConfigValidationError(AllPayError, ValueError):

    def __init__(self, fields: List[str], problems: List[str]):
        self.fields = fields
        self.problems = problems
        super().__init__(
            "Некорректная конфигурация: " + "; ".join(problems)
        )


class ScenarioFileError(AllPayError):
    pass


class TrialError(AllPayError):

    def __init__(self, trial: int, cause: Exception):
        self.trial = trial
        self.cause = cause
        super().__init__(f"Испытание {trial} завершилось ошибкой: {cause}")
