from enum import Enum
from typing import Iterable, Sequence, Tuple, Type, TypeVar

import numpy as np

from ..infra.settings import settings
from .exceptions import InvalidParameterError

E = TypeVar("E", bound=Enum)


def parse_enum(enum_type: Type[E], value, name: str) -> E:
    """Приводит строку к значению перечисления или сообщает допустимые варианты."""
    try:
        return enum_type(value)
    except ValueError:
        allowed = ", ".join(item.value for item in enum_type)
        raise InvalidParameterError(
            f"{name}={value!r} не поддерживается, допустимо: {allowed}"
        )


def format_value(value: float, precision: int = None) -> str:
    if precision is None:
        precision = int(settings.get("precision", 6))
    # -0.000000 и 0.000000 должны совпадать побайтно
    text = f"{value:.{precision}f}"
    if text.startswith("-") and float(text) == 0.0:
        text = text[1:]
    return text


def join_values(values: Iterable[float], precision: int = None) -> str:
    return ";".join(format_value(v, precision) for v in values)


def join_ids(ids: Iterable[int]) -> str:
    return ";".join(str(i) for i in ids)


def mean_std(values: Sequence[float]) -> Tuple[float, float]:
    """Среднее и несмещенное стандартное отклонение (знаменатель n-1)."""
    if len(values) == 0:
        return 0.0, 0.0
    data = np.asarray(values, dtype=float)
    mean = float(np.mean(data))
    std = float(np.std(data, ddof=1)) if len(data) > 1 else 0.0
    return mean, std
