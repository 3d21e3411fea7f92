from abc import ABC, abstractmethod
from typing import Callable, Dict

from .exceptions import InvalidParameterError


def clamp_probability(p: float) -> float:
    return min(1.0, max(0.0, p))


class ValuationDistribution(ABC):
    """Закон распределения частной оценки участника (cdf/pdf/quantile)."""

    kind: str = ""

    def __init__(self, upper: float, support_lo: float = 0.0):
        if not 0.0 <= support_lo < upper:
            raise InvalidParameterError(
                f"Носитель распределения должен удовлетворять 0 <= lo < A, "
                f"получено lo={support_lo}, A={upper}"
            )
        self._upper = float(upper)
        self._support_lo = float(support_lo)

    @property
    def upper(self) -> float:
        return self._upper

    @property
    def support_lo(self) -> float:
        return self._support_lo

    @abstractmethod
    def cdf(self, x: float) -> float:
        pass

    @abstractmethod
    def pdf(self, x: float) -> float:
        pass

    @abstractmethod
    def quantile(self, p: float) -> float:
        pass

    def contains(self, x: float) -> bool:
        return self._support_lo <= x <= self._upper

    def __repr__(self) -> str:
        return (f"{self.__class__.__name__}(A={self._upper}, "
                f"support_lo={self._support_lo})")

    def __eq__(self, other) -> bool:
        return (type(self) is type(other)
                and self._upper == other._upper
                and self._support_lo == other._support_lo)

    def __hash__(self) -> int:
        return hash((self.kind, self._upper, self._support_lo))


class UniformDistribution(ValuationDistribution):

    kind = "uniform"

    @property
    def width(self) -> float:
        return self._upper - self._support_lo

    @property
    def is_standard(self) -> bool:
        """Носитель [0, A]: для него действуют замкнутые формулы."""
        return self._support_lo == 0.0

    def cdf(self, x: float) -> float:
        return clamp_probability((x - self._support_lo) / self.width)

    def pdf(self, x: float) -> float:
        if x < self._support_lo or x > self._upper:
            return 0.0
        return 1.0 / self.width

    def quantile(self, p: float) -> float:
        if not 0.0 <= p <= 1.0:
            raise InvalidParameterError(f"Вероятность вне [0, 1]: {p}")
        return self._support_lo + p * self.width


_distribution_registry: Dict[str, Callable[..., ValuationDistribution]] = {}


def register_distribution(kind: str,
                          factory: Callable[..., ValuationDistribution]):
    _distribution_registry[kind] = factory


def get_distribution(kind: str, A: float,
                     support_lo: float = 0.0) -> ValuationDistribution:
    kind = kind.lower()
    if kind not in _distribution_registry:
        raise InvalidParameterError(
            f"Неизвестный тип распределения '{kind}', "
            f"доступны: {', '.join(sorted(_distribution_registry))}"
        )
    return _distribution_registry[kind](A, support_lo)


def get_supported_kinds() -> list:
    return list(_distribution_registry.keys())


register_distribution(UniformDistribution.kind, UniformDistribution)
