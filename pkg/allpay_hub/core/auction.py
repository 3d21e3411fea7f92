"""Равновесные ставки, резервные значения и ожидаемая выручка all-pay аукциона.

Все функции чистые: результат зависит только от аргументов.
Замкнутые формулы применяются для равномерного закона на [0, A],
для остальных законов используется квадратура и бисекция (scipy).
"""
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Sequence

from scipy import integrate, optimize

from ..infra.settings import settings
from ..logging_config import get_logger
from .distributions import UniformDistribution, ValuationDistribution
from .exceptions import (
    DomainError,
    InvalidParameterError,
    NoRootError,
    SingularParameterError,
    SolverError,
)
from .utils import parse_enum

logger = get_logger(__name__)

QUAD_LIMIT = int(settings.get("quad_limit", 50))
BISECT_MAXITER = int(settings.get("bisect_maxiter", 200))
QUAD_REL_TOL = 1e-9
ROOT_REL_TOL = 1e-9


class BidRule(str, Enum):
    # интеграл делится на (1 - lambda/n)
    EQUILIBRIUM = "eq9"
    # интеграл умножается на (n - lambda)/n
    SCALED = "eq20"


class EvalMethod(str, Enum):
    AUTO = "auto"
    CLOSED_FORM = "closed_form"
    QUADRATURE = "quadrature"
    BISECTION = "bisection"


@dataclass(frozen=True)
class BidParams:
    n: int
    lam: float
    rule: BidRule = BidRule.EQUILIBRIUM
    v_min: float = 0.0

    def __post_init__(self):
        _check_count(self.n, minimum=1)
        _check_lambda(self.lam)
        if self.v_min < 0:
            raise InvalidParameterError(
                f"v_min должен быть неотрицательным, получено {self.v_min}"
            )
        object.__setattr__(self, "rule", parse_enum(BidRule, self.rule, "rule"))


@dataclass(frozen=True)
class ReserveResult:
    r_star: float
    method: EvalMethod
    residual: float


def _check_count(n: int, minimum: int):
    if not isinstance(n, int) or isinstance(n, bool) or n < minimum:
        raise InvalidParameterError(
            f"Число участников должно быть целым >= {minimum}, получено {n!r}"
        )


def _check_lambda(lam: float):
    if not 0.0 <= lam <= 1.0:
        raise InvalidParameterError(f"lambda должна лежать в [0, 1], получено {lam}")


def _check_in_support(dist: ValuationDistribution, name: str, x: float,
                      lower: float = None):
    lower = dist.support_lo if lower is None else lower
    if not lower <= x <= dist.upper:
        raise DomainError(name, x, lower, dist.upper)


def _has_closed_form(dist: ValuationDistribution) -> bool:
    return isinstance(dist, UniformDistribution) and dist.is_standard


def _quad(func: Callable[[float], float], a: float, b: float, scale: float) -> float:
    if b <= a:
        return 0.0
    value, abserr = integrate.quad(
        func, a, b,
        epsabs=ROOT_REL_TOL * scale,
        epsrel=QUAD_REL_TOL,
        limit=QUAD_LIMIT,
    )
    logger.debug(f"quad on [{a:.6f}, {b:.6f}] = {value:.12f} (abserr {abserr:.2e})")
    return value


def _bisect(func: Callable[[float], float], a: float, b: float, xtol: float) -> float:
    try:
        root, info = optimize.bisect(
            func, a, b, xtol=xtol, maxiter=BISECT_MAXITER, full_output=True
        )
    except (RuntimeError, ValueError) as e:
        raise SolverError(str(e), (a, b), (func(a), func(b)))
    logger.debug(f"bisect on [{a:.6f}, {b:.6f}] -> {root:.12f} "
                 f"after {info.iterations} iterations")
    return root


def win_probability(dist: ValuationDistribution, n: int, t: float) -> float:
    """Вероятность того, что ставка по оценке t выигрывает у n-1 соперников."""
    _check_count(n, minimum=1)
    return dist.cdf(t) ** (n - 1)


def bid_integral(dist: ValuationDistribution, n: int, lower: float, v: float,
                 method: EvalMethod = EvalMethod.AUTO) -> float:
    """Интеграл от lower до v функции t dF^{n-1}(t)."""
    method = parse_enum(EvalMethod, method, "method")
    if n < 2 or v <= lower:
        return 0.0

    if method == EvalMethod.AUTO:
        method = (EvalMethod.CLOSED_FORM if _has_closed_form(dist)
                  else EvalMethod.QUADRATURE)

    if method == EvalMethod.CLOSED_FORM:
        if not _has_closed_form(dist):
            raise InvalidParameterError(
                "Замкнутая формула доступна только для равномерного закона на [0, A]"
            )
        A = dist.upper
        return (n - 1) / n * (v * (v / A) ** (n - 1) - lower * (lower / A) ** (n - 1))

    if method == EvalMethod.QUADRATURE:
        def integrand(t: float) -> float:
            return (n - 1) * t * dist.cdf(t) ** (n - 2) * dist.pdf(t)

        return _quad(integrand, lower, v, scale=dist.upper * n)

    raise InvalidParameterError(f"Метод {method.value} не применим к интегралу ставки")


def equilibrium_bid(dist: ValuationDistribution, params: BidParams, v: float,
                    method: EvalMethod = EvalMethod.AUTO) -> float:
    """Равновесная ставка участника с оценкой v в наборе из n участников."""
    n, lam = params.n, params.lam
    _check_in_support(dist, "v", v, lower=params.v_min)

    if params.rule == BidRule.EQUILIBRIUM and lam / n >= 1.0:
        raise SingularParameterError(
            f"Вырожденные параметры: n={n}, lambda={lam} дают 1 - lambda/n = 0"
        )
    # одиночный участник не конкурирует: F^0 не зависит от t
    if n == 1:
        return 0.0

    integral = bid_integral(dist, n, params.v_min, v, method)
    if params.rule == BidRule.EQUILIBRIUM:
        return integral / (1.0 - lam / n)
    return integral * (n - lam) / n


def expected_payoff(dist: ValuationDistribution, params: BidParams, v: float,
                    t: float, reserve: float = 0.0) -> float:
    """Ожидаемый выигрыш участника с оценкой v, который ставит как тип t."""
    _check_in_support(dist, "v", v)
    _check_in_support(dist, "t", t)
    if reserve < 0 or reserve > dist.upper:
        raise DomainError("reserve", reserve, 0.0, dist.upper)

    n, lam = params.n, params.lam
    bid = equilibrium_bid(dist, params, t)
    win = win_probability(dist, n, t)

    if reserve == 0.0:
        return v * win - (1.0 - lam) * bid - (n - 1) / n * lam * bid
    return (1.0 - dist.cdf(reserve)) * (v * win - bid)


def reserve_residual(dist: ValuationDistribution, n: int, lam: float,
                     v0: float, r: float) -> float:
    """Невязка условия оптимальности резервного значения в точке r."""
    F = dist.cdf(r)
    return v0 * F - n / (n - lam) * (n - 1) * (1.0 - F) * r


def optimal_reserve(dist: ValuationDistribution, n: int, lam: float, v0: float,
                    method: EvalMethod = EvalMethod.AUTO) -> ReserveResult:
    _check_count(n, minimum=2)
    _check_lambda(lam)
    _check_in_support(dist, "v0", v0)
    method = parse_enum(EvalMethod, method, "method")

    if method == EvalMethod.AUTO:
        method = (EvalMethod.CLOSED_FORM if _has_closed_form(dist)
                  else EvalMethod.BISECTION)

    if method == EvalMethod.CLOSED_FORM:
        if not _has_closed_form(dist):
            raise InvalidParameterError(
                "Замкнутая формула доступна только для равномерного закона на [0, A]"
            )
        r_star = dist.upper - v0 * (n - lam) / (n * (n - 1))
        r_star = min(dist.upper, max(dist.support_lo, r_star))
        return ReserveResult(r_star, method,
                             reserve_residual(dist, n, lam, v0, r_star))

    if method != EvalMethod.BISECTION:
        raise InvalidParameterError(
            f"Метод {method.value} не применим к резервному значению"
        )

    def residual(r: float) -> float:
        return reserve_residual(dist, n, lam, v0, r)

    xtol = ROOT_REL_TOL * dist.upper
    # r = 0 всегда тривиальный корень, поэтому левая граница сдвинута
    left = dist.support_lo if dist.support_lo > 0 else xtol
    right = dist.upper
    h_left, h_right = residual(left), residual(right)

    if h_right == 0.0:
        return ReserveResult(right, method, h_right)
    if h_left >= 0.0:
        if abs(h_left) <= 10 * xtol * max(v0, 1.0):
            return ReserveResult(dist.support_lo, method,
                                 residual(dist.support_lo))
        raise SolverError("нет смены знака на интервале", (left, right),
                          (h_left, h_right))
    if h_right < 0.0:
        raise SolverError("нет смены знака на интервале", (left, right),
                          (h_left, h_right))

    r_star = _bisect(residual, left, right, xtol)
    return ReserveResult(r_star, method, residual(r_star))


def set_reserve(r_values: Sequence[float]) -> float:
    """Резервное значение набора: среднее личных резервов участников."""
    if len(r_values) == 0:
        raise InvalidParameterError("Список резервных значений пуст")
    return math.fsum(r_values) / len(r_values)


def expected_revenue(dist: ValuationDistribution, n: int, lam: float,
                     r: float) -> float:
    _check_count(n, minimum=2)
    _check_lambda(lam)
    _check_in_support(dist, "r", r)

    def integrand(t: float) -> float:
        F = dist.cdf(t)
        return n * (n - 1) * (1.0 - F) * t * F ** (n - 2) * dist.pdf(t)

    return n / (n - lam) * _quad(integrand, r, dist.upper, scale=dist.upper * n)


def expected_surplus(dist: ValuationDistribution, n: int, lam: float, r: float,
                     v0: float) -> float:
    if v0 < 0:
        raise InvalidParameterError(f"v0 должен быть неотрицательным, получено {v0}")
    return expected_revenue(dist, n, lam, r) + v0 * dist.cdf(r) ** n


def min_valuation(n: int, lam: float, A: float) -> float:
    """Минимальная оценка v0, при которой участнику имеет смысл делать ставку.

    Корень g(v0) = (n-lam)(n-1) v0^n / (n A^{n-1}) + v0 (n-lam) / (n(n-1)) - A
    на (0, A]; g строго возрастает и g(0) = -A.
    """
    _check_count(n, minimum=2)
    _check_lambda(lam)
    if A <= 0:
        raise InvalidParameterError(f"A должно быть положительным, получено {A}")

    def gate(v0: float) -> float:
        return ((n - lam) * (n - 1) * v0 * (v0 / A) ** (n - 1) / n
                + v0 * (n - lam) / (n * (n - 1)) - A)

    if gate(A) <= 0.0:
        raise NoRootError("минимальная оценка не существует на (0, A]",
                          {"n": n, "lambda": lam, "A": A, "g(A)": gate(A)})
    return _bisect(gate, 0.0, A, ROOT_REL_TOL * A)
