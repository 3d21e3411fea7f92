"""Упрощенные схемы сравнения: жадная, PMMRA (второй цены) и Stackelberg (объявленная цена)."""
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, List, Optional, Tuple

from ..decorators import log_action
from .distributions import UniformDistribution, ValuationDistribution
from .exceptions import InvalidParameterError
from .models import Assignment, Bidder, Executor, OutcomeReport, Scenario, Scheme
from .utils import parse_enum


class CostRule(str, Enum):
    OWN_VALUATION = "own_valuation"
    FRACTION_OF_CAPACITY = "fraction_of_capacity"


class PriceRule(str, Enum):
    MONOPOLY_UNIFORM = "monopoly_uniform"


@dataclass(frozen=True)
class BaselineConfig:
    cost_rule: CostRule = CostRule.FRACTION_OF_CAPACITY
    alpha: float = 0.5
    price_rule: PriceRule = PriceRule.MONOPOLY_UNIFORM

    def __post_init__(self):
        object.__setattr__(self, "cost_rule",
                           parse_enum(CostRule, self.cost_rule, "cost_rule"))
        object.__setattr__(self, "price_rule",
                           parse_enum(PriceRule, self.price_rule, "price_rule"))
        if self.cost_rule == CostRule.FRACTION_OF_CAPACITY and not 0.0 < self.alpha <= 1.0:
            raise InvalidParameterError(f"alpha должна лежать в (0, 1], получено {self.alpha}")

    def executor_cost(self, executor: Executor) -> float:
        if self.cost_rule == CostRule.OWN_VALUATION:
            return executor.own_valuation
        return self.alpha * executor.capacity

    def to_dict(self) -> dict:
        return {"cost_rule": self.cost_rule.value, "alpha": self.alpha,
                "price_rule": self.price_rule.value}


def feasible(bidder: Bidder, executor: Executor) -> bool:
    return bidder.requirement <= executor.capacity


def monopoly_price(dist: ValuationDistribution) -> float:
    """Цена лидера: argmax p * (1 - F(p))."""
    if not isinstance(dist, UniformDistribution):
        raise InvalidParameterError(
            f"Монопольная цена реализована только для равномерного закона, "
            f"получено {dist!r}"
        )
    return max(dist.support_lo, dist.upper / 2.0)


# (победитель, ставка, платеж) для исполнителя по его пулу допустимых участников
Seller = Callable[[List[Bidder]], Optional[Tuple[Bidder, float, float]]]


def _sell_sequentially(scenario: Scenario, config: BaselineConfig,
                       scheme: Scheme, sell: Seller) -> OutcomeReport:
    report = OutcomeReport(scheme=scheme)
    remaining = sorted(scenario.bidders, key=lambda b: (-b.valuation, b.id))
    profits = []

    for executor in sorted(scenario.executors, key=lambda e: (-e.capacity, e.id)):
        pool = [b for b in remaining if feasible(b, executor)]
        sale = sell(pool)
        if sale is None:
            continue
        winner, bid, payment = sale
        remaining.remove(winner)
        report.assignments.append(Assignment(winner.id, executor.id, bid, payment))
        profits.append(payment - config.executor_cost(executor))

    report.total_payments = math.fsum(a.payment for a in report.assignments)
    report.total_profit = math.fsum(profits)
    return report


def _greedy_sale(pool: List[Bidder]):
    if not pool:
        return None
    winner = pool[0]
    return winner, winner.valuation, winner.valuation


def _second_price_sale(pool: List[Bidder]):
    if not pool:
        return None
    winner = pool[0]
    payment = pool[1].valuation if len(pool) > 1 else winner.valuation
    return winner, winner.valuation, payment


def _posted_price_sale(pool: List[Bidder]):
    for bidder in pool:
        price = monopoly_price(bidder.distribution)
        if bidder.valuation >= price:
            return bidder, price, price
    return None


@log_action("GREEDY_ALLOCATE")
def greedy_allocate(scenario: Scenario,
                    config: BaselineConfig = BaselineConfig()) -> OutcomeReport:
    return _sell_sequentially(scenario, config, Scheme.GREEDY, _greedy_sale)


@log_action("PMMRA_ALLOCATE")
def pmmra_allocate(scenario: Scenario,
                   config: BaselineConfig = BaselineConfig()) -> OutcomeReport:
    return _sell_sequentially(scenario, config, Scheme.PMMRA, _second_price_sale)


@log_action("STACKELBERG_ALLOCATE")
def stackelberg_allocate(scenario: Scenario,
                         config: BaselineConfig = BaselineConfig()) -> OutcomeReport:
    return _sell_sequentially(scenario, config, Scheme.STACKELBERG, _posted_price_sale)
