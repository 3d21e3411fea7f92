from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional

from .auction import BidRule
from .distributions import ValuationDistribution, get_distribution
from .exceptions import InvalidParameterError
from .utils import parse_enum


class Scheme(str, Enum):
    ALLPAY = "allpay"
    GREEDY = "greedy"
    PMMRA = "pmmra"
    STACKELBERG = "stackelberg"


class ServiceRule(str, Enum):
    AVG_RESERVE = "avg_reserve"
    AVG_VALUATION = "avg_valuation"


class MatchKey(str, Enum):
    VALUATION = "valuation"
    RESERVE = "reserve"


@dataclass
class Bidder:
    """Состояние конечного пользователя: оценка, ставка, резерв, флаг обслуживания."""
    id: int
    valuation: float
    A: float
    requirement: Optional[float] = None
    bid: float = 0.0
    personal_reserve: float = 0.0
    served: bool = False
    kind: str = "uniform"

    def __post_init__(self):
        if self.A <= 0:
            raise InvalidParameterError(
                f"Участник {self.id}: A должно быть положительным, получено {self.A}"
            )
        if not 0.0 <= self.valuation <= self.A:
            raise InvalidParameterError(
                f"Участник {self.id}: оценка {self.valuation} вне [0, {self.A}]"
            )
        if self.requirement is None:
            self.requirement = self.valuation
        if self.bid < 0:
            raise InvalidParameterError(f"Участник {self.id}: ставка отрицательна")
        if not 0.0 <= self.personal_reserve <= self.A:
            raise InvalidParameterError(
                f"Участник {self.id}: резерв {self.personal_reserve} вне [0, {self.A}]"
            )

    @property
    def distribution(self) -> ValuationDistribution:
        return get_distribution(self.kind, self.A)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "id": self.id,
            "valuation": self.valuation,
            "A": self.A,
            "requirement": self.requirement,
            "bid": self.bid,
            "personal_reserve": self.personal_reserve,
            "served": self.served,
        }


@dataclass
class Executor:
    """Исполнитель (EC): обслуживает одну задачу за единицу времени."""
    id: int
    capacity: float
    own_valuation: float = 0.0

    def __post_init__(self):
        if self.capacity <= 0:
            raise InvalidParameterError(
                f"Исполнитель {self.id}: мощность должна быть положительной"
            )
        if self.own_valuation < 0:
            raise InvalidParameterError(
                f"Исполнитель {self.id}: собственная оценка отрицательна"
            )


@dataclass
class AuctionSet:
    members: List[Bidder]
    epsilon: float
    reserve_R: float = 0.0
    threshold: float = 0.0
    bid_sum: float = 0.0
    winner: Optional[int] = None
    served: bool = False
    executor: Optional[int] = None

    @property
    def size(self) -> int:
        return len(self.members)

    @property
    def anchor(self) -> float:
        return min(m.valuation for m in self.members)

    @property
    def valuation_range(self) -> float:
        values = [m.valuation for m in self.members]
        return max(values) - min(values)

    @property
    def profit(self) -> float:
        """Вклад набора в общую прибыль: сумма ставок минус порог."""
        return self.bid_sum - self.threshold if self.served else 0.0

    def winner_bidder(self) -> Optional[Bidder]:
        for member in self.members:
            if member.id == self.winner:
                return member
        return None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "members": [m.id for m in self.members],
            "valuations": [m.valuation for m in self.members],
            "epsilon": self.epsilon,
            "reserve_R": self.reserve_R,
            "threshold": self.threshold,
            "bid_sum": self.bid_sum,
            "winner": self.winner,
            "executor": self.executor,
            "served": self.served,
            "profit": self.profit,
        }


@dataclass(frozen=True)
class Assignment:
    bidder_id: int
    executor_id: int
    bid: float
    payment: float


@dataclass
class OutcomeReport:
    scheme: Scheme
    assignments: List[Assignment] = field(default_factory=list)
    per_set: List[AuctionSet] = field(default_factory=list)
    total_profit: float = 0.0
    total_payments: float = 0.0
    excluded: List[int] = field(default_factory=list)

    @property
    def served_count(self) -> int:
        return len(self.assignments)

    @property
    def winner_ids(self) -> List[int]:
        return [a.bidder_id for a in self.assignments]

    @property
    def winner_bids(self) -> List[float]:
        return [a.bid for a in self.assignments]

    @property
    def winner_payments(self) -> List[float]:
        return [a.payment for a in self.assignments]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "scheme": self.scheme.value,
            "assignments": [
                {"bidder": a.bidder_id, "executor": a.executor_id,
                 "bid": a.bid, "payment": a.payment}
                for a in self.assignments
            ],
            "per_set": [s.to_dict() for s in self.per_set],
            "total_profit": self.total_profit,
            "total_payments": self.total_payments,
            "excluded": list(self.excluded),
        }


@dataclass
class Scenario:
    """Входные данные одного аукциона: участники, исполнители и параметры схем."""
    bidders: List[Bidder]
    executors: List[Executor]
    lam: float = 0.5
    bid_rule: BidRule = BidRule.EQUILIBRIUM
    service_rule: ServiceRule = ServiceRule.AVG_RESERVE
    match_key: MatchKey = MatchKey.VALUATION
    gate_n: Optional[int] = None
    trial: int = 0

    def __post_init__(self):
        if not 0.0 <= self.lam <= 1.0:
            raise InvalidParameterError(
                f"lambda должна лежать в [0, 1], получено {self.lam}"
            )
        self.bid_rule = parse_enum(BidRule, self.bid_rule, "bid_rule")
        self.service_rule = parse_enum(ServiceRule, self.service_rule,
                                       "service_rule")
        self.match_key = parse_enum(MatchKey, self.match_key, "match_key")
        ids = [b.id for b in self.bidders]
        if len(set(ids)) != len(ids):
            raise InvalidParameterError("Идентификаторы участников повторяются")
        ids = [e.id for e in self.executors]
        if len(set(ids)) != len(ids):
            raise InvalidParameterError("Идентификаторы исполнителей повторяются")

    def bidder(self, bidder_id: int) -> Bidder:
        for bidder in self.bidders:
            if bidder.id == bidder_id:
                return bidder
        raise InvalidParameterError(f"Участник {bidder_id} не найден")
