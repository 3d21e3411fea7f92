"""Разбиение участников на наборы, решение об обслуживании и сопоставление с EC."""
import dataclasses
import math
from typing import Dict, List, Sequence, Tuple

from ..decorators import log_action
from ..logging_config import get_logger
from .auction import BidParams, equilibrium_bid, min_valuation, optimal_reserve, set_reserve
from .exceptions import InvalidParameterError, SolverError
from .models import (
    Assignment,
    AuctionSet,
    Bidder,
    Executor,
    MatchKey,
    OutcomeReport,
    Scenario,
    Scheme,
    ServiceRule,
)
from .utils import parse_enum

logger = get_logger(__name__)

MIN_SET_SIZE = 3


def epsilon(valuations: Sequence[float], k: int) -> float:
    """Допустимый разброс оценок внутри набора: (max - min) / k."""
    if k < 1:
        raise InvalidParameterError(f"Число исполнителей k должно быть >= 1, получено {k}")
    if len(valuations) == 0:
        raise InvalidParameterError("Список оценок пуст")
    return (max(valuations) - min(valuations)) / k


def partition(valuations: Sequence[float], eps: float,
              min_size: int = MIN_SET_SIZE) -> Tuple[List[List[int]], List[int]]:
    """Группирует отсортированные оценки по якорю (наименьшему элементу набора).

    Возвращает позиции оставленных наборов и позиции удаленных участников.
    """
    if eps < 0:
        raise InvalidParameterError(f"epsilon должен быть неотрицательным, получено {eps}")
    for i in range(1, len(valuations)):
        if valuations[i] < valuations[i - 1]:
            raise InvalidParameterError(
                f"Оценки должны быть отсортированы по возрастанию "
                f"(позиция {i}: {valuations[i]} < {valuations[i - 1]})"
            )

    groups: List[List[int]] = []
    current: List[int] = []
    anchor = 0.0
    for i, value in enumerate(valuations):
        if current and value - anchor <= eps:
            current.append(i)
            continue
        if current:
            groups.append(current)
        current = [i]
        anchor = value
    if current:
        groups.append(current)

    kept = [g for g in groups if len(g) >= min_size]
    deleted = [i for g in groups if len(g) < min_size for i in g]
    return kept, deleted


def gate_size(num_eus: int, num_ecs: int) -> int:
    """Опорный размер набора для порога минимальной оценки: round(N/k), не меньше 3."""
    if num_ecs < 1:
        raise InvalidParameterError(f"Число исполнителей должно быть >= 1, получено {num_ecs}")
    return max(MIN_SET_SIZE, int(math.floor(num_eus / num_ecs + 0.5)))


def price_members(members: List[Bidder], params: BidParams):
    """Заполняет ставку и личный резерв каждого участника набора."""
    for member in members:
        dist = member.distribution
        member.bid = equilibrium_bid(dist, params, member.valuation)
        member.personal_reserve = optimal_reserve(
            dist, params.n, params.lam, member.valuation
        ).r_star


def decide_service(members: List[Bidder],
                   rule: ServiceRule = ServiceRule.AVG_RESERVE,
                   eps: float = 0.0) -> AuctionSet:
    if len(members) < MIN_SET_SIZE:
        raise InvalidParameterError(
            f"Набор из {len(members)} участников нарушает регламент "
            f"(минимум {MIN_SET_SIZE})"
        )
    rule = parse_enum(ServiceRule, rule, "service_rule")

    reserve_R = set_reserve([m.personal_reserve for m in members])
    if rule == ServiceRule.AVG_RESERVE:
        threshold = reserve_R
    else:
        threshold = math.fsum(m.valuation for m in members) / len(members)

    bid_sum = math.fsum(m.bid for m in members)
    auction_set = AuctionSet(
        members=members,
        epsilon=eps,
        reserve_R=reserve_R,
        threshold=threshold,
        bid_sum=bid_sum,
    )

    if bid_sum >= threshold:
        winner = max(members, key=lambda m: (m.bid, -m.id))
        winner.served = True
        auction_set.winner = winner.id
        auction_set.served = True

    return auction_set


def match(winners: List[Bidder], executors: List[Executor],
          key: MatchKey = MatchKey.VALUATION) -> List[Tuple[int, int]]:
    """Сопоставляет победителей и исполнителей ранг к рангу."""
    key = parse_enum(MatchKey, key, "match_key")

    def winner_key(bidder: Bidder) -> float:
        if key == MatchKey.VALUATION:
            return bidder.valuation
        return bidder.personal_reserve

    ranked_winners = sorted(winners, key=lambda b: (-winner_key(b), b.id))
    ranked_executors = sorted(executors, key=lambda e: (-e.capacity, e.id))
    return [(b.id, e.id) for b, e in zip(ranked_winners, ranked_executors)]


def total_profit(sets: Sequence[AuctionSet]) -> float:
    """Общая прибыль системы по обслуженным наборам."""
    return math.fsum(s.profit for s in sets if s.served)


def partition_revenue(sizes: Sequence[int], lam: float, C: float) -> float:
    """Суммарная выручка разбиения при равных C: сумма m*C / (1 - lambda/m)."""
    return math.fsum(m * C / (1.0 - lam / m) for m in sizes)


def lemma_partition_gap(n: int, lam: float, C: float) -> float:
    """Разница выручки разбиений (n-1, n, n+1) и (n, n, n)."""
    if not isinstance(n, int) or n < 2:
        raise InvalidParameterError(f"n должно быть целым >= 2, получено {n!r}")
    if not 0.0 <= lam <= 1.0:
        raise InvalidParameterError(f"lambda должна лежать в [0, 1], получено {lam}")
    if C <= 0:
        raise InvalidParameterError(f"C должно быть положительным, получено {C}")
    if n - 1 - lam <= 0:
        raise InvalidParameterError(f"n - 1 - lambda должно быть > 0 (n={n}, lambda={lam})")

    direct = (partition_revenue([n - 1, n, n + 1], lam, C)
              - partition_revenue([n, n, n], lam, C))
    closed = 2 * C * lam ** 2 / ((n - 1 - lam) * (n + 1 - lam) * (n - lam))
    if abs(direct - closed) > 1e-9 * max(1.0, abs(closed)):
        raise SolverError(
            f"прямая сумма {direct:.12f} и замкнутая форма {closed:.12f} расходятся"
        )
    return closed


@log_action("RUN_AUCTION")
def run_auction(scenario: Scenario) -> OutcomeReport:
    bidders = [dataclasses.replace(b, served=False) for b in scenario.bidders]
    executors = list(scenario.executors)
    k = len(executors)
    report = OutcomeReport(scheme=Scheme.ALLPAY)

    gate_n = scenario.gate_n or gate_size(len(bidders), max(k, 1))
    gates: Dict[float, float] = {}
    eligible: List[Bidder] = []
    for bidder in bidders:
        if bidder.A not in gates:
            gates[bidder.A] = min_valuation(gate_n, scenario.lam, bidder.A)
        if bidder.valuation >= gates[bidder.A]:
            eligible.append(bidder)
        else:
            report.excluded.append(bidder.id)

    if not eligible:
        logger.info(f"Trial {scenario.trial}: no bidder passed the valuation gate")
        return report
    if k == 0:
        logger.warning(f"Trial {scenario.trial}: no executors, nothing to auction")
        return report

    ordered = sorted(eligible, key=lambda b: (b.valuation, b.id))
    values = [b.valuation for b in ordered]
    eps = epsilon(values, k)
    kept, deleted = partition(values, eps)
    report.excluded.extend(ordered[i].id for i in deleted)

    for group in kept:
        members = [ordered[i] for i in group]
        params = BidParams(n=len(members), lam=scenario.lam, rule=scenario.bid_rule)
        price_members(members, params)
        report.per_set.append(decide_service(members, scenario.service_rule, eps))

    winners = [s.winner_bidder() for s in report.per_set if s.served]
    pairs = dict(match(winners, executors, scenario.match_key))

    for auction_set in report.per_set:
        if not auction_set.served:
            continue
        winner = auction_set.winner_bidder()
        if winner.id not in pairs:
            logger.warning(
                f"Trial {scenario.trial}: winner {winner.id} left without executor"
            )
            winner.served = False
            auction_set.served = False
            auction_set.winner = None
            continue
        auction_set.executor = pairs[winner.id]
        report.assignments.append(
            Assignment(winner.id, pairs[winner.id], winner.bid, winner.bid)
        )

    report.total_payments = math.fsum(s.bid_sum for s in report.per_set if s.served)
    report.total_profit = total_profit(report.per_set)
    return report
