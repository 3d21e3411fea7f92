import bisect
import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from allpay_hub.core import allocation
from allpay_hub.core.allocation import (
    decide_service,
    epsilon,
    gate_size,
    lemma_partition_gap,
    match,
    partition,
    partition_revenue,
    price_members,
    run_auction,
    total_profit,
)
from allpay_hub.core.auction import BidParams, min_valuation
from allpay_hub.core.exceptions import InvalidParameterError
from allpay_hub.core.models import (
    AuctionSet,
    Bidder,
    Executor,
    MatchKey,
    Scenario,
    ServiceRule,
)
from allpay_hub.simulation.config import ScenarioConfig
from allpay_hub.simulation.generator import generate_scenario


def expected_groups(values, eps):
    """Независимая сборка групп: следующий якорь ищется двоичным поиском."""
    groups = []
    start = 0
    while start < len(values):
        anchor = values[start]
        end = bisect.bisect_right(values, 0.0, lo=start, key=lambda x: x - anchor - eps)
        groups.append(list(range(start, end)))
        start = end
    return groups


# ставки и резервы примера 60/65/68 при A=70, n=3, lambda=0.5 в замкнутой форме
DESK_BIDS = [2 * v ** 3 / (2.5 * 70 ** 2) for v in (60.0, 65.0, 68.0)]
DESK_RESERVES = [70 - v * 2.5 / 6 for v in (60.0, 65.0, 68.0)]
DESK_R = sum(DESK_RESERVES) / 3
DESK_PROFIT = sum(DESK_BIDS) - DESK_R


def priced(bidders, lam=0.5):
    price_members(bidders, BidParams(len(bidders), lam))
    return bidders


class TestEpsilon:

    def test_examples(self):
        assert epsilon([10, 20, 30, 40], 3) == pytest.approx(10.0)
        assert epsilon([5, 5, 5], 2) == 0.0

    def test_invalid(self):
        with pytest.raises(InvalidParameterError):
            epsilon([10, 20], 0)
        with pytest.raises(InvalidParameterError):
            epsilon([], 2)


class TestPartition:

    def test_splits_and_deletes_small_groups(self):
        kept, deleted = partition([10, 11, 12, 30, 31, 50, 51, 52, 53], 5)
        assert kept == [[0, 1, 2], [5, 6, 7, 8]]
        assert deleted == [3, 4]

    def test_single_group(self):
        kept, deleted = partition([60, 65, 68], 20)
        assert kept == [[0, 1, 2]]
        assert deleted == []

    def test_zero_epsilon_groups_equal_values(self):
        kept, deleted = partition([5, 5, 5, 7], 0)
        assert kept == [[0, 1, 2]]
        assert deleted == [3]

    def test_empty(self):
        assert partition([], 1.0) == ([], [])

    def test_unsorted_rejected(self):
        with pytest.raises(InvalidParameterError):
            partition([3, 1, 2], 1.0)

    def test_negative_epsilon_rejected(self):
        with pytest.raises(InvalidParameterError):
            partition([1, 2, 3], -1.0)

    def test_random_instances_match_independent_grouping(self):
        rng = np.random.default_rng(11)
        for _ in range(1000):
            size = int(rng.integers(0, 51))
            values = sorted(int(x) for x in rng.integers(0, 101, size))
            k = int(rng.integers(1, 6))
            eps = epsilon(values, k) if values else 0.0
            kept, deleted = partition(values, eps)

            groups = expected_groups(values, eps)
            assert kept == [g for g in groups if len(g) >= 3]
            assert deleted == [i for g in groups if len(g) < 3 for i in g]

            covered = sorted(i for g in kept for i in g) + deleted
            assert sorted(covered) == list(range(size))
            for group in kept:
                assert len(group) >= 3
                assert values[group[-1]] - values[group[0]] <= eps

    @given(st.lists(st.integers(min_value=0, max_value=100), max_size=40),
           st.integers(min_value=1, max_value=5))
    def test_sets_are_value_contiguous(self, raw, k):
        values = sorted(raw)
        if not values:
            return
        kept, _ = partition(values, epsilon(values, k))
        for left, right in zip(kept, kept[1:]):
            assert values[left[-1]] <= values[right[0]]
            assert left[-1] < right[0]


class TestGateSize:

    def test_rounding(self):
        assert gate_size(12, 3) == 4
        assert gate_size(14, 4) == 4
        assert gate_size(10, 4) == 3
        assert gate_size(2, 3) == 3

    def test_invalid(self):
        with pytest.raises(InvalidParameterError):
            gate_size(12, 0)


class TestDecideService:

    def test_desk_example(self, desk_bidders):
        members = priced(desk_bidders)
        assert [m.bid for m in members] == pytest.approx(
            DESK_BIDS, rel=1e-9)
        assert [m.personal_reserve for m in members] == pytest.approx(
            DESK_RESERVES, rel=1e-9)

        auction_set = decide_service(members, ServiceRule.AVG_RESERVE, eps=8.0)
        assert auction_set.served
        assert auction_set.reserve_R == pytest.approx(DESK_R, rel=1e-9)
        assert auction_set.bid_sum == pytest.approx(sum(DESK_BIDS), rel=1e-9)
        assert auction_set.winner == 3
        assert members[2].served
        assert auction_set.profit == pytest.approx(DESK_PROFIT, rel=1e-9)
        assert DESK_PROFIT == pytest.approx(88.243433, abs=1e-6)

    def test_average_valuation_rule(self, desk_bidders):
        auction_set = decide_service(priced(desk_bidders), ServiceRule.AVG_VALUATION)
        assert auction_set.threshold == pytest.approx(193.0 / 3)
        assert auction_set.served
        assert auction_set.profit == pytest.approx(sum(DESK_BIDS) - 193.0 / 3, rel=1e-9)

    def test_zero_bids_not_served(self):
        members = [Bidder(id=i, valuation=10.0, A=70.0, personal_reserve=20.0)
                   for i in (1, 2, 3)]
        auction_set = decide_service(members)
        assert not auction_set.served
        assert auction_set.winner is None
        assert auction_set.profit == 0.0
        assert not any(m.served for m in members)

    def test_tie_goes_to_lowest_id(self):
        members = [Bidder(id=i, valuation=50.0, A=70.0, bid=30.0) for i in (7, 4, 9)]
        auction_set = decide_service(members)
        assert auction_set.winner == 4

    def test_unknown_rule_rejected(self, desk_bidders):
        with pytest.raises(InvalidParameterError, match="avg_reserve"):
            decide_service(priced(desk_bidders), "median")

    def test_too_small_set_rejected(self, desk_bidders):
        with pytest.raises(InvalidParameterError):
            decide_service(desk_bidders[:2])


class TestMatch:

    def test_rank_to_rank(self):
        winners = [Bidder(id=1, valuation=55.0, A=70.0),
                   Bidder(id=2, valuation=68.0, A=70.0)]
        executors = [Executor(id=1, capacity=70.0), Executor(id=2, capacity=90.0),
                     Executor(id=3, capacity=80.0)]
        assert match(winners, executors) == [(2, 2), (1, 3)]

    def test_more_winners_than_executors(self):
        winners = [Bidder(id=i, valuation=v, A=70.0)
                   for i, v in ((1, 50.0), (2, 60.0), (3, 65.0))]
        assert match(winners, [Executor(id=1, capacity=90.0)]) == [(3, 1)]

    def test_reserve_key(self):
        winners = [Bidder(id=1, valuation=60.0, A=70.0, personal_reserve=45.0),
                   Bidder(id=2, valuation=68.0, A=70.0, personal_reserve=41.7)]
        executors = [Executor(id=1, capacity=90.0), Executor(id=2, capacity=80.0)]
        assert match(winners, executors, MatchKey.RESERVE) == [(1, 1), (2, 2)]

    def test_empty(self):
        assert match([], [Executor(id=1, capacity=90.0)]) == []


class TestTotalProfit:

    def test_sums_served_sets(self):
        sets = [
            AuctionSet(members=[], epsilon=0.0, threshold=43.194, bid_sum=131.438,
                       served=True),
            AuctionSet(members=[], epsilon=0.0, threshold=40.0, bid_sum=50.0,
                       served=True),
            AuctionSet(members=[], epsilon=0.0, threshold=40.0, bid_sum=10.0),
        ]
        assert total_profit(sets[:1]) == pytest.approx(88.244)
        assert total_profit(sets) == pytest.approx(98.244)

    def test_empty(self):
        assert total_profit([]) == 0.0


class TestLemma:

    def test_examples(self):
        assert lemma_partition_gap(4, 1.0, 1.0) == pytest.approx(1 / 12)
        assert lemma_partition_gap(4, 0.0, 1.0) == 0.0
        assert lemma_partition_gap(5, 0.5, 2.0) == pytest.approx(
            4 * 0.25 / (3.5 * 5.5 * 4.5))

    def test_matches_direct_sum_on_grid(self):
        for n in range(3, 13):
            for lam in np.linspace(0.0, 1.0, 11):
                for C in (0.5, 1.0, 10.0):
                    lam = float(lam)
                    gap = lemma_partition_gap(n, lam, C)
                    direct = (partition_revenue([n - 1, n, n + 1], lam, C)
                              - partition_revenue([n, n, n], lam, C))
                    assert gap >= 0.0
                    assert gap == pytest.approx(direct, abs=1e-9)

    def test_invalid(self):
        with pytest.raises(InvalidParameterError):
            lemma_partition_gap(2, 1.0, 1.0)
        with pytest.raises(InvalidParameterError):
            lemma_partition_gap(4, 0.5, 0.0)
        with pytest.raises(InvalidParameterError):
            lemma_partition_gap(4, 1.5, 1.0)


class TestRunAuction:

    def test_single_set(self, desk_bidders):
        scenario = Scenario(bidders=desk_bidders,
                            executors=[Executor(id=1, capacity=90.0)], lam=0.5)
        report = run_auction(scenario)

        assert len(report.per_set) == 1
        assert report.total_profit == pytest.approx(DESK_PROFIT, rel=1e-9)
        assert report.total_payments == pytest.approx(sum(DESK_BIDS), rel=1e-9)
        assert report.winner_ids == [3]
        assignment = report.assignments[0]
        assert assignment.executor_id == 1
        assert assignment.payment == pytest.approx(DESK_BIDS[2], rel=1e-9)
        assert report.excluded == []

    def test_input_bidders_untouched(self, desk_bidders):
        scenario = Scenario(bidders=desk_bidders,
                            executors=[Executor(id=1, capacity=90.0)])
        run_auction(scenario)
        assert all(b.bid == 0.0 and not b.served for b in desk_bidders)

    def test_all_bidders_below_gate(self):
        bidders = [Bidder(id=i + 1, valuation=v, A=70.0)
                   for i, v in enumerate([10.0, 20.0, 30.0])]
        scenario = Scenario(bidders=bidders, executors=[Executor(id=1, capacity=90.0)])
        report = run_auction(scenario)
        assert report.total_profit == 0.0
        assert report.assignments == []
        assert report.per_set == []
        assert sorted(report.excluded) == [1, 2, 3]

    def test_gate_excludes_low_valuations(self):
        values = [20.0, 60.0, 65.0, 68.0]
        bidders = [Bidder(id=i + 1, valuation=v, A=70.0) for i, v in enumerate(values)]
        scenario = Scenario(bidders=bidders, executors=[Executor(id=1, capacity=90.0)])
        assert min_valuation(3, 0.5, 70.0) > 20.0
        report = run_auction(scenario)
        assert report.excluded == [1]
        assert report.per_set[0].size == 3

    def test_unmatched_winner_is_unserved(self, monkeypatch):
        monkeypatch.setattr(allocation, "epsilon", lambda values, k: 0.0)
        values = [70.0, 70.0, 70.0, 80.0, 80.0, 80.0]
        bidders = [Bidder(id=i + 1, valuation=v, A=90.0) for i, v in enumerate(values)]
        scenario = Scenario(bidders=bidders, executors=[Executor(id=1, capacity=90.0)],
                            gate_n=3)
        report = run_auction(scenario)

        assert len(report.per_set) == 2
        served = [s for s in report.per_set if s.served]
        assert len(served) == 1
        assert report.served_count == 1
        assert report.total_payments == pytest.approx(served[0].bid_sum)
        assert report.total_profit == pytest.approx(served[0].profit)

    def test_generated_scenario_invariants(self):
        config = ScenarioConfig(seed=42)
        for trial in range(20):
            scenario = generate_scenario(config, trial)
            report = run_auction(scenario)
            assert report.total_profit >= 0.0
            assert report.served_count <= len(scenario.executors)
            assert len(set(a.executor_id for a in report.assignments)) == report.served_count
            assert report.total_payments == pytest.approx(
                sum(s.bid_sum for s in report.per_set if s.served))
            for auction_set in report.per_set:
                assert auction_set.size >= 3
                assert auction_set.valuation_range <= auction_set.epsilon + 1e-12
                if auction_set.served:
                    winner = auction_set.winner_bidder()
                    assert winner.bid == max(m.bid for m in auction_set.members)
                    assert winner.bid < winner.valuation
            # наборы не пересекаются и упорядочены по оценкам
            for left, right in zip(report.per_set, report.per_set[1:]):
                assert max(m.valuation for m in left.members) <= right.anchor

    def test_scenario_rejects_unknown_rules(self, desk_bidders):
        executors = [Executor(id=1, capacity=90.0)]
        with pytest.raises(InvalidParameterError, match="service_rule"):
            Scenario(bidders=desk_bidders, executors=executors, service_rule="median")
        with pytest.raises(InvalidParameterError, match="eq9, eq20"):
            Scenario(bidders=desk_bidders, executors=executors, bid_rule="eq21")
        with pytest.raises(InvalidParameterError, match="match_key"):
            Scenario(bidders=desk_bidders, executors=executors, match_key="bid")

    def test_no_executors(self, desk_bidders):
        report = run_auction(Scenario(bidders=desk_bidders, executors=[]))
        assert report.total_profit == 0.0
        assert report.total_payments == 0.0
        assert report.assignments == []
        assert report.per_set == []

    def test_random_instances(self):
        rnd = random.Random(2024)
        for _ in range(1000):
            k = rnd.randint(1, 5)
            config = ScenarioConfig(
                num_eus=rnd.randint(3, 40),
                num_ecs=k,
                capacities=tuple(rnd.choice((70.0, 80.0, 90.0)) for _ in range(k)),
                seed=rnd.randrange(2 ** 32),
            )
            scenario = generate_scenario(config)
            report = run_auction(scenario)

            gates = {A: min_valuation(scenario.gate_n, scenario.lam, A)
                     for A in {b.A for b in scenario.bidders}}
            gated = {b.id for b in scenario.bidders if b.valuation < gates[b.A]}
            ordered = sorted((b for b in scenario.bidders if b.id not in gated),
                             key=lambda b: (b.valuation, b.id))
            values = [b.valuation for b in ordered]
            eps = (values[-1] - values[0]) / k if values else 0.0
            dropped = {ordered[i].id for group in expected_groups(values, eps)
                       if len(group) < 3 for i in group}
            assert sorted(report.excluded) == sorted(gated | dropped)

            assert report.total_profit >= 0.0
            for auction_set in report.per_set:
                if auction_set.served:
                    assert auction_set.bid_sum >= auction_set.threshold
                    assert auction_set.profit >= 0.0

    def test_deterministic(self):
        scenario = generate_scenario(ScenarioConfig(seed=7), trial=3)
        assert run_auction(scenario).to_dict() == run_auction(scenario).to_dict()

    def test_bidder_order_does_not_matter(self):
        scenario = generate_scenario(ScenarioConfig(seed=5, num_eus=15), trial=1)
        shuffled = list(scenario.bidders)
        random.Random(3).shuffle(shuffled)
        reordered = Scenario(bidders=shuffled, executors=scenario.executors,
                             lam=scenario.lam, gate_n=scenario.gate_n)

        def compositions(report):
            return [sorted(m.id for m in s.members) for s in report.per_set]

        first, second = run_auction(scenario), run_auction(reordered)
        assert compositions(first) == compositions(second)
        assert first.total_profit == pytest.approx(second.total_profit)
