import csv
import io
import json
from typing import List

from prettytable import PrettyTable

from ..core.models import OutcomeReport
from ..core.utils import format_value, join_ids, join_values
from .runner import ComparisonRow, SchemeSummary
from .sweep import SweepRow

COMPARISON_COLUMNS = ["trial", "scheme", "total_profit", "served_sets",
                      "winner_ids", "winner_bids", "winner_payments"]
SWEEP_COLUMNS = ["n", "lambda", "A", "v", "bid_eq9", "bid_eq20"]
SUMMARY_COLUMNS = ["scheme", "trials", "mean_profit", "std_profit",
                   "mean_served", "std_served", "mean_winner_bid"]
ASSIGNMENT_COLUMNS = ["bidder", "executor", "bid", "payment"]


def _to_csv(columns: List[str], rows: List[list]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    writer.writerows(rows)
    return buffer.getvalue()


def comparison_csv(rows: List[ComparisonRow]) -> str:
    return _to_csv(COMPARISON_COLUMNS, [
        [row.trial, row.scheme.value, format_value(row.total_profit),
         row.served_sets, join_ids(row.winner_ids), join_values(row.winner_bids),
         join_values(row.winner_payments)]
        for row in rows
    ])


def sweep_csv(rows: List[SweepRow]) -> str:
    return _to_csv(SWEEP_COLUMNS, [
        [row.n, format_value(row.lam), format_value(row.A), format_value(row.v),
         format_value(row.bid_eq9), format_value(row.bid_eq20)]
        for row in rows
    ])


def summary_csv(summaries: List[SchemeSummary]) -> str:
    return _to_csv(SUMMARY_COLUMNS, [
        [s.scheme.value, s.trials, format_value(s.mean_profit),
         format_value(s.std_profit), format_value(s.mean_served),
         format_value(s.std_served), format_value(s.mean_winner_bid)]
        for s in summaries
    ])


def report_csv(report: OutcomeReport) -> str:
    return _to_csv(ASSIGNMENT_COLUMNS, [
        [a.bidder_id, a.executor_id, format_value(a.bid), format_value(a.payment)]
        for a in report.assignments
    ])


def report_json(report: OutcomeReport) -> str:
    return json.dumps(report.to_dict(), indent=2, ensure_ascii=False) + "\n"


def report_table(report: OutcomeReport) -> str:
    sets_table = PrettyTable()
    sets_table.field_names = ["Members", "R*", "Threshold", "Bid sum",
                              "Winner", "Executor", "Profit"]
    sets_table.align["Members"] = "l"
    for auction_set in report.per_set:
        sets_table.add_row([
            join_ids(m.id for m in auction_set.members),
            format_value(auction_set.reserve_R),
            format_value(auction_set.threshold),
            format_value(auction_set.bid_sum),
            auction_set.winner if auction_set.winner is not None else "-",
            auction_set.executor if auction_set.executor is not None else "-",
            format_value(auction_set.profit),
        ])

    assignments_table = PrettyTable()
    assignments_table.field_names = ["Bidder", "Executor", "Bid", "Payment"]
    for a in report.assignments:
        assignments_table.add_row([a.bidder_id, a.executor_id,
                                   format_value(a.bid), format_value(a.payment)])

    lines = [
        f"Scheme: {report.scheme.value}",
        str(sets_table) if report.per_set else "No auction sets",
        str(assignments_table) if report.assignments else "No assignments",
        f"Total payments: {format_value(report.total_payments)}",
        f"Total profit W: {format_value(report.total_profit)}",
    ]
    if report.excluded:
        lines.append(f"Excluded bidders: {join_ids(report.excluded)}")
    return "\n".join(lines) + "\n"
