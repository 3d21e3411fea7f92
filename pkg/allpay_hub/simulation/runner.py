from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Optional

from ..core.allocation import run_auction
from ..core.baselines import greedy_allocate, pmmra_allocate, stackelberg_allocate
from ..core.exceptions import InvalidParameterError, TrialError
from ..core.models import OutcomeReport, Scenario, Scheme
from ..core.utils import mean_std
from ..decorators import log_action
from ..infra.settings import settings
from ..logging_config import get_logger
from .config import ScenarioConfig
from .generator import generate_scenario

logger = get_logger(__name__)

SCHEMES = (Scheme.ALLPAY, Scheme.GREEDY, Scheme.PMMRA, Scheme.STACKELBERG)


@dataclass(frozen=True)
class SchemeResult:
    total_profit: float
    served_sets: int
    winner_ids: tuple
    winner_bids: tuple
    winner_payments: tuple
    winner_valuations: tuple

    @classmethod
    def from_report(cls, report: OutcomeReport, scenario: Scenario) -> "SchemeResult":
        return cls(
            total_profit=report.total_profit,
            served_sets=report.served_count,
            winner_ids=tuple(report.winner_ids),
            winner_bids=tuple(report.winner_bids),
            winner_payments=tuple(report.winner_payments),
            winner_valuations=tuple(scenario.bidder(i).valuation
                                    for i in report.winner_ids),
        )


@dataclass(frozen=True)
class TrialRecord:
    trial: int
    outcomes: Dict[Scheme, SchemeResult]

    @property
    def profits(self) -> Dict[Scheme, float]:
        return {s: r.total_profit for s, r in self.outcomes.items()}

    @property
    def served_counts(self) -> Dict[Scheme, int]:
        return {s: r.served_sets for s, r in self.outcomes.items()}

    @property
    def winner_bids(self) -> Dict[Scheme, tuple]:
        return {s: r.winner_bids for s, r in self.outcomes.items()}


@dataclass(frozen=True)
class SchemeSummary:
    scheme: Scheme
    trials: int
    mean_profit: float
    std_profit: float
    mean_served: float
    std_served: float
    mean_winner_bid: float


@dataclass(frozen=True)
class ComparisonRow:
    trial: int
    scheme: Scheme
    total_profit: float
    served_sets: int
    winner_ids: tuple
    winner_bids: tuple
    winner_payments: tuple


def run_schemes(scenario: Scenario, config: ScenarioConfig) -> Dict[Scheme, OutcomeReport]:
    return {
        Scheme.ALLPAY: run_auction(scenario),
        Scheme.GREEDY: greedy_allocate(scenario, config.baseline),
        Scheme.PMMRA: pmmra_allocate(scenario, config.baseline),
        Scheme.STACKELBERG: stackelberg_allocate(scenario, config.baseline),
    }


def run_single_trial(config: ScenarioConfig, trial: int) -> TrialRecord:
    try:
        scenario = generate_scenario(config, trial)
        reports = run_schemes(scenario, config)
    except Exception as e:
        raise TrialError(trial, e)

    return TrialRecord(
        trial=trial,
        outcomes={s: SchemeResult.from_report(reports[s], scenario) for s in SCHEMES},
    )


def _resolve_threads(threads: Optional[int], num_trials: int) -> int:
    if threads is None:
        threads = int(settings.get("threads", 1))
    return max(1, min(threads, num_trials))


@log_action("RUN_TRIALS", verbose=True)
def run_trials(config: ScenarioConfig, num_trials: int,
               threads: Optional[int] = None) -> List[TrialRecord]:
    """Запускает испытания Монте-Карло; результат упорядочен по номеру испытания."""
    if not isinstance(num_trials, int) or num_trials < 1:
        raise InvalidParameterError(f"Число испытаний должно быть >= 1, получено {num_trials!r}")
    config.validate()
    workers = _resolve_threads(threads, num_trials)

    if workers == 1:
        return [run_single_trial(config, t) for t in range(num_trials)]

    logger.info(f"Running {num_trials} trials on {workers} workers")
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(run_single_trial, config, t) for t in range(num_trials)]
        return [future.result() for future in futures]


def summarize(records: List[TrialRecord]) -> List[SchemeSummary]:
    summaries = []
    for scheme in SCHEMES:
        outcomes = [r.outcomes[scheme] for r in records]
        mean_profit, std_profit = mean_std([o.total_profit for o in outcomes])
        mean_served, std_served = mean_std([o.served_sets for o in outcomes])
        mean_bid, _ = mean_std([b for o in outcomes for b in o.winner_bids])
        summaries.append(SchemeSummary(
            scheme=scheme,
            trials=len(records),
            mean_profit=mean_profit,
            std_profit=std_profit,
            mean_served=mean_served,
            std_served=std_served,
            mean_winner_bid=mean_bid,
        ))
    return summaries


@log_action("COMPARE_SCHEMES")
def compare_schemes(config: ScenarioConfig, num_trials: int,
                    threads: Optional[int] = None) -> List[ComparisonRow]:
    rows = []
    for record in run_trials(config, num_trials, threads):
        for scheme in SCHEMES:
            outcome = record.outcomes[scheme]
            rows.append(ComparisonRow(
                trial=record.trial,
                scheme=scheme,
                total_profit=outcome.total_profit,
                served_sets=outcome.served_sets,
                winner_ids=outcome.winner_ids,
                winner_bids=outcome.winner_bids,
                winner_payments=outcome.winner_payments,
            ))
    return rows
