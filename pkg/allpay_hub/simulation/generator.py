from typing import Dict

import numpy as np

from ..core.allocation import gate_size
from ..core.auction import min_valuation
from ..core.models import Bidder, Executor, Scenario
from ..logging_config import get_logger
from .config import ScenarioConfig

logger = get_logger(__name__)


def bidder_rng(seed: int, trial: int, index: int) -> np.random.Generator:
    """Независимый поток для участника: не зависит от порядка и параллелизма испытаний."""
    return np.random.default_rng(np.random.SeedSequence([seed, trial, index]))


def generate_scenario(config: ScenarioConfig, trial: int = 0) -> Scenario:
    config.validate()

    gate_n = gate_size(config.num_eus, config.num_ecs)
    gates: Dict[float, float] = {}
    bidders = []

    for index in range(config.num_eus):
        if config.valuations is not None:
            valuation = float(config.valuations[index])
            A = float(config.A_values[index] if config.A_values
                      else max(config.A_choices))
        else:
            rng = bidder_rng(config.seed, trial, index)
            A = float(config.A_choices[int(rng.integers(len(config.A_choices)))])
            if A not in gates:
                gates[A] = min_valuation(gate_n, config.lam, A)
            valuation = float(rng.uniform(gates[A], A))
        bidders.append(Bidder(id=index + 1, valuation=valuation, A=A))

    executors = [
        Executor(id=j + 1, capacity=float(capacity),
                 own_valuation=config.executor_valuation_ratio * float(capacity))
        for j, capacity in enumerate(config.capacities)
    ]

    logger.debug(f"Generated trial {trial}: {len(bidders)} bidders, "
                 f"{len(executors)} executors, gate size {gate_n}")

    return Scenario(
        bidders=bidders,
        executors=executors,
        lam=config.lam,
        bid_rule=config.bid_rule,
        service_rule=config.service_rule,
        match_key=config.match_key,
        gate_n=gate_n,
        trial=trial,
    )
