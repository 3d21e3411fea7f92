from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence

import numpy as np

from ..core.auction import BidParams, BidRule, equilibrium_bid
from ..core.distributions import UniformDistribution
from ..core.exceptions import InvalidParameterError
from ..decorators import log_action


@dataclass(frozen=True)
class SweepRow:
    n: int
    lam: float
    A: float
    v: float
    bid_eq9: float
    bid_eq20: float


def _check_step(step: float):
    if not step > 0:
        raise InvalidParameterError(f"step должен быть положительным, получено {step}")


def valuation_grid(A: float, step: float = 1.0) -> List[float]:
    _check_step(step)
    count = int(round(A / step))
    return [float(v) for v in np.linspace(0.0, A, count + 1)]


@log_action("SWEEP_BIDS")
def sweep_bids(n_values: Sequence[int], lambda_values: Sequence[float],
               A_values: Sequence[float],
               v_grid: Optional[Iterable[float]] = None,
               step: float = 1.0) -> List[SweepRow]:
    """Кривые ставок по декартову произведению n, lambda и A."""
    if v_grid is None:
        _check_step(step)
    rows = []
    for n in n_values:
        for lam in lambda_values:
            for A in A_values:
                dist = UniformDistribution(A)
                grid = valuation_grid(A, step) if v_grid is None else list(v_grid)
                standard = BidParams(n=n, lam=lam, rule=BidRule.EQUILIBRIUM)
                scaled = BidParams(n=n, lam=lam, rule=BidRule.SCALED)
                for v in grid:
                    if not 0.0 <= v <= A:
                        continue
                    rows.append(SweepRow(
                        n=n, lam=lam, A=A, v=v,
                        bid_eq9=equilibrium_bid(dist, standard, v),
                        bid_eq20=equilibrium_bid(dist, scaled, v),
                    ))
    return rows


def panel_sweep(step: float = 1.0) -> List[SweepRow]:
    """Три набора кривых: по lambda, по n и по A."""
    panels = [
        ([3], [0.0, 0.5, 1.0], [70.0]),
        ([2, 3, 4, 5], [0.5], [70.0]),
        ([3], [0.5], [70.0, 80.0, 90.0]),
    ]
    seen = set()
    rows = []
    for n_values, lambda_values, A_values in panels:
        for row in sweep_bids(n_values, lambda_values, A_values, step=step):
            key = (row.n, row.lam, row.A, row.v)
            if key not in seen:
                seen.add(key)
                rows.append(row)
    return rows
