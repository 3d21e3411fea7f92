import pytest

from allpay_hub.core.distributions import UniformDistribution
from allpay_hub.core.models import Bidder, Executor
from allpay_hub.simulation.config import ScenarioConfig


@pytest.fixture
def uniform70():
    return UniformDistribution(70.0)


@pytest.fixture
def desk_bidders():
    """Набор из трех участников с оценками 60, 65, 68 при A = 70."""
    return [Bidder(id=i + 1, valuation=v, A=70.0) for i, v in enumerate([60.0, 65.0, 68.0])]


@pytest.fixture
def desk_executors():
    return [Executor(id=j + 1, capacity=c, own_valuation=c / 2)
            for j, c in enumerate([70.0, 80.0, 90.0])]


@pytest.fixture
def default_config():
    return ScenarioConfig(seed=42)
