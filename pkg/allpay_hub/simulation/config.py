from dataclasses import dataclass, field, fields
from typing import Any, Dict, List, Optional, Tuple

from ..core.auction import BidRule
from ..core.baselines import BaselineConfig
from ..core.exceptions import ConfigValidationError, InvalidParameterError
from ..core.models import MatchKey, ServiceRule
from ..core.utils import parse_enum
from ..infra.settings import settings

MAX_SEED = 2 ** 64


@dataclass
class ScenarioConfig:
    num_eus: int = 12
    num_ecs: int = 3
    lam: float = 0.5
    A_choices: Tuple[float, ...] = (70.0, 80.0, 90.0)
    capacities: Tuple[float, ...] = (70.0, 80.0, 90.0)
    bid_rule: BidRule = BidRule.EQUILIBRIUM
    service_rule: ServiceRule = ServiceRule.AVG_RESERVE
    match_key: MatchKey = MatchKey.VALUATION
    seed: int = field(default_factory=lambda: int(settings.get("default_seed", 42)))
    executor_valuation_ratio: float = 0.5
    baseline: BaselineConfig = field(default_factory=BaselineConfig)
    # явные оценки для воспроизведения конкретного сценария
    valuations: Optional[List[float]] = None
    A_values: Optional[List[float]] = None

    def validate(self):
        problems: Dict[str, str] = {}

        if not isinstance(self.num_eus, int) or self.num_eus < 0:
            problems["num_eus"] = f"num_eus должно быть целым >= 0 ({self.num_eus!r})"
        if not isinstance(self.num_ecs, int) or self.num_ecs < 1:
            problems["num_ecs"] = f"num_ecs должно быть целым >= 1 ({self.num_ecs!r})"
        elif self.num_ecs != len(self.capacities):
            problems["num_ecs"] = (f"num_ecs={self.num_ecs} не совпадает с числом "
                                   f"мощностей {len(self.capacities)}")
        if not 0.0 <= self.lam <= 1.0:
            problems["lambda"] = f"lambda должна лежать в [0, 1] ({self.lam})"
        if not self.A_choices or any(a <= 0 for a in self.A_choices):
            problems["A_choices"] = "A_choices должен быть непустым и положительным"
        if any(c <= 0 for c in self.capacities):
            problems["capacities"] = "мощности исполнителей должны быть положительными"
        if not isinstance(self.seed, int) or not 0 <= self.seed < MAX_SEED:
            problems["seed"] = f"seed должен быть 64-битным беззнаковым целым ({self.seed!r})"
        if self.executor_valuation_ratio < 0:
            problems["executor_valuation_ratio"] = "доля оценки исполнителя отрицательна"

        for name, enum_type in (("bid_rule", BidRule),
                                ("service_rule", ServiceRule),
                                ("match_key", MatchKey)):
            try:
                setattr(self, name, enum_type(getattr(self, name)))
            except ValueError:
                allowed = ", ".join(item.value for item in enum_type)
                problems[name] = (f"{name}={getattr(self, name)!r}, "
                                  f"допустимо: {allowed}")

        if self.valuations is not None:
            if len(self.valuations) != self.num_eus:
                problems["valuations"] = (f"задано {len(self.valuations)} оценок "
                                          f"при num_eus={self.num_eus}")
            elif self.A_values is not None and len(self.A_values) != len(self.valuations):
                problems["A_values"] = "длина A_values не совпадает с числом оценок"
            else:
                uppers = self.A_values or [max(self.A_choices or [0.0])] * len(self.valuations)
                if any(not 0.0 <= v <= a for v, a in zip(self.valuations, uppers)):
                    problems["valuations"] = "каждая оценка должна лежать в [0, A]"
        elif self.A_values is not None:
            problems["A_values"] = "A_values задан без valuations"

        if problems:
            raise ConfigValidationError(list(problems), list(problems.values()))

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ScenarioConfig":
        data = dict(data)
        if "lambda" in data:
            data["lam"] = data.pop("lambda")

        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigValidationError(
                unknown, [f"неизвестное поле '{name}'" for name in unknown]
            )

        for name in ("A_choices", "capacities"):
            if name in data:
                data[name] = tuple(float(x) for x in data[name])
        if "capacities" in data and "num_ecs" not in data:
            data["num_ecs"] = len(data["capacities"])
        if data.get("valuations") is not None and "num_eus" not in data:
            data["num_eus"] = len(data["valuations"])

        if isinstance(data.get("baseline"), dict):
            try:
                data["baseline"] = BaselineConfig(**data["baseline"])
            except (TypeError, ValueError, InvalidParameterError) as e:
                raise ConfigValidationError(["baseline"], [f"baseline: {e}"])

        config = cls(**data)
        config.validate()
        return config

    def to_dict(self) -> Dict[str, Any]:
        return {
            "num_eus": self.num_eus,
            "num_ecs": self.num_ecs,
            "lambda": self.lam,
            "A_choices": list(self.A_choices),
            "capacities": list(self.capacities),
            "bid_rule": parse_enum(BidRule, self.bid_rule, "bid_rule").value,
            "service_rule": parse_enum(ServiceRule, self.service_rule,
                                       "service_rule").value,
            "match_key": parse_enum(MatchKey, self.match_key, "match_key").value,
            "seed": self.seed,
            "executor_valuation_ratio": self.executor_valuation_ratio,
            "baseline": self.baseline.to_dict(),
            "valuations": self.valuations,
            "A_values": self.A_values,
        }
