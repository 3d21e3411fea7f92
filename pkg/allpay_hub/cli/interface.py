import argparse
import dataclasses
import json
import sys
from typing import Any, List, Optional

from ..core.allocation import lemma_partition_gap, run_auction
from ..core.auction import (
    BidParams,
    BidRule,
    EvalMethod,
    equilibrium_bid,
    min_valuation,
    optimal_reserve,
)
from ..core.baselines import greedy_allocate, pmmra_allocate, stackelberg_allocate
from ..core.distributions import UniformDistribution
from ..core.exceptions import (
    AllPayError,
    ConfigValidationError,
    InvalidParameterError,
    ScenarioFileError,
    SolverError,
    TrialError,
)
from ..core.models import Scheme
from ..core.utils import format_value, parse_enum
from ..infra.settings import settings
from ..infra.storage import storage
from ..logging_config import get_logger
from ..simulation.config import ScenarioConfig
from ..simulation.export import (
    comparison_csv,
    report_csv,
    report_json,
    report_table,
    summary_csv,
    sweep_csv,
)
from ..simulation.generator import generate_scenario
from ..simulation.runner import compare_schemes, run_trials, summarize
from ..simulation.sweep import panel_sweep, sweep_bids

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_SOLVER = 2

logger = get_logger(__name__)


class _ArgumentParser(argparse.ArgumentParser):
    """Ошибки разбора аргументов завершаются кодом 1, а не 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_VALIDATION, f"{self.prog}: ошибка: {message}\n")


def _rounded(value: Any, precision: int) -> Any:
    if isinstance(value, float):
        return round(value, precision)
    if isinstance(value, dict):
        return {k: _rounded(v, precision) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_rounded(v, precision) for v in value]
    return value


class CLIInterface:
    """Командная строка для расчетов all-pay аукциона и экспериментов."""

    def __init__(self):
        self.precision = int(settings.get("precision", 6))

    def build_parser(self) -> argparse.ArgumentParser:
        parser = _ArgumentParser(
            prog="allpay",
            description="All-pay аукцион для оплаты вычислений на периферии",
            formatter_class=argparse.RawDescriptionHelpFormatter,
            epilog=self._get_help_epilog()
        )
        subparsers = parser.add_subparsers(dest="command", help="Доступные команды")

        bid_parser = subparsers.add_parser("bid", help="Равновесная ставка")
        self._add_auction_args(bid_parser)
        bid_parser.add_argument("--v", type=float, required=True,
                                help="Оценка участника")
        bid_parser.add_argument("--vmin", type=float, default=0.0,
                                help="Нижняя граница интегрирования")
        bid_parser.add_argument("--rule", choices=[r.value for r in BidRule],
                                default=BidRule.EQUILIBRIUM.value,
                                help="Форма множителя lambda")

        reserve_parser = subparsers.add_parser("reserve",
                                               help="Оптимальное резервное значение")
        self._add_auction_args(reserve_parser)
        reserve_parser.add_argument("--v0", type=float, required=True,
                                    help="Оценка ресурса исполнителем")
        reserve_parser.add_argument(
            "--method", default=EvalMethod.AUTO.value,
            choices=[EvalMethod.AUTO.value, EvalMethod.CLOSED_FORM.value,
                     EvalMethod.BISECTION.value],
            help="Способ вычисления")

        minval_parser = subparsers.add_parser("minval", help="Минимальная оценка v0")
        self._add_auction_args(minval_parser)

        lemma_parser = subparsers.add_parser(
            "lemma", help="Разница выручки разбиений (n-1, n, n+1) и (n, n, n)")
        lemma_parser.add_argument("--n", type=int, required=True)
        lemma_parser.add_argument("--lambda", type=float, required=True, dest="lam")
        lemma_parser.add_argument("--C", type=float, default=1.0)
        self._add_output_arg(lemma_parser)

        allocate_parser = subparsers.add_parser("allocate",
                                                help="Распределение по сценарию")
        allocate_parser.add_argument("--scenario", required=True,
                                     help="JSON-файл сценария")
        allocate_parser.add_argument("--trial", type=int, default=0,
                                     help="Номер испытания для генерации оценок")
        allocate_parser.add_argument("--scheme", choices=[s.value for s in Scheme],
                                     default=Scheme.ALLPAY.value)
        allocate_parser.add_argument("--format", choices=["table", "csv", "json"],
                                     default="table")
        self._add_output_arg(allocate_parser)

        for name, help_text in (("simulate", "Сводка испытаний Монте-Карло"),
                                ("compare", "Сравнение схем по испытаниям")):
            sim_parser = subparsers.add_parser(name, help=help_text)
            sim_parser.add_argument("--config", help="JSON-файл конфигурации")
            sim_parser.add_argument("--trials", type=int,
                                    default=int(settings.get("default_trials", 10)))
            sim_parser.add_argument("--seed", type=int, help="Начальное значение ГПСЧ")
            sim_parser.add_argument("--threads", type=int,
                                    help="Число процессов (по умолчанию ALLPAY_THREADS)")
            sim_parser.add_argument("--format", choices=["csv", "json"], default="csv")
            self._add_output_arg(sim_parser)

        sweep_parser = subparsers.add_parser("sweep", help="Кривые ставок")
        sweep_parser.add_argument("--n", type=int, nargs="+")
        sweep_parser.add_argument("--lambda", type=float, nargs="+", dest="lam")
        sweep_parser.add_argument("--A", type=float, nargs="+")
        sweep_parser.add_argument("--step", type=float, default=1.0,
                                  help="Шаг сетки оценок")
        sweep_parser.add_argument("--format", choices=["csv", "json"], default="csv")
        self._add_output_arg(sweep_parser)

        return parser

    def _add_auction_args(self, parser: argparse.ArgumentParser):
        parser.add_argument("--n", type=int, required=True, help="Размер набора")
        parser.add_argument("--lambda", type=float, required=True, dest="lam",
                            help="Весовой коэффициент lambda")
        parser.add_argument("--A", type=float, required=True,
                            help="Верхняя граница оценки")
        self._add_output_arg(parser)

    def _add_output_arg(self, parser: argparse.ArgumentParser):
        parser.add_argument("--output", help="Файл для записи результата")

    def run(self, argv: Optional[List[str]] = None) -> int:
        """Главная точка входа CLI. Возвращает код завершения."""
        parser = self.build_parser()
        args = parser.parse_args(argv)

        if not args.command:
            parser.print_help()
            return EXIT_VALIDATION

        handlers = {
            "bid": self.handle_bid,
            "reserve": self.handle_reserve,
            "minval": self.handle_minval,
            "lemma": self.handle_lemma,
            "allocate": self.handle_allocate,
            "simulate": self.handle_simulate,
            "compare": self.handle_compare,
            "sweep": self.handle_sweep,
        }

        try:
            handlers[args.command](args)
        except Exception as e:
            return self._handle_error(e)
        return EXIT_OK

    def _get_help_epilog(self) -> str:
        return """
Примеры использования:
  Расчеты:
    bid --n 3 --lambda 0.5 --A 70 --v 70
    reserve --n 3 --lambda 0.5 --A 70 --v0 60
    minval --n 2 --lambda 0 --A 70
    lemma --n 4 --lambda 1 --C 1

  Эксперименты:
    allocate --scenario scenario.json
    compare --trials 100 --seed 42 --output compare.csv
    simulate --config config.json --trials 10
    sweep --output sweep.csv

Подробная информация по команде: allpay <command> --help
"""

    def _handle_error(self, error: Exception) -> int:
        """Печатает сообщение об ошибке и возвращает код завершения."""
        cause = error.cause if isinstance(error, TrialError) else error
        print(f"Ошибка: {error}", file=sys.stderr)

        if isinstance(cause, SolverError):
            print("Численный решатель не сошелся, проверьте параметры",
                  file=sys.stderr)
            return EXIT_SOLVER
        if isinstance(cause, ConfigValidationError):
            print(f"Поля с ошибками: {', '.join(cause.fields)}", file=sys.stderr)
            return EXIT_VALIDATION
        if isinstance(cause, (InvalidParameterError, ScenarioFileError, AllPayError)):
            return EXIT_VALIDATION

        logger.error(f"Unexpected error: {error}", exc_info=True)
        return EXIT_VALIDATION

    def _emit(self, text: str, output: Optional[str]):
        if output:
            storage.write_text(output, text)
            print(f"Результат записан в {output}", file=sys.stderr)
        else:
            sys.stdout.write(text)

    def _emit_value(self, value: float, output: Optional[str]):
        self._emit(format_value(value, self.precision) + "\n", output)

    def _emit_json(self, data: Any, output: Optional[str]):
        self._emit(json.dumps(_rounded(data, self.precision), indent=2,
                              ensure_ascii=False) + "\n", output)

    def _load_config(self, args) -> ScenarioConfig:
        if getattr(args, "config", None):
            config = ScenarioConfig.from_dict(storage.load_json(args.config))
        else:
            config = ScenarioConfig()
        if getattr(args, "seed", None) is not None:
            config.seed = args.seed
        config.validate()
        return config

    def handle_bid(self, args):
        dist = UniformDistribution(args.A)
        params = BidParams(n=args.n, lam=args.lam, rule=args.rule, v_min=args.vmin)
        self._emit_value(equilibrium_bid(dist, params, args.v), args.output)

    def handle_reserve(self, args):
        dist = UniformDistribution(args.A)
        result = optimal_reserve(dist, args.n, args.lam, args.v0, args.method)
        self._emit_value(result.r_star, args.output)

    def handle_minval(self, args):
        self._emit_value(min_valuation(args.n, args.lam, args.A), args.output)

    def handle_lemma(self, args):
        self._emit_value(lemma_partition_gap(args.n, args.lam, args.C), args.output)

    def handle_allocate(self, args):
        config = ScenarioConfig.from_dict(storage.load_json(args.scenario))
        scenario = generate_scenario(config, args.trial)

        allocators = {
            Scheme.ALLPAY: lambda: run_auction(scenario),
            Scheme.GREEDY: lambda: greedy_allocate(scenario, config.baseline),
            Scheme.PMMRA: lambda: pmmra_allocate(scenario, config.baseline),
            Scheme.STACKELBERG: lambda: stackelberg_allocate(scenario, config.baseline),
        }
        report = allocators[parse_enum(Scheme, args.scheme, "scheme")]()

        if args.format == "json":
            self._emit(report_json(report), args.output)
        elif args.format == "csv":
            self._emit(report_csv(report), args.output)
        else:
            self._emit(report_table(report), args.output)

    def handle_simulate(self, args):
        config = self._load_config(args)
        summaries = summarize(run_trials(config, args.trials, args.threads))
        if args.format == "json":
            self._emit_json([dataclasses.asdict(s) for s in summaries], args.output)
        else:
            self._emit(summary_csv(summaries), args.output)

    def handle_compare(self, args):
        config = self._load_config(args)
        rows = compare_schemes(config, args.trials, args.threads)
        if args.format == "json":
            self._emit_json([dataclasses.asdict(r) for r in rows], args.output)
        else:
            self._emit(comparison_csv(rows), args.output)

    def handle_sweep(self, args):
        if args.n or args.lam or args.A:
            rows = sweep_bids(args.n or [3], args.lam or [0.5], args.A or [70.0],
                              step=args.step)
        else:
            rows = panel_sweep(step=args.step)
        if args.format == "json":
            self._emit_json([dataclasses.asdict(r) for r in rows], args.output)
        else:
            self._emit(sweep_csv(rows), args.output)
