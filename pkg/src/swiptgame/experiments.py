"""Monte Carlo sweeps comparing the equilibrium with the random and centralized schemes."""
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict
from dataclasses import dataclass
from dataclasses import field
from typing import Dict
from typing import List
from typing import Optional
from typing import Sequence
from typing import Tuple

import numpy as np
from scipy import stats

from swiptgame.baselines import GridSpec
from swiptgame.baselines import centralized_optimum
from swiptgame.baselines import random_profile
from swiptgame.channel import ChannelRealization
from swiptgame.channel import NetworkScenario
from swiptgame.channel import ScenarioTemplate
from swiptgame.channel import derive_seed
from swiptgame.channel import make_rng
from swiptgame.channel import sample_channels
from swiptgame.constant import CENTRALIZED_RESOLUTION
from swiptgame.constant import CONFIDENCE_LEVEL
from swiptgame.constant import DEFAULT_TRIALS
from swiptgame.constant import MAX_CENTRALIZED_LINKS
from swiptgame.exception import ConfigurationError
from swiptgame.exception import DomainError
from swiptgame.game import SolverOptions
from swiptgame.game import solve
from swiptgame.metrics import profile_rates
from swiptgame.util import build_schemes

logger = logging.getLogger(__name__)

SWEEP_PARAMETERS = {
    "inter_link_distance": "d_max",
    "link_count": "n",
    "power_db": "power_db",
}

SCHEMES = {
    "centralized": {"class": "swiptgame.experiments.CentralizedScheme", "kwargs": {}},
    "game": {"class": "swiptgame.experiments.GameScheme", "kwargs": {}},
    "random": {"class": "swiptgame.experiments.RandomScheme", "kwargs": {}},
}

# Random stream ids; fixed per scheme so a scheme's draws do not depend on which
# other schemes run in the same sweep.
CHANNEL_STREAM = 0
SCHEME_STREAMS = {"centralized": 1, "game": 2, "random": 3}


@dataclass(frozen=True)
class TrialOutcome:
    sum_rate: float
    mean_rho: float
    best_rate: float
    worst_rate: float
    iterations: float = math.nan
    converged: bool = True


def _outcome(rho, rates, iterations=math.nan, converged=True) -> TrialOutcome:
    _rho = np.asarray(rho, dtype=float)
    _rates = np.asarray(rates, dtype=float)
    return TrialOutcome(
        sum_rate=float(np.sum(_rates)),
        mean_rho=float(np.mean(_rho)),
        best_rate=float(np.max(_rates)),
        worst_rate=float(np.min(_rates)),
        iterations=float(iterations),
        converged=bool(converged),
    )


class Scheme(object):
    name = ""

    def __init__(self, config: Optional["SweepConfig"] = None, **kwargs):
        self.config = config
        self.kwargs = kwargs

    def run(
        self,
        scenario: NetworkScenario,
        channels: ChannelRealization,
        rng: np.random.Generator,
    ) -> TrialOutcome:
        raise NotImplementedError()


class GameScheme(Scheme):
    def __init__(self, config=None, **kwargs):
        Scheme.__init__(self, config, **kwargs)
        self.solver = config.solver if config is not None else SolverOptions()

    def run(self, scenario, channels, rng):
        options = SolverOptions(
            zeta=self.solver.zeta,
            fixed_point_tolerance=self.solver.fixed_point_tolerance,
            max_iterations=self.solver.max_iterations,
            initial_profile=self.solver.initial_profile,
            seed=rng,
            abs_floor=self.solver.abs_floor,
        )
        result = solve(scenario, channels, options)
        return _outcome(result.profile, result.rates, result.iterations, result.converged)


class RandomScheme(Scheme):
    def run(self, scenario, channels, rng):
        profile = random_profile(scenario.n, rng)
        return _outcome(profile, profile_rates(scenario, channels, profile))


class CentralizedScheme(Scheme):
    def __init__(self, config=None, **kwargs):
        Scheme.__init__(self, config, **kwargs)
        self.resolution = (
            config.centralized_resolution if config is not None else CENTRALIZED_RESOLUTION
        )

    def run(self, scenario, channels, rng):
        grid = GridSpec(self.resolution) if scenario.n <= 2 else None
        profile, _ = centralized_optimum(scenario, channels, grid)
        return _outcome(profile, profile_rates(scenario, channels, profile))


@dataclass(frozen=True)
class SweepConfig:
    scenario_template: ScenarioTemplate
    sweep_parameter: str
    values: Tuple[float, ...]
    trials: int = DEFAULT_TRIALS
    schemes: Tuple[str, ...] = ("game", "random")
    master_seed: int = 0
    solver: SolverOptions = field(default_factory=SolverOptions)
    centralized_resolution: float = CENTRALIZED_RESOLUTION
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))
        object.__setattr__(self, "schemes", tuple(self.schemes))

        if self.sweep_parameter not in SWEEP_PARAMETERS:
            raise ConfigurationError(
                f"Unknown sweep parameter '{self.sweep_parameter}', "
                f"expected one of {sorted(SWEEP_PARAMETERS)}",
                field="parameter",
            )
        if not self.values:
            raise ConfigurationError("A sweep needs at least one value", field="values")
        if int(self.trials) < 1:
            raise ConfigurationError(
                f"trials must be at least 1, got {self.trials}", field="trials"
            )
        if not self.schemes:
            raise ConfigurationError("A sweep needs at least one scheme", field="schemes")
        for name in self.schemes:
            if name not in SCHEMES:
                raise ConfigurationError(f"Unknown scheme: {name}", field="schemes")
        if int(self.workers) < 1:
            raise ConfigurationError(f"workers must be at least 1, got {self.workers}",
                                     field="workers")
        if self.master_seed < 0:
            raise ConfigurationError("master_seed must be an unsigned integer", field="master_seed")

        for value in self.values:
            scenario = self.scenario_at(value)
            self.solver.check_links(scenario.n)
            if "centralized" in self.schemes and scenario.n > MAX_CENTRALIZED_LINKS:
                raise ConfigurationError(
                    f"Centralized scheme needs n <= {MAX_CENTRALIZED_LINKS}, "
                    f"sweep value {value} gives n = {scenario.n}",
                    field="schemes",
                )

    def scenario_at(self, value) -> NetworkScenario:
        _field = SWEEP_PARAMETERS[self.sweep_parameter]
        if _field == "n":
            value = int(value)
        return self.scenario_template.build(**{_field: value})


@dataclass(frozen=True)
class SchemeStatistics:
    scheme: str
    mean_sum_rate: float
    ci_half_width: float
    mean_rho: float
    mean_best_rate: float
    mean_worst_rate: float
    mean_iterations: float
    failures: int
    trials: int
    rho_half_width: float = math.nan


@dataclass(frozen=True)
class SweepPoint:
    value: float
    statistics: Dict[str, SchemeStatistics]


@dataclass(frozen=True)
class SweepResult:
    parameter: str
    points: Tuple[SweepPoint, ...]

    def rows(self) -> List[Tuple[float, SchemeStatistics]]:
        _rows = []
        for point in sorted(self.points, key=lambda p: p.value):
            for scheme in sorted(point.statistics):
                _rows.append((point.value, point.statistics[scheme]))
        return _rows

    def series(self, scheme: str, attribute: str) -> np.ndarray:
        return np.array([getattr(p.statistics[scheme], attribute) for p in self.points])

    def to_dict(self) -> dict:
        return {
            "parameter": self.parameter,
            "points": [
                {
                    "value": point.value,
                    "statistics": {
                        name: asdict(stat) for name, stat in sorted(point.statistics.items())
                    },
                }
                for point in self.points
            ],
        }


def half_width(samples: np.ndarray, level: float = CONFIDENCE_LEVEL) -> float:
    """Normal-approximation confidence half-width of the sample mean; NaN for one sample."""
    if len(samples) < 2:
        return math.nan
    quantile = stats.norm.ppf(0.5 + level / 2.0)
    return float(quantile * np.std(samples, ddof=1) / math.sqrt(len(samples)))


def best_worst_rates(per_trial_rates: Sequence[Sequence[float]]) -> Tuple[float, float]:
    """Trial-averaged rates of the best and the worst link."""
    if len(per_trial_rates) == 0:
        raise DomainError("best_worst_rates needs at least one trial")
    best = [float(np.max(rates)) for rates in per_trial_rates]
    worst = [float(np.min(rates)) for rates in per_trial_rates]
    return float(np.mean(best)), float(np.mean(worst))


def aggregate(scheme: str, outcomes: Sequence[TrialOutcome]) -> SchemeStatistics:
    sum_rates = np.array([o.sum_rate for o in outcomes])
    iterations = np.array([o.iterations for o in outcomes])
    if np.all(np.isnan(iterations)):
        mean_iterations = math.nan
    else:
        mean_iterations = float(np.mean(iterations))

    return SchemeStatistics(
        scheme=scheme,
        mean_sum_rate=float(np.mean(sum_rates)),
        ci_half_width=half_width(sum_rates),
        mean_rho=float(np.mean([o.mean_rho for o in outcomes])),
        mean_best_rate=float(np.mean([o.best_rate for o in outcomes])),
        mean_worst_rate=float(np.mean([o.worst_rate for o in outcomes])),
        mean_iterations=mean_iterations,
        failures=sum(1 for o in outcomes if not o.converged),
        trials=len(outcomes),
        rho_half_width=half_width(np.array([o.mean_rho for o in outcomes])),
    )


@dataclass(frozen=True)
class TrialTask:
    scenario: NetworkScenario
    master_seed: int
    value_index: int
    trial_index: int


class TrialRunner(object):
    """Runs every requested scheme on one channel draw; picklable for process pools."""

    def __init__(self, config: SweepConfig):
        _conf = {name: SCHEMES[name] for name in config.schemes}
        self.schemes = build_schemes(_conf, config=config)

    def __call__(self, task: TrialTask) -> Dict[str, TrialOutcome]:
        channels = sample_channels(
            task.scenario,
            derive_seed(task.master_seed, task.value_index, task.trial_index, CHANNEL_STREAM),
        )
        outcomes = {}
        for name in sorted(self.schemes):
            rng = make_rng(
                derive_seed(
                    task.master_seed, task.value_index, task.trial_index, SCHEME_STREAMS[name]
                )
            )
            outcomes[name] = self.schemes[name].run(task.scenario, channels, rng)
        return outcomes


def run_sweep(config: SweepConfig) -> SweepResult:
    """
    Run every scheme on `trials` channel draws per sweep value and average the metrics.

    Trial outcomes are kept in trial order before averaging, so results do not
    depend on the number of workers.
    """
    runner = TrialRunner(config)
    executor = ProcessPoolExecutor(max_workers=config.workers) if config.workers > 1 else None

    points = []
    try:
        for value_index, value in enumerate(config.values):
            scenario = config.scenario_at(value)
            tasks = [
                TrialTask(scenario, config.master_seed, value_index, trial)
                for trial in range(config.trials)
            ]
            if executor is not None:
                chunksize = max(1, config.trials // (4 * config.workers))
                outcomes = list(executor.map(runner, tasks, chunksize=chunksize))
            else:
                outcomes = [runner(task) for task in tasks]

            statistics = {
                name: aggregate(name, [o[name] for o in outcomes]) for name in config.schemes
            }
            for name, stat in statistics.items():
                if stat.failures:
                    logger.warning(
                        f"{stat.failures} of {stat.trials} '{name}' trials did not converge "
                        f"at {config.sweep_parameter}={value}"
                    )
            logger.info(
                f"{config.sweep_parameter}={value}: "
                + ", ".join(
                    f"{name} {stat.mean_sum_rate:.4f}" for name, stat in sorted(statistics.items())
                )
            )
            points.append(SweepPoint(value=value, statistics=statistics))
    finally:
        if executor is not None:
            executor.shutdown()

    return SweepResult(parameter=config.sweep_parameter, points=tuple(points))
