"""Configuration management for scenarios, the solver and sweeps"""
import copy
import logging
from typing import Dict
from typing import Optional
from typing import Tuple

from swiptgame.channel import ChannelRealization
from swiptgame.channel import NetworkScenario
from swiptgame.channel import ScenarioTemplate
from swiptgame.channel import derive_seed
from swiptgame.channel import load_fixture
from swiptgame.channel import sample_channels
from swiptgame.constant import CENTRALIZED_RESOLUTION
from swiptgame.constant import DEFAULT_ABS_FLOOR
from swiptgame.constant import DEFAULT_ETA
from swiptgame.constant import DEFAULT_FIXED_POINT_TOLERANCE
from swiptgame.constant import DEFAULT_MAX_ITERATIONS
from swiptgame.constant import DEFAULT_SIGMA2
from swiptgame.constant import DEFAULT_TAU
from swiptgame.constant import DEFAULT_TRIALS
from swiptgame.constant import DEFAULT_ZETA
from swiptgame.exception import ConfigParseError
from swiptgame.exception import ConfigurationError
from swiptgame.experiments import SweepConfig
from swiptgame.game import SolverOptions
from swiptgame.utils import load_config_file

logger = logging.getLogger(__name__)

MAX_SEED = 2 ** 64 - 1


class Base(dict):
    """
    Dictionary with attribute access.

    Subclasses list their keys and defaults in `parameter`; unknown keys are
    reported and ignored.
    """

    section = ""
    parameter = {}

    def __init__(self, conf: Optional[Dict] = None):
        dict.__init__(self)
        if conf is None:
            conf = {}
        elif not isinstance(conf, dict):
            raise ConfigParseError(f"Section '{self.section}' must be a mapping")

        conf = copy.deepcopy(conf)
        for key, default in self.parameter.items():
            _val = conf.get(key)
            if _val is None:
                _val = copy.deepcopy(default)
            self[key] = _val

        for key in conf:
            if key not in self.parameter:
                logger.warning(
                    f"{self._field(key)} not seems to be a valid configuration parameter"
                )

        self.verify()

    def __getattr__(self, item):
        try:
            return self[item]
        except KeyError:
            raise AttributeError(item)

    def _field(self, key):
        return f"{self.section}.{key}" if self.section else key

    def _coerce(self, key, kind, label=""):
        try:
            self[key] = kind(self[key])
        except (TypeError, ValueError):
            raise ConfigurationError(
                f"'{self[key]}' is not a valid {label or kind.__name__}", field=self._field(key)
            )

    def _seed(self, key):
        self._coerce(key, int)
        if not 0 <= self[key] <= MAX_SEED:
            raise ConfigurationError(
                f"Seeds are unsigned 64-bit integers, got {self[key]}", field=self._field(key)
            )

    def verify(self):
        pass


def _float_or_list(value):
    if isinstance(value, (list, tuple)):
        return tuple(float(v) for v in value)
    return float(value)


class ScenarioConfiguration(Base):
    "Network scenario, powers in dB relative to the noise power"
    section = "scenario"
    parameter = {
        "n": 2,
        "power_db": 15.0,
        "d_max": 1.0,
        "relay_fraction": 0.5,
        "protocols": "AF",
        "tau": DEFAULT_TAU,
        "eta": DEFAULT_ETA,
        "sigma2": DEFAULT_SIGMA2,
        "fixture": "",
        "seed": 0,
    }

    def verify(self):
        self._coerce("n", int)
        for key in ["d_max", "tau", "eta", "sigma2"]:
            self._coerce(key, float)
        for key in ["power_db", "relay_fraction"]:
            self._coerce(key, _float_or_list, "number or list of numbers")
        if isinstance(self["protocols"], list):
            self["protocols"] = tuple(self["protocols"])
        self._seed("seed")

        try:
            self.template().build()
            if self["fixture"]:
                self.fixture_instance()
        except ConfigurationError as err:
            if err.field and not err.field.startswith(self.section):
                err.field = self._field(err.field)
            raise

    def template(self) -> ScenarioTemplate:
        return ScenarioTemplate(
            n=self["n"],
            power_db=self["power_db"],
            d_max=self["d_max"],
            relay_fraction=self["relay_fraction"],
            protocols=self["protocols"],
            tau=self["tau"],
            eta=self["eta"],
            sigma2=self["sigma2"],
        )

    def fixture_instance(self) -> Tuple[NetworkScenario, ChannelRealization]:
        scenario, channels = load_fixture(self["fixture"], self["protocols"])
        return scenario, channels

    def instance(self, seed: Optional[int] = None) -> Tuple[NetworkScenario, ChannelRealization]:
        """The configured scenario with its channels: the fixture's, or one seeded draw."""
        if self["fixture"]:
            return self.fixture_instance()
        scenario = self.template().build()
        _seed = self["seed"] if seed is None else seed
        return scenario, sample_channels(scenario, derive_seed(_seed, 0))


class SolverConfiguration(Base):
    section = "solver"
    parameter = {
        "zeta": DEFAULT_ZETA,
        "fixed_point_tolerance": DEFAULT_FIXED_POINT_TOLERANCE,
        "max_iterations": DEFAULT_MAX_ITERATIONS,
        "abs_floor": DEFAULT_ABS_FLOOR,
        "initial_profile": None,
    }

    def verify(self):
        for key in ["zeta", "fixed_point_tolerance", "abs_floor"]:
            self._coerce(key, float)
        self._coerce("max_iterations", int)
        if self["initial_profile"] is not None:
            if not isinstance(self["initial_profile"], (list, tuple)):
                raise ConfigurationError(
                    f"'{self['initial_profile']}' is not a list of ratios",
                    field=self._field("initial_profile"),
                )
            self._coerce("initial_profile", _float_or_list, "list of ratios")
        try:
            self.to_options()
        except ConfigurationError as err:
            err.field = self._field(err.field) if err.field else self.section
            raise

    def check_links(self, n: int) -> None:
        try:
            self.to_options().check_links(n)
        except ConfigurationError as err:
            err.field = self._field(err.field)
            raise

    def to_options(self, seed=None, record_trajectory: bool = False):
        return SolverOptions(
            zeta=self["zeta"],
            fixed_point_tolerance=self["fixed_point_tolerance"],
            max_iterations=self["max_iterations"],
            initial_profile=self["initial_profile"],
            seed=seed,
            abs_floor=self["abs_floor"],
            record_trajectory=record_trajectory,
        )


class SweepConfiguration(Base):
    section = "sweep"
    parameter = {
        "parameter": "inter_link_distance",
        "values": [],
        "trials": DEFAULT_TRIALS,
        "schemes": ["game", "random"],
        "master_seed": 0,
        "workers": 1,
        "centralized_resolution": CENTRALIZED_RESOLUTION,
    }

    def verify(self):
        if not isinstance(self["values"], (list, tuple)):
            self["values"] = [self["values"]]
        try:
            self["values"] = [float(v) for v in self["values"]]
        except (TypeError, ValueError):
            raise ConfigurationError("Sweep values must be numbers", field=self._field("values"))
        if isinstance(self["schemes"], str):
            self["schemes"] = [self["schemes"]]
        self._coerce("trials", int)
        self._coerce("workers", int)
        self._coerce("centralized_resolution", float)
        self._seed("master_seed")

    def to_sweep_config(
        self,
        scenario: ScenarioConfiguration,
        solver: SolverConfiguration,
        trials: Optional[int] = None,
        workers: Optional[int] = None,
        master_seed: Optional[int] = None,
    ):
        try:
            return SweepConfig(
                scenario_template=scenario.template(),
                sweep_parameter=self["parameter"],
                values=self["values"],
                trials=self["trials"] if trials is None else trials,
                schemes=self["schemes"],
                master_seed=self["master_seed"] if master_seed is None else master_seed,
                solver=solver.to_options(),
                centralized_resolution=self["centralized_resolution"],
                workers=self["workers"] if workers is None else workers,
            )
        except ConfigurationError as err:
            owner = solver if err.field in solver.parameter else self
            err.field = owner._field(err.field) if err.field else self.section
            raise


class Configuration(Base):
    "Complete configuration file"
    parameter = {
        "scenario": {},
        "solver": {},
        "sweep": None,
        "logging": None,
    }
    sections = {
        "scenario": ScenarioConfiguration,
        "solver": SolverConfiguration,
        "sweep": SweepConfiguration,
    }

    def verify(self):
        for key, cls in self.sections.items():
            if key == "sweep" and self[key] is None:
                continue
            self[key] = cls(self[key])


def create_from_config_file(cls, filename: str):
    _conf = load_config_file(filename)
    if _conf is None:
        _conf = {}
    if not isinstance(_conf, dict):
        raise ConfigParseError(f"{filename}: top level must be a mapping", line=1)
    return cls(_conf)
