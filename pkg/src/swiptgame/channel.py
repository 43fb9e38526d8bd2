"""Link geometry and Rayleigh-fading channel sampling."""
import logging
import math
from dataclasses import dataclass
from dataclasses import replace
from enum import Enum
from typing import List
from typing import Optional
from typing import Sequence
from typing import Tuple
from typing import Union

import numpy as np

from swiptgame import PROTOCOLS
from swiptgame.constant import DEFAULT_ETA
from swiptgame.constant import DEFAULT_SIGMA2
from swiptgame.constant import DEFAULT_TAU
from swiptgame.constant import TOTAL_LINK_LENGTH
from swiptgame.exception import ConfigurationError
from swiptgame.exception import DomainError
from swiptgame.util import db_to_linear

logger = logging.getLogger(__name__)

SeedLike = Union[None, int, np.random.SeedSequence, np.random.Generator]

MAX_RESAMPLE = 16


class NodePair(str, Enum):
    SOURCE_RELAY = "sr"
    RELAY_DESTINATION = "rd"


def _frozen_array(value, dtype=float):
    arr = np.array(value, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class LinkGeometry:
    d_sr: float
    d_rd: float
    lateral_offset: float = 0.0

    def __post_init__(self):
        if not self.d_sr > 0 or not self.d_rd > 0:
            raise ConfigurationError(
                f"Hop lengths must be positive, got d_sr={self.d_sr}, d_rd={self.d_rd}",
                field="relay_fraction",
            )

    @property
    def total_length(self) -> float:
        return self.d_sr + self.d_rd

    def position(self, node: str) -> Tuple[float, float]:
        """(longitudinal, lateral) coordinates of 'source', 'relay' or 'destination'."""
        if node == "source":
            return 0.0, self.lateral_offset
        elif node == "relay":
            return self.d_sr, self.lateral_offset
        elif node == "destination":
            return self.d_sr + self.d_rd, self.lateral_offset
        raise ValueError(f"Unknown node: {node}")


@dataclass(frozen=True, eq=False)
class NetworkScenario:
    powers: np.ndarray
    geometries: Tuple[LinkGeometry, ...]
    protocols: Tuple[str, ...]
    tau: float = DEFAULT_TAU
    eta: float = DEFAULT_ETA
    sigma2: float = DEFAULT_SIGMA2

    def __post_init__(self):
        object.__setattr__(self, "powers", _frozen_array(self.powers))
        object.__setattr__(self, "geometries", tuple(self.geometries))
        object.__setattr__(self, "protocols", tuple(str(p).upper() for p in self.protocols))

        n = len(self.powers)
        if n < 1:
            raise ConfigurationError("A scenario needs at least one link", field="n")
        if len(self.geometries) != n or len(self.protocols) != n:
            raise ConfigurationError(
                f"powers ({n}), geometries ({len(self.geometries)}) and protocols "
                f"({len(self.protocols)}) must have the same length",
                field="protocols",
            )
        if not np.all(np.isfinite(self.powers)) or np.any(self.powers <= 0):
            raise ConfigurationError("All transmit powers must be positive", field="power_db")
        if not 0 < self.eta <= 1:
            raise ConfigurationError(
                f"eta must satisfy 0 < eta <= 1, got {self.eta}", field="eta"
            )
        if not self.sigma2 > 0:
            raise ConfigurationError(f"sigma2 must be positive, got {self.sigma2}", field="sigma2")
        if not 2 <= self.tau <= 5:
            raise ConfigurationError(f"tau must lie in [2, 5], got {self.tau}", field="tau")
        for tag in self.protocols:
            if tag not in PROTOCOLS:
                raise ConfigurationError(f"Unknown relaying protocol: {tag}", field="protocols")

    @property
    def n(self) -> int:
        return len(self.powers)

    @property
    def df_mask(self) -> np.ndarray:
        return np.array([p == "DF" for p in self.protocols], dtype=bool)

    def with_protocols(self, protocols: Union[str, Sequence[str]]) -> "NetworkScenario":
        return replace(self, protocols=expand_protocols(protocols, self.n))

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "powers": self.powers.tolist(),
            "geometries": [
                {"d_sr": g.d_sr, "d_rd": g.d_rd, "lateral_offset": g.lateral_offset}
                for g in self.geometries
            ],
            "protocols": list(self.protocols),
            "tau": self.tau,
            "eta": self.eta,
            "sigma2": self.sigma2,
        }


@dataclass(frozen=True, eq=False)
class ChannelRealization:
    g2: np.ndarray
    h2: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "g2", _frozen_array(self.g2))
        object.__setattr__(self, "h2", _frozen_array(self.h2))
        if self.g2.ndim != 2 or self.g2.shape[0] != self.g2.shape[1]:
            raise ConfigurationError(f"g2 must be square, got shape {self.g2.shape}")
        if self.h2.shape != self.g2.shape:
            raise ConfigurationError(
                f"g2 {self.g2.shape} and h2 {self.h2.shape} shapes differ"
            )
        if not (np.all(np.isfinite(self.g2)) and np.all(np.isfinite(self.h2))):
            raise ConfigurationError("Channel gains must be finite")
        if np.any(self.g2 < 0) or np.any(self.h2 < 0):
            raise ConfigurationError("Channel gains must be nonnegative")

    @property
    def n(self) -> int:
        return self.g2.shape[0]

    def to_dict(self) -> dict:
        return {"g2": self.g2.tolist(), "h2": self.h2.tolist()}


def expand_protocols(protocols: Union[str, Sequence[str]], n: int) -> Tuple[str, ...]:
    if isinstance(protocols, str):
        return (protocols.upper(),) * n
    if not isinstance(protocols, Sequence):
        raise ConfigurationError(
            f"Protocols must be a tag or a list of tags, got {protocols!r}", field="protocols"
        )
    _protocols = tuple(str(p).upper() for p in protocols)
    if len(_protocols) != n:
        raise ConfigurationError(
            f"Expected {n} protocol tags, got {len(_protocols)}", field="protocols"
        )
    return _protocols


def build_parallel_geometry(
    n: int, d_max: float, relay_fraction: Union[float, Sequence[float]] = 0.5
) -> List[LinkGeometry]:
    """
    Parallel unit-length links with lateral offsets equally spaced over [0, d_max].

    :param n: Number of links
    :param d_max: Distance between the two outermost links
    :param relay_fraction: d_sr of every link, or one value per link
    :return: list of LinkGeometry
    """
    if n < 1:
        raise ConfigurationError(f"Link count must be at least 1, got {n}", field="n")
    if d_max < 0:
        raise ConfigurationError(f"d_max must be nonnegative, got {d_max}", field="d_max")

    if isinstance(relay_fraction, (int, float)):
        fractions = [float(relay_fraction)] * n
    else:
        fractions = [float(f) for f in relay_fraction]
        if len(fractions) != n:
            raise ConfigurationError(
                f"Expected {n} relay fractions, got {len(fractions)}", field="relay_fraction"
            )

    for frac in fractions:
        if not 0 < frac < 1:
            raise ConfigurationError(
                f"relay_fraction must lie strictly inside (0, 1), got {frac}",
                field="relay_fraction",
            )

    if n == 1:
        offsets = [0.0]
    else:
        offsets = [d_max * k / (n - 1) for k in range(n)]

    return [
        LinkGeometry(
            d_sr=frac * TOTAL_LINK_LENGTH,
            d_rd=(1.0 - frac) * TOTAL_LINK_LENGTH,
            lateral_offset=offset,
        )
        for frac, offset in zip(fractions, offsets)
    ]


def asymmetric_two_link_geometry(d_l: float) -> List[LinkGeometry]:
    """Relay of link 1 near its source, relay of link 2 near its destination."""
    return build_parallel_geometry(2, d_l, relay_fraction=[0.25, 0.75])


def cross_distance(
    geometry_i: LinkGeometry, geometry_j: LinkGeometry, pair: Union[NodePair, str]
) -> float:
    """
    Euclidean distance from the transmitting node of link i to the receiving node of link j.

    :param pair: NodePair.SOURCE_RELAY for S_i -> R_j, NodePair.RELAY_DESTINATION for R_i -> D_j
    """
    pair = NodePair(pair)
    if pair is NodePair.SOURCE_RELAY:
        tx = geometry_i.position("source")
        rx = geometry_j.position("relay")
    else:
        tx = geometry_i.position("relay")
        rx = geometry_j.position("destination")
    return math.hypot(rx[0] - tx[0], rx[1] - tx[1])


def mean_gain(distance: float, tau: float) -> float:
    if not distance > 0:
        raise DomainError(f"Path loss is undefined at distance {distance}")
    return float(distance) ** (-float(tau))


def mean_gain_matrices(scenario: NetworkScenario) -> Tuple[np.ndarray, np.ndarray]:
    n = scenario.n
    mean_g2 = np.empty((n, n))
    mean_h2 = np.empty((n, n))
    for i, geo_i in enumerate(scenario.geometries):
        for j, geo_j in enumerate(scenario.geometries):
            mean_g2[i, j] = mean_gain(cross_distance(geo_i, geo_j, NodePair.SOURCE_RELAY),
                                      scenario.tau)
            mean_h2[i, j] = mean_gain(cross_distance(geo_i, geo_j, NodePair.RELAY_DESTINATION),
                                      scenario.tau)
    return mean_g2, mean_h2


def derive_seed(master_seed: int, *keys: int) -> np.random.SeedSequence:
    """Independent stream for the counter tuple `keys` under `master_seed`."""
    return np.random.SeedSequence(entropy=int(master_seed), spawn_key=tuple(int(k) for k in keys))


def make_rng(seed: SeedLike) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def sample_channels(scenario: NetworkScenario, seed: SeedLike = None) -> ChannelRealization:
    """
    Draw one Rayleigh-fading realization: exponential power gains with path-loss means.

    :param scenario: The network
    :param seed: int, SeedSequence or Generator; the same seed gives the same realization
    :return: ChannelRealization
    """
    rng = make_rng(seed)
    mean_g2, mean_h2 = mean_gain_matrices(scenario)

    for _ in range(MAX_RESAMPLE):
        g2 = rng.exponential(scale=1.0, size=mean_g2.shape) * mean_g2
        h2 = rng.exponential(scale=1.0, size=mean_h2.shape) * mean_h2
        if (
            np.all(np.isfinite(g2))
            and np.all(np.isfinite(h2))
            and np.all(g2 > 0)
            and np.all(h2 > 0)
        ):
            return ChannelRealization(g2=g2, h2=h2)
        logger.warning("Rejected a degenerate channel realization, resampling")

    raise DomainError("Could not draw a finite channel realization")


@dataclass(frozen=True)
class ScenarioTemplate:
    """A scenario family; sweeps override one field per sweep value."""

    n: int = 2
    power_db: Union[float, Sequence[float]] = 15.0
    d_max: float = 1.0
    relay_fraction: Union[float, Sequence[float]] = 0.5
    protocols: Union[str, Sequence[str]] = "AF"
    tau: float = DEFAULT_TAU
    eta: float = DEFAULT_ETA
    sigma2: float = DEFAULT_SIGMA2

    def build(self, **overrides) -> NetworkScenario:
        _tmpl = replace(self, **overrides) if overrides else self
        n = int(_tmpl.n)

        if isinstance(_tmpl.power_db, (int, float)):
            powers = [db_to_linear(_tmpl.power_db)] * n
        else:
            powers = [db_to_linear(p) for p in _tmpl.power_db]
            if len(powers) != n:
                raise ConfigurationError(
                    f"Expected {n} power values, got {len(powers)}", field="power_db"
                )

        relay_fraction = _tmpl.relay_fraction
        if not isinstance(relay_fraction, (int, float)) and len(relay_fraction) != n:
            raise ConfigurationError(
                f"Expected {n} relay fractions, got {len(relay_fraction)}", field="relay_fraction"
            )

        return NetworkScenario(
            powers=powers,
            geometries=build_parallel_geometry(n, _tmpl.d_max, relay_fraction),
            protocols=expand_protocols(_tmpl.protocols, n),
            tau=_tmpl.tau,
            eta=_tmpl.eta,
            sigma2=_tmpl.sigma2,
        )


FIXTURE_POWERS = [5.3080, 7.1917]
FIXTURE_G2 = [[2.1713, 1.4836], [3.0937, 0.9773]]
FIXTURE_H2 = [[0.4475, 1.5760], [1.5406, 2.6081]]


def fixture_two_link(
    protocols: Union[str, Sequence[str]] = "AF",
) -> Tuple[NetworkScenario, ChannelRealization]:
    """
    The canonical two-link instance with fixed powers and channel gains (sigma2 = 1, eta = 0.5).

    The geometry is nominal; channel gains are given, not sampled.
    """
    scenario = NetworkScenario(
        powers=FIXTURE_POWERS,
        geometries=build_parallel_geometry(2, 1.0, 0.5),
        protocols=expand_protocols(protocols, 2),
        tau=DEFAULT_TAU,
        eta=0.5,
        sigma2=1.0,
    )
    return scenario, ChannelRealization(g2=FIXTURE_G2, h2=FIXTURE_H2)


FIXTURES = {"two_link": fixture_two_link}


def load_fixture(name: str, protocols: Optional[Union[str, Sequence[str]]] = None):
    try:
        _func = FIXTURES[name]
    except KeyError:
        raise ConfigurationError(f"Unknown fixture: {name}", field="fixture")
    if protocols is None:
        return _func()
    return _func(protocols)
