"""SINR, rate and harvested-power evaluation for a strategy profile.

Every quantity is a pure function of the scenario, the channel realization and
the profile. The array helpers broadcast over leading axes so that a batch of
profiles of shape (..., n) can be evaluated in one call.
"""
import logging
from dataclasses import dataclass
from typing import List
from typing import Sequence
from typing import Union

import numpy as np

from swiptgame import AF
from swiptgame import DF
from swiptgame.channel import ChannelRealization
from swiptgame.channel import NetworkScenario
from swiptgame.exception import ConfigurationError

logger = logging.getLogger(__name__)

LN2 = np.log(2.0)


@dataclass(frozen=True, eq=False)
class LinkCoefficients:
    index: int
    x: float
    y: float
    z: float
    w_weights: np.ndarray


@dataclass(frozen=True, eq=False)
class NetworkCoefficients:
    """
    All links' coefficients in array form.

    weights[j, i] is the factor of rho_j in W_i, so W = rho @ weights.
    """

    x: np.ndarray
    y: np.ndarray
    z: np.ndarray
    weights: np.ndarray

    @property
    def n(self) -> int:
        return len(self.x)

    def w(self, rho) -> np.ndarray:
        return np.asarray(rho, dtype=float) @ self.weights

    def link(self, i: int) -> LinkCoefficients:
        return LinkCoefficients(
            index=i,
            x=float(self.x[i]),
            y=float(self.y[i]),
            z=float(self.z[i]),
            w_weights=self.weights[:, i].copy(),
        )


@dataclass(frozen=True, eq=False)
class SplitProfile:
    rho: np.ndarray

    def __post_init__(self):
        rho = np.array(self.rho, dtype=float).reshape(-1)
        if not np.all(np.isfinite(rho)) or np.any(rho < 0) or np.any(rho > 1):
            raise ConfigurationError(
                f"Power splitting ratios must lie in [0, 1], got {rho.tolist()}",
                field="initial_profile",
            )
        rho.setflags(write=False)
        object.__setattr__(self, "rho", rho)

    def __len__(self):
        return len(self.rho)

    def __getitem__(self, item):
        return self.rho[item]

    def __iter__(self):
        return iter(self.rho)

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return np.array(self.rho)
        return np.array(self.rho, dtype=dtype)

    def tolist(self) -> List[float]:
        return self.rho.tolist()


ProfileLike = Union[SplitProfile, Sequence[float], np.ndarray]


def as_rho(profile: ProfileLike, n: int = 0) -> np.ndarray:
    if isinstance(profile, SplitProfile):
        rho = np.array(profile.rho)
    else:
        rho = np.asarray(profile, dtype=float)
    if n and rho.shape[-1] != n:
        raise ConfigurationError(f"Profile has {rho.shape[-1]} entries, expected {n}")
    return rho


def network_coefficients(
    scenario: NetworkScenario, channels: ChannelRealization
) -> NetworkCoefficients:
    if channels.n != scenario.n:
        raise ConfigurationError(
            f"Channel realization has {channels.n} links, scenario has {scenario.n}"
        )

    # received[n, i] = P_n |g_ni|^2
    received = scenario.powers[:, None] * channels.g2
    total = received.sum(axis=0)
    own = np.diag(received).copy()

    interference = received.copy()
    np.fill_diagonal(interference, 0.0)

    weights = scenario.eta * total[:, None] * channels.h2 / scenario.sigma2
    np.fill_diagonal(weights, 0.0)

    return NetworkCoefficients(
        x=own / scenario.sigma2,
        y=interference.sum(axis=0) / scenario.sigma2,
        z=scenario.eta * total * np.diag(channels.h2) / scenario.sigma2,
        weights=weights,
    )


def coefficients(scenario: NetworkScenario, channels: ChannelRealization) -> List[LinkCoefficients]:
    _coeffs = network_coefficients(scenario, channels)
    return [_coeffs.link(i) for i in range(_coeffs.n)]


def w_of(coeffs_i: LinkCoefficients, rho: ProfileLike) -> float:
    _rho = as_rho(rho, len(coeffs_i.w_weights))
    return float(_rho @ coeffs_i.w_weights)


def af_sinr(x, y, z, rho, w):
    one_minus = 1.0 - rho
    w1 = w + 1.0
    numerator = rho * one_minus * x * z
    denominator = rho * one_minus * y * z + one_minus * (x + y) * w1 + rho * z + w1
    return numerator / denominator


def df_hop_sinrs(x, y, z, rho, w):
    one_minus = 1.0 - rho
    first = one_minus * x / (one_minus * y + 1.0)
    second = rho * z / (w + 1.0)
    return first, second


def sinr_af(coeffs_i: LinkCoefficients, rho_i: float, w_i: float) -> float:
    return af_sinr(coeffs_i.x, coeffs_i.y, coeffs_i.z, rho_i, w_i)


def sinr_df(coeffs_i: LinkCoefficients, rho_i: float, w_i: float):
    """(first-hop SINR, second-hop SINR, end-to-end SINR) of a DF link."""
    first, second = df_hop_sinrs(coeffs_i.x, coeffs_i.y, coeffs_i.z, rho_i, w_i)
    return first, second, min(first, second)


def rate_from_sinr(gamma):
    return 0.5 * np.log1p(gamma) / LN2


def rate(coeffs_i: LinkCoefficients, protocol: str, rho: ProfileLike) -> float:
    _rho = as_rho(rho, len(coeffs_i.w_weights))
    w_i = float(_rho @ coeffs_i.w_weights)
    rho_i = float(_rho[coeffs_i.index])

    if protocol == AF:
        gamma = sinr_af(coeffs_i, rho_i, w_i)
    elif protocol == DF:
        gamma = sinr_df(coeffs_i, rho_i, w_i)[2]
    else:
        raise ConfigurationError(f"Unknown relaying protocol: {protocol}", field="protocols")
    return float(rate_from_sinr(gamma))


def link_rates(coeffs: NetworkCoefficients, df_mask: np.ndarray, rho) -> np.ndarray:
    """
    Per-link rates for one profile (n,) or a batch of profiles (..., n).

    :param coeffs: Network coefficients
    :param df_mask: True for DF links
    :param rho: Profile(s)
    :return: rates with the same shape as rho
    """
    _rho = np.asarray(rho, dtype=float)
    w = _rho @ coeffs.weights
    gamma_af = af_sinr(coeffs.x, coeffs.y, coeffs.z, _rho, w)
    first, second = df_hop_sinrs(coeffs.x, coeffs.y, coeffs.z, _rho, w)
    gamma = np.where(df_mask, np.minimum(first, second), gamma_af)
    return rate_from_sinr(gamma)


def profile_rates(
    scenario: NetworkScenario, channels: ChannelRealization, rho: ProfileLike
) -> np.ndarray:
    _rho = as_rho(rho, scenario.n)
    return link_rates(network_coefficients(scenario, channels), scenario.df_mask, _rho)


def sum_rate(scenario: NetworkScenario, channels: ChannelRealization, rho: ProfileLike) -> float:
    return float(np.sum(profile_rates(scenario, channels, rho)))


def harvested_power(
    scenario: NetworkScenario, channels: ChannelRealization, i: int, rho_i: float
) -> float:
    """Energy harvested at relay i per unit time: eta * rho_i * sum_n P_n |g_ni|^2."""
    total = float(np.dot(scenario.powers, channels.g2[:, i]))
    return scenario.eta * rho_i * total
