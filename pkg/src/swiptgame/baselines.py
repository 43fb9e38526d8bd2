"""Comparison schemes: random splitting, grid oracles and the centralized grid search."""
import logging
from dataclasses import dataclass
from typing import List
from typing import Optional
from typing import Tuple

import numpy as np

from swiptgame.channel import ChannelRealization
from swiptgame.channel import NetworkScenario
from swiptgame.channel import SeedLike
from swiptgame.channel import make_rng
from swiptgame.constant import CENTRALIZED_RESOLUTION
from swiptgame.constant import COARSE_RESOLUTION
from swiptgame.constant import MAX_CENTRALIZED_LINKS
from swiptgame.constant import ORACLE_RESOLUTION
from swiptgame.exception import CapabilityError
from swiptgame.exception import ConfigurationError
from swiptgame.metrics import NetworkCoefficients
from swiptgame.metrics import ProfileLike
from swiptgame.metrics import SplitProfile
from swiptgame.metrics import as_rho
from swiptgame.metrics import link_rates
from swiptgame.metrics import network_coefficients

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GridSpec:
    resolution: float = ORACLE_RESOLUTION
    include_endpoints: bool = True

    def __post_init__(self):
        if not 0 < self.resolution <= 0.5:
            raise ConfigurationError(
                f"Grid resolution must lie in (0, 0.5], got {self.resolution}",
                field="resolution",
            )

    def points(self, low: float = 0.0, high: float = 1.0) -> np.ndarray:
        """Grid points on [low, high] aligned to multiples of the resolution."""
        steps = int(round(1.0 / self.resolution))
        if abs(steps * self.resolution - 1.0) <= 1e-9:
            first = int(np.ceil(low * steps - 1e-9))
            last = int(np.floor(high * steps + 1e-9))
            pts = np.arange(first, last + 1) / steps
        else:
            pts = np.arange(low, high + 1e-12, self.resolution)
            if high - pts[-1] > 1e-12:
                pts = np.append(pts, high)

        if not self.include_endpoints:
            pts = pts[(pts > 0.0) & (pts < 1.0)]
        return pts


def random_profile(n: int, seed: SeedLike = None) -> SplitProfile:
    if n < 1:
        raise ConfigurationError(f"Link count must be at least 1, got {n}", field="n")
    return SplitProfile(make_rng(seed).uniform(0.0, 1.0, size=n))


def _full_profile(n: int, i: int, rho_others: ProfileLike) -> np.ndarray:
    _others = np.asarray(as_rho(rho_others), dtype=float).reshape(-1)
    if len(_others) == n - 1:
        return np.insert(_others, i, 0.0)
    elif len(_others) == n:
        return _others.copy()
    raise ConfigurationError(
        f"Expected {n - 1} or {n} ratios for the other links, got {len(_others)}"
    )


def grid_best_response(
    scenario: NetworkScenario,
    channels: ChannelRealization,
    i: int,
    rho_others: ProfileLike,
    grid: Optional[GridSpec] = None,
) -> Tuple[float, float]:
    """
    Exhaustive maximization of link i's rate over its own ratio.

    :param rho_others: Ratios of the other links (n - 1 values), or a full profile
        whose i-th entry is ignored
    :return: (argmax ratio, maximal rate); ties go to the smaller ratio
    """
    grid = grid or GridSpec()
    coeffs = network_coefficients(scenario, channels)
    profile = _full_profile(scenario.n, i, rho_others)

    pts = grid.points()
    batch = np.tile(profile, (len(pts), 1))
    batch[:, i] = pts
    rates = link_rates(coeffs, scenario.df_mask, batch)[:, i]
    k = int(np.argmax(rates))
    return float(pts[k]), float(rates[k])


def _exhaustive(
    coeffs: NetworkCoefficients, df_mask: np.ndarray, axes: List[np.ndarray]
) -> Tuple[np.ndarray, float]:
    """Maximize the sum rate over the product of axes, smallest lexicographic profile on ties."""
    if len(axes) == 1:
        batch = axes[0][:, None]
        totals = link_rates(coeffs, df_mask, batch).sum(axis=-1)
        k = int(np.argmax(totals))
        return batch[k].copy(), float(totals[k])

    rest = np.stack(np.meshgrid(*axes[1:], indexing="ij"), axis=-1).reshape(-1, len(axes) - 1)
    best_value = -np.inf
    best = None
    for value in axes[0]:
        batch = np.column_stack([np.full(len(rest), value), rest])
        totals = link_rates(coeffs, df_mask, batch).sum(axis=-1)
        k = int(np.argmax(totals))
        if totals[k] > best_value:
            best_value = float(totals[k])
            best = batch[k].copy()
    return best, best_value


def centralized_optimum(
    scenario: NetworkScenario,
    channels: ChannelRealization,
    grid: Optional[GridSpec] = None,
    refine: Optional[GridSpec] = None,
) -> Tuple[SplitProfile, float]:
    """
    Sum-rate maximizing profile by exhaustive grid search.

    Defaults: 1e-4 for one link, 1e-3 for two, a 1e-2 pass refined at 1e-4 for three.
    With `refine`, a second pass searches +/- one coarse step around the coarse optimum.

    :return: (profile, sum rate)
    """
    n = scenario.n
    if n > MAX_CENTRALIZED_LINKS:
        raise CapabilityError(
            f"Centralized grid search supports at most {MAX_CENTRALIZED_LINKS} links, got {n}; "
            "use the game solution instead"
        )

    if grid is None:
        if n == 1:
            grid = GridSpec(ORACLE_RESOLUTION)
        elif n == 2:
            grid = GridSpec(CENTRALIZED_RESOLUTION)
        else:
            grid = GridSpec(COARSE_RESOLUTION)
            refine = refine or GridSpec(ORACLE_RESOLUTION)

    coeffs = network_coefficients(scenario, channels)
    df_mask = scenario.df_mask

    pts = grid.points()
    best, best_value = _exhaustive(coeffs, df_mask, [pts] * n)

    if refine is not None:
        axes = [
            refine.points(max(0.0, v - grid.resolution), min(1.0, v + grid.resolution))
            for v in best
        ]
        fine, fine_value = _exhaustive(coeffs, df_mask, axes)
        if fine_value > best_value:
            best, best_value = fine, fine_value

    logger.debug(f"Centralized optimum {best.tolist()} with sum rate {best_value:.6f}")
    return SplitProfile(best), best_value
