"""Closed-form best responses and the simultaneous best-response iteration.

Each link picks its power splitting ratio to maximize its own rate given the
interference W_i that the other links' ratios induce. The vector map B(rho)
is a standard function, so the Jacobi iteration rho(t+1) = B(rho(t)) reaches
its unique fixed point, the Nash equilibrium, from any start.
"""
import logging
from dataclasses import dataclass
from typing import Iterable
from typing import Optional
from typing import Sequence
from typing import Tuple

import numpy as np

from swiptgame import AF
from swiptgame import DF
from swiptgame.channel import ChannelRealization
from swiptgame.channel import NetworkScenario
from swiptgame.channel import SeedLike
from swiptgame.channel import make_rng
from swiptgame.constant import CENTER_TOLERANCE
from swiptgame.constant import DEFAULT_ABS_FLOOR
from swiptgame.constant import DEFAULT_FIXED_POINT_TOLERANCE
from swiptgame.constant import DEFAULT_MAX_ITERATIONS
from swiptgame.constant import DEFAULT_ZETA
from swiptgame.exception import ConfigurationError
from swiptgame.exception import NumericError
from swiptgame.metrics import LinkCoefficients
from swiptgame.metrics import NetworkCoefficients
from swiptgame.metrics import ProfileLike
from swiptgame.metrics import SplitProfile
from swiptgame.metrics import as_rho
from swiptgame.metrics import link_rates
from swiptgame.metrics import network_coefficients
from swiptgame.metrics import w_of

logger = logging.getLogger(__name__)

# Absolute slack for the monotonicity comparison B(rho) >= B(rho')
AXIOM_SLACK = 1e-14


@dataclass(frozen=True)
class SolverOptions:
    zeta: float = DEFAULT_ZETA
    fixed_point_tolerance: float = DEFAULT_FIXED_POINT_TOLERANCE
    max_iterations: int = DEFAULT_MAX_ITERATIONS
    initial_profile: Optional[Tuple[float, ...]] = None
    seed: SeedLike = None
    abs_floor: float = DEFAULT_ABS_FLOOR
    record_trajectory: bool = False

    def __post_init__(self):
        if not self.zeta > 0:
            raise ConfigurationError(f"zeta must be positive, got {self.zeta}", field="zeta")
        if not self.fixed_point_tolerance > 0:
            raise ConfigurationError(
                f"fixed_point_tolerance must be positive, got {self.fixed_point_tolerance}",
                field="fixed_point_tolerance",
            )
        if int(self.max_iterations) < 1:
            raise ConfigurationError(
                f"max_iterations must be at least 1, got {self.max_iterations}",
                field="max_iterations",
            )
        if not self.abs_floor > 0:
            raise ConfigurationError(
                f"abs_floor must be positive, got {self.abs_floor}", field="abs_floor"
            )
        if self.initial_profile is not None:
            if isinstance(self.initial_profile, (str, bytes)) or not isinstance(
                self.initial_profile, Iterable
            ):
                raise ConfigurationError(
                    f"initial_profile must be a list of ratios, got {self.initial_profile!r}",
                    field="initial_profile",
                )
            try:
                _profile = tuple(float(v) for v in self.initial_profile)
            except (TypeError, ValueError):
                raise ConfigurationError(
                    f"initial_profile must be a list of ratios, got {self.initial_profile!r}",
                    field="initial_profile",
                )
            SplitProfile(_profile)
            object.__setattr__(self, "initial_profile", _profile)

    def check_links(self, n: int) -> None:
        """Raise ConfigurationError unless the initial profile has one ratio per link."""
        if self.initial_profile is not None and len(self.initial_profile) != n:
            raise ConfigurationError(
                f"initial_profile has {len(self.initial_profile)} entries, "
                f"the network has {n} links",
                field="initial_profile",
            )


@dataclass(frozen=True, eq=False)
class EquilibriumResult:
    profile: SplitProfile
    iterations: int
    converged: bool
    residual: float
    rates: np.ndarray
    sum_rate: float
    trajectory: Optional[np.ndarray] = None

    def to_dict(self) -> dict:
        _dict = {
            "profile": self.profile.tolist(),
            "iterations": self.iterations,
            "converged": self.converged,
            "residual": self.residual,
            "rates": self.rates.tolist(),
            "sum_rate": self.sum_rate,
        }
        if self.trajectory is not None:
            _dict["trajectory"] = self.trajectory.tolist()
        return _dict


def _check_finite(*values):
    for value in values:
        if not np.all(np.isfinite(value)):
            raise NumericError(f"Non-finite coefficient in best response: {value}")


def af_best_response(x, y, z, w):
    """Maximizer of the AF rate in rho_i; broadcasts over arrays."""
    w1 = w + 1.0
    c = (x + y) * w1 - z
    sqrt_d = np.sqrt((x + y + 1.0) * w1)
    sqrt_e = np.sqrt(z + w1)
    centered = np.abs(c) <= CENTER_TOLERANCE * np.maximum(1.0, z)
    return np.where(centered, 0.5, sqrt_d / (sqrt_d + sqrt_e))


def df_best_response(x, y, z, w):
    """
    Ratio at which both DF hops have equal SINR; broadcasts over arrays.

    The smaller root of Y Z rho^2 - B rho + X (W + 1) = 0 is evaluated as
    2 X (W + 1) / (B + sqrt(disc)), which reduces to X (W + 1) / (X (W + 1) + Z)
    when Y = 0.
    """
    a = x * (w + 1.0)
    yz = y * z
    b = a + yz + z
    disc = (a - yz + z) ** 2 + 4.0 * yz * z
    root = 2.0 * a / (b + np.sqrt(disc))
    linear = a / (a + z)
    return np.where(y > 0, root, linear)


def best_response_af(coeffs_i: LinkCoefficients, w_i: float) -> float:
    _check_finite(coeffs_i.x, coeffs_i.y, coeffs_i.z, w_i)
    return float(af_best_response(coeffs_i.x, coeffs_i.y, coeffs_i.z, w_i))


def best_response_df(coeffs_i: LinkCoefficients, w_i: float) -> float:
    _check_finite(coeffs_i.x, coeffs_i.y, coeffs_i.z, w_i)
    return float(df_best_response(coeffs_i.x, coeffs_i.y, coeffs_i.z, w_i))


def best_response(coeffs_i: LinkCoefficients, protocol_i: str, rho: ProfileLike) -> float:
    w_i = w_of(coeffs_i, rho)
    if protocol_i == AF:
        return best_response_af(coeffs_i, w_i)
    elif protocol_i == DF:
        return best_response_df(coeffs_i, w_i)
    raise ConfigurationError(f"Unknown relaying protocol: {protocol_i}", field="protocols")


def best_response_map(coeffs: NetworkCoefficients, df_mask: np.ndarray, rho) -> np.ndarray:
    """
    B(rho) for every link at once.

    rho may be any nonnegative vector (or a batch of them); W stays well defined
    outside [0, 1]^n.
    """
    w = coeffs.w(rho)
    _check_finite(coeffs.x, coeffs.y, coeffs.z, w)
    return np.where(
        df_mask,
        df_best_response(coeffs.x, coeffs.y, coeffs.z, w),
        af_best_response(coeffs.x, coeffs.y, coeffs.z, w),
    )


def random_start(n: int, seed: SeedLike = None) -> np.ndarray:
    return make_rng(seed).uniform(0.0, 1.0, size=n)


def solve(
    scenario: NetworkScenario,
    channels: ChannelRealization,
    options: Optional[SolverOptions] = None,
) -> EquilibriumResult:
    """
    Jacobi best-response iteration.

    Stops at the first update where every link's relative change is within zeta
    and the new profile's residual ||B(rho) - rho||_inf is within the fixed-point
    tolerance, or after max_iterations updates.

    :param scenario: The network
    :param channels: One channel realization
    :param options: Solver options; defaults when None
    :return: EquilibriumResult
    """
    options = options or SolverOptions()
    coeffs = network_coefficients(scenario, channels)
    df_mask = scenario.df_mask

    options.check_links(scenario.n)
    if options.initial_profile is not None:
        rho = as_rho(SplitProfile(options.initial_profile), scenario.n)
    else:
        rho = random_start(scenario.n, options.seed)

    trajectory = [rho.copy()] if options.record_trajectory else None

    b = best_response_map(coeffs, df_mask, rho)
    residual = float(np.max(np.abs(b - rho)))
    iterations = 0
    while iterations < options.max_iterations:
        new = b
        b = best_response_map(coeffs, df_mask, new)
        iterations += 1

        step = np.abs(new - rho) / np.maximum(new, options.abs_floor)
        rho = new
        residual = float(np.max(np.abs(b - rho)))
        if trajectory is not None:
            trajectory.append(rho.copy())

        if np.all(step <= options.zeta) and residual <= options.fixed_point_tolerance:
            break

    converged = residual <= options.fixed_point_tolerance
    if converged:
        logger.debug(f"Converged after {iterations} iterations, residual {residual:.3e}")
    else:
        logger.warning(
            f"No convergence within {options.max_iterations} iterations, residual {residual:.3e}"
        )

    rates = link_rates(coeffs, df_mask, rho)
    return EquilibriumResult(
        profile=SplitProfile(rho),
        iterations=iterations,
        converged=bool(converged),
        residual=residual,
        rates=rates,
        sum_rate=float(np.sum(rates)),
        trajectory=np.array(trajectory) if trajectory is not None else None,
    )


@dataclass(frozen=True)
class AxiomReport:
    checked: int
    positivity_violations: int
    monotonicity_violations: int
    scalability_violations: int

    @property
    def violations(self) -> int:
        return (
            self.positivity_violations
            + self.monotonicity_violations
            + self.scalability_violations
        )

    @property
    def passed(self) -> bool:
        return self.violations == 0


def check_standard_axioms(
    scenario: NetworkScenario,
    channels: ChannelRealization,
    trial_profiles: Iterable[Tuple[ProfileLike, ProfileLike]],
    alphas: Sequence[float],
) -> AxiomReport:
    """
    Count violations of positivity, monotonicity and scalability of B.

    Each trial is a pair of profiles; their componentwise max and min form the
    ordered pair rho >= rho' used for monotonicity, and scalability is checked
    at the larger one.

    :param trial_profiles: Iterable of (rho, rho') pairs
    :param alphas: One alpha > 1 per pair
    :return: AxiomReport
    """
    coeffs = network_coefficients(scenario, channels)
    df_mask = scenario.df_mask

    checked = positivity = monotonicity = scalability = 0
    for (first, second), alpha in zip(trial_profiles, alphas):
        if not alpha > 1:
            raise ConfigurationError(f"Scalability needs alpha > 1, got {alpha}")

        _first = as_rho(first, scenario.n)
        _second = as_rho(second, scenario.n)
        upper = np.maximum(_first, _second)
        lower = np.minimum(_first, _second)

        b_upper = best_response_map(coeffs, df_mask, upper)
        b_lower = best_response_map(coeffs, df_mask, lower)
        b_scaled = best_response_map(coeffs, df_mask, alpha * upper)

        checked += 1
        if not (np.all(b_upper > 0) and np.all(b_lower > 0)):
            positivity += 1
        if not np.all(b_upper >= b_lower - AXIOM_SLACK):
            monotonicity += 1
        if not np.all(alpha * b_upper > b_scaled):
            scalability += 1

    report = AxiomReport(
        checked=checked,
        positivity_violations=positivity,
        monotonicity_violations=monotonicity,
        scalability_violations=scalability,
    )
    if not report.passed:
        logger.warning(f"Standard function axioms violated: {report}")
    return report


def kappa(rho, c, d):
    """Numerator of the AF rate derivative; its sign is the sign of du/drho."""
    return c * rho ** 2 - 2.0 * d * rho + d


def c_d_of(coeffs_i: LinkCoefficients, w_i: float) -> Tuple[float, float]:
    w1 = w_i + 1.0
    c = (coeffs_i.x + coeffs_i.y) * w1 - coeffs_i.z
    d = (coeffs_i.x + coeffs_i.y + 1.0) * w1
    return c, d


def best_response_curve(
    scenario: NetworkScenario,
    channels: ChannelRealization,
    i: int,
    j: int,
    points: Sequence[float],
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Link i's best response as a function of link j's ratio, other links at zero.

    :return: (rho_j values, best responses of link i)
    """
    if i == j:
        raise ConfigurationError("A best-response curve needs two distinct links")

    coeffs = network_coefficients(scenario, channels)
    link = coeffs.link(i)
    protocol = scenario.protocols[i]

    _points = np.asarray(points, dtype=float)
    responses = np.empty_like(_points)
    profile = np.zeros(scenario.n)
    for k, value in enumerate(_points):
        profile[j] = value
        responses[k] = best_response(link, protocol, profile)
    return _points, responses
