"""Property battery over random instances: closed forms against grid oracles,
standard-function axioms, uniqueness of the equilibrium and unimodality of the AF rate."""
import logging
from dataclasses import dataclass
from typing import List
from typing import Optional
from typing import Sequence
from typing import Tuple
from typing import Union

import numpy as np

from swiptgame import AF
from swiptgame import DF
from swiptgame import PROTOCOLS
from swiptgame.baselines import GridSpec
from swiptgame.baselines import grid_best_response
from swiptgame.channel import ChannelRealization
from swiptgame.channel import NetworkScenario
from swiptgame.channel import ScenarioTemplate
from swiptgame.channel import derive_seed
from swiptgame.channel import fixture_two_link
from swiptgame.channel import make_rng
from swiptgame.channel import sample_channels
from swiptgame.constant import ORACLE_RESOLUTION
from swiptgame.game import SolverOptions
from swiptgame.game import best_response
from swiptgame.game import c_d_of
from swiptgame.game import check_standard_axioms
from swiptgame.game import kappa
from swiptgame.game import solve
from swiptgame.metrics import af_sinr
from swiptgame.metrics import network_coefficients
from swiptgame.metrics import rate_from_sinr
from swiptgame.metrics import sinr_df
from swiptgame.metrics import w_of

logger = logging.getLogger(__name__)

ORACLE_SLACK = 2 * ORACLE_RESOLUTION
EQUALITY_TOLERANCE = 1e-9
FIXED_POINT_TOLERANCE = 1e-9
UNIQUENESS_TOLERANCE = 1e-6
SHAPE_RESOLUTION = 1e-3
# Differences below this are rounding noise when judging the shape of a rate curve
FLAT = 1e-12

CHECKS = {
    "br_oracle_af": 1,
    "br_oracle_df": 2,
    "br_oracle_hybrid": 3,
    "df_equality": 4,
    "standard_axioms": 5,
    "uniqueness": 6,
    "unimodality": 7,
    "kappa_sign": 8,
}


@dataclass(frozen=True)
class CheckResult:
    name: str
    trials: int
    violations: int

    @property
    def passed(self) -> bool:
        return self.violations == 0


@dataclass(frozen=True)
class VerificationReport:
    seed: int
    instances: int
    checks: Tuple[CheckResult, ...]

    @property
    def violations(self) -> int:
        return sum(c.violations for c in self.checks)

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def table(self) -> str:
        lines = [f"{'check':<20} {'trials':>8} {'violations':>11}  status"]
        for check in self.checks:
            status = "PASS" if check.passed else "FAIL"
            lines.append(f"{check.name:<20} {check.trials:>8} {check.violations:>11}  {status}")
        lines.append(f"{'total':<20} {'':>8} {self.violations:>11}  "
                     f"{'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines)

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "instances": self.instances,
            "passed": self.passed,
            "checks": [
                {"name": c.name, "trials": c.trials, "violations": c.violations}
                for c in self.checks
            ],
        }


def random_instance(
    rng: Union[int, np.random.Generator],
    n: Optional[int] = None,
    protocols: Optional[Union[str, Sequence[str]]] = None,
) -> Tuple[NetworkScenario, ChannelRealization]:
    """
    A random parallel-link network and one channel draw.

    Links: 2..6 unless given; powers 0..30 dB; d_max 0.5..5; relays at 0.2..0.8 of
    each link; protocols drawn per link unless given.
    """
    rng = make_rng(rng)
    if n is None:
        n = int(rng.integers(2, 7))
    if protocols is None:
        protocols = tuple(PROTOCOLS[k] for k in rng.integers(0, 2, size=n))

    template = ScenarioTemplate(
        n=n,
        power_db=tuple(rng.uniform(0.0, 30.0, size=n)),
        d_max=float(rng.uniform(0.5, 5.0)),
        relay_fraction=tuple(rng.uniform(0.2, 0.8, size=n)),
        protocols=protocols,
    )
    scenario = template.build()
    return scenario, sample_channels(scenario, rng)


def _instance_rng(seed: int, check: str, index: int) -> np.random.Generator:
    return make_rng(derive_seed(seed, CHECKS[check], index))


def check_best_responses(
    seed: int, instances: int, protocol: Optional[str], profiles: int = 10
) -> Tuple[CheckResult, CheckResult]:
    """
    Closed-form best responses against a 1e-4 grid argmax.

    protocol None draws mixed-protocol networks (hybrid dispatch). Returns the
    oracle result and the DF equality result for the DF responses visited.
    """
    name = f"br_oracle_{(protocol or 'hybrid').lower()}"
    grid = GridSpec(ORACLE_RESOLUTION)
    trials = violations = eq_trials = eq_violations = 0

    for index in range(instances):
        rng = _instance_rng(seed, name, index)
        scenario, channels = random_instance(rng, protocols=protocol)
        coeffs = network_coefficients(scenario, channels)

        for _ in range(profiles):
            rho = rng.uniform(0.0, 1.0, size=scenario.n)
            i = int(rng.integers(0, scenario.n))
            link = coeffs.link(i)
            closed = best_response(link, scenario.protocols[i], rho)
            oracle, _ = grid_best_response(scenario, channels, i, rho, grid)

            trials += 1
            if abs(closed - oracle) > ORACLE_SLACK:
                violations += 1
                logger.debug(f"{name}: closed form {closed} vs oracle {oracle}")

            if scenario.protocols[i] == DF:
                first, second, _ = sinr_df(link, closed, w_of(link, rho))
                eq_trials += 1
                if abs(first - second) / max(first, 1.0) > EQUALITY_TOLERANCE:
                    eq_violations += 1

    equality = CheckResult("df_equality", eq_trials, eq_violations)
    return CheckResult(name, trials, violations), equality


def check_axioms(seed: int, instances: int, triples: int = 100) -> CheckResult:
    trials = violations = 0
    for index in range(instances):
        rng = _instance_rng(seed, "standard_axioms", index)
        scenario, channels = random_instance(rng)
        pairs = [
            (rng.uniform(0.0, 1.0, size=scenario.n), rng.uniform(0.0, 1.0, size=scenario.n))
            for _ in range(triples)
        ]
        alphas = 1.0 + rng.uniform(0.01, 2.0, size=triples)
        report = check_standard_axioms(scenario, channels, pairs, alphas)
        trials += report.checked
        violations += report.violations
    return CheckResult("standard_axioms", trials, violations)


def multi_start_spread(
    scenario: NetworkScenario, channels: ChannelRealization, rng, starts: int
) -> Tuple[float, bool]:
    """(largest per-coordinate spread of the end points, all runs converged)."""
    ends = []
    all_converged = True
    for _ in range(starts):
        result = solve(
            scenario,
            channels,
            SolverOptions(seed=rng, fixed_point_tolerance=FIXED_POINT_TOLERANCE),
        )
        all_converged = all_converged and result.converged
        ends.append(result.profile.rho)
    ends = np.array(ends)
    return float(np.max(ends.max(axis=0) - ends.min(axis=0))), all_converged


def check_uniqueness(seed: int, instances: int, starts: int = 100) -> CheckResult:
    cases = []
    if instances > 0:
        for protocols in [AF, DF, (DF, AF)]:
            cases.append(fixture_two_link(protocols))

    trials = violations = 0
    for index, case in enumerate(cases + [None] * instances):
        rng = _instance_rng(seed, "uniqueness", index)
        scenario, channels = case if case is not None else random_instance(rng)
        spread, converged = multi_start_spread(scenario, channels, rng, starts)
        trials += 1
        if not converged or spread > UNIQUENESS_TOLERANCE:
            violations += 1
            logger.debug(f"uniqueness: spread {spread:.3e}, converged {converged}")
    return CheckResult("uniqueness", trials, violations)


def is_unimodal(values: np.ndarray, flat: float = FLAT) -> bool:
    diffs = np.diff(values)
    peak = int(np.argmax(values))
    return bool(np.all(diffs[:peak] >= -flat) and np.all(diffs[peak:] <= flat))


def check_shape(seed: int, instances: int, profiles: int = 10) -> Tuple[CheckResult, CheckResult]:
    """Unimodality of the AF rate along rho_i and agreement of the slope sign with kappa."""
    grid = np.arange(0, int(round(1 / SHAPE_RESOLUTION)) + 1) * SHAPE_RESOLUTION
    trials = unimodal_violations = sign_violations = 0

    for index in range(instances):
        rng = _instance_rng(seed, "unimodality", index)
        scenario, channels = random_instance(rng, protocols=AF)
        coeffs = network_coefficients(scenario, channels)

        for _ in range(profiles):
            rho = rng.uniform(0.0, 1.0, size=scenario.n)
            i = int(rng.integers(0, scenario.n))
            link = coeffs.link(i)
            w_i = w_of(link, rho)

            utility = rate_from_sinr(af_sinr(link.x, link.y, link.z, grid, w_i))
            trials += 1
            if not is_unimodal(utility):
                unimodal_violations += 1

            c, d = c_d_of(link, w_i)
            root = best_response(link, AF, rho)
            slope = np.diff(utility)
            left = grid[:-1]
            away = (left + SHAPE_RESOLUTION < root - SHAPE_RESOLUTION) | (
                left > root + SHAPE_RESOLUTION
            )
            signs_match = np.sign(slope[away]) == np.sign(kappa(left[away], c, d))
            if not np.all(signs_match):
                sign_violations += 1

    return (
        CheckResult("unimodality", trials, unimodal_violations),
        CheckResult("kappa_sign", trials, sign_violations),
    )


def run_battery(
    seed: int = 0, instances: int = 100, starts: int = 100, profiles: int = 10
) -> VerificationReport:
    """
    Run every check on `instances` random networks.

    With zero instances every check passes vacuously.
    """
    if instances <= 0:
        logger.warning("No instances requested, the verification passes vacuously")

    checks: List[CheckResult] = []
    equality = CheckResult("df_equality", 0, 0)
    for protocol in [AF, DF, None]:
        oracle, eq = check_best_responses(seed, instances, protocol, profiles)
        checks.append(oracle)
        equality = CheckResult(
            "df_equality", equality.trials + eq.trials, equality.violations + eq.violations
        )
    checks.append(equality)
    checks.append(check_axioms(seed, instances))
    checks.append(check_uniqueness(seed, instances, starts))
    checks.extend(check_shape(seed, instances, profiles))

    report = VerificationReport(seed=seed, instances=instances, checks=tuple(checks))
    logger.info(f"Verification with seed {seed}: {report.violations} violations")
    return report
