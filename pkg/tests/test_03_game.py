import math

import numpy as np
import pytest

from swiptgame.baselines import GridSpec
from swiptgame.baselines import grid_best_response
from swiptgame.channel import ScenarioTemplate
from swiptgame.channel import fixture_two_link
from swiptgame.channel import sample_channels
from swiptgame.exception import ConfigurationError
from swiptgame.exception import NumericError
from swiptgame.game import SolverOptions
from swiptgame.game import af_best_response
from swiptgame.game import best_response
from swiptgame.game import best_response_af
from swiptgame.game import best_response_curve
from swiptgame.game import best_response_df
from swiptgame.game import best_response_map
from swiptgame.game import c_d_of
from swiptgame.game import check_standard_axioms
from swiptgame.game import kappa
from swiptgame.game import solve
from swiptgame.metrics import LinkCoefficients
from swiptgame.metrics import coefficients
from swiptgame.metrics import link_rates
from swiptgame.metrics import network_coefficients
from swiptgame.metrics import sinr_df
from swiptgame.metrics import w_of


def _link(x, y, z, n=1):
    return LinkCoefficients(0, float(x), float(y), float(z), np.zeros(n))


class TestBestResponseAF(object):
    def test_closed_form(self):
        assert best_response_af(_link(3, 0, 1), 0.0) == pytest.approx(2 / (2 + math.sqrt(2)))

    def test_centered(self):
        # C = (X + Y)(W + 1) - Z = 0
        assert best_response_af(_link(1, 0, 1), 0.0) == 0.5
        assert best_response_af(_link(1, 1, 4), 1.0) == 0.5

    def test_range(self):
        rng = np.random.default_rng(8)
        x, y, z, w = rng.uniform(0.01, 100.0, size=(4, 1000))
        values = af_best_response(x, y, z, w)
        assert np.all((values > 0) & (values < 1))

    def test_monotone_in_w(self):
        link = _link(12.0, 3.0, 40.0)
        values = [best_response_af(link, w) for w in np.linspace(0.0, 60.0, 301)]
        assert np.all(np.diff(values) >= -1e-15)

    def test_fixture_oracle(self):
        scenario, channels = fixture_two_link("AF")
        link = coefficients(scenario, channels)[0]
        rho = [0.0, 0.7]
        closed = best_response(link, "AF", rho)
        oracle, _ = grid_best_response(scenario, channels, 0, [0.7], GridSpec(1e-4))
        assert abs(closed - oracle) <= 2e-4

    def test_kappa_root(self):
        scenario, channels = fixture_two_link("AF")
        for link in coefficients(scenario, channels):
            w_i = w_of(link, [0.4, 0.6])
            c, d = c_d_of(link, w_i)
            root = best_response_af(link, w_i)
            assert abs(kappa(root, c, d)) <= 1e-9 * d

    def test_non_finite(self):
        with pytest.raises(NumericError):
            best_response_af(_link(float("inf"), 0, 1), 0.0)


class TestBestResponseDF(object):
    def test_closed_form(self):
        link = _link(2, 1, 2)
        value = best_response_df(link, 0.0)
        assert value == pytest.approx((6 - math.sqrt(20)) / 4, rel=1e-12)
        first, second, _ = sinr_df(link, value, 0.0)
        assert first == pytest.approx(second, rel=1e-12)

    def test_no_interference(self):
        # Y = 0: X (W + 1) / (X (W + 1) + Z)
        assert best_response_df(_link(4, 0, 4), 0.0) == pytest.approx(0.5)
        assert best_response_df(_link(3, 0, 2), 1.0) == pytest.approx(6 / 8)

    def test_continuous_at_zero_interference(self):
        assert best_response_df(_link(3, 1e-12, 2), 1.0) == pytest.approx(0.75, abs=1e-9)

    def test_fixture_equality(self):
        scenario, channels = fixture_two_link("DF")
        link = coefficients(scenario, channels)[0]
        rho = [0.0, 0.3]
        value = best_response(link, "DF", rho)
        first, second, _ = sinr_df(link, value, w_of(link, rho))
        assert abs(first - second) / max(first, 1.0) <= 1e-9
        assert 0 < value < 1

    def test_fixture_oracle(self):
        scenario, channels = fixture_two_link("DF")
        closed = best_response(coefficients(scenario, channels)[1], "DF", [0.45, 0.0])
        oracle, _ = grid_best_response(scenario, channels, 1, [0.45])
        assert abs(closed - oracle) <= 2e-4

    def test_unknown_protocol(self):
        with pytest.raises(ConfigurationError):
            best_response(_link(2, 1, 2), "CF", [0.5])


class TestKappa(object):
    def test_endpoints(self):
        link = _link(5.0, 2.0, 9.0)
        c, d = c_d_of(link, 0.5)
        assert kappa(0.0, c, d) == d
        assert kappa(1.0, c, d) == pytest.approx(c - d)
        assert c - d == pytest.approx(-(9.0 + 0.5 + 1.0))
        assert d > 0


class TestSolve(object):
    @pytest.fixture(autouse=True)
    def create_fixture(self):
        self.scenario, self.channels = fixture_two_link("AF")

    def test_converges(self):
        result = solve(self.scenario, self.channels, SolverOptions(seed=1))
        assert result.converged
        assert result.residual <= 1e-9
        assert len(result.profile) == 2
        coeffs = network_coefficients(self.scenario, self.channels)
        fixed = best_response_map(coeffs, self.scenario.df_mask, result.profile.rho)
        assert np.max(np.abs(fixed - result.profile.rho)) <= 1e-9
        assert result.sum_rate == pytest.approx(float(np.sum(result.rates)))

    @pytest.mark.parametrize("protocols", ["AF", "DF", ["DF", "AF"]])
    def test_unique(self, protocols):
        scenario, channels = fixture_two_link(protocols)
        first = solve(scenario, channels, SolverOptions(seed=1))
        second = solve(scenario, channels, SolverOptions(seed=2))
        assert first.converged and second.converged
        assert np.max(np.abs(first.profile.rho - second.profile.rho)) <= 1e-6

    def test_extreme_starts(self):
        ends = [
            solve(self.scenario, self.channels, SolverOptions(initial_profile=start)).profile.rho
            for start in [(0.0, 0.0), (1.0, 1.0), (0.0, 1.0)]
        ]
        for end in ends[1:]:
            assert np.max(np.abs(end - ends[0])) <= 1e-6

    def test_mutual_best_response(self):
        result = solve(self.scenario, self.channels, SolverOptions(seed=5))
        coeffs = network_coefficients(self.scenario, self.channels)
        grid = GridSpec(1e-3).points()
        for i in range(2):
            batch = np.tile(result.profile.rho, (len(grid), 1))
            batch[:, i] = grid
            scan = link_rates(coeffs, self.scenario.df_mask, batch)[:, i]
            assert np.max(scan) <= result.rates[i] + 1e-8

    def test_initial_profile_and_trajectory(self):
        options = SolverOptions(initial_profile=(0.5, 0.5), record_trajectory=True)
        result = solve(self.scenario, self.channels, options)
        assert result.trajectory.shape == (result.iterations + 1, 2)
        assert result.trajectory[0].tolist() == [0.5, 0.5]
        assert result.trajectory[-1].tolist() == result.profile.tolist()
        assert "trajectory" in result.to_dict()

    def test_start_at_fixed_point(self):
        first = solve(self.scenario, self.channels, SolverOptions(seed=1))
        again = solve(
            self.scenario, self.channels, SolverOptions(initial_profile=first.profile.tolist())
        )
        assert again.iterations == 1
        assert again.converged
        assert again.residual <= 1e-9
        assert np.max(np.abs(again.profile.rho - first.profile.rho)) <= 1e-9

    def test_iteration_cap(self, caplog):
        options = SolverOptions(initial_profile=(0.5, 0.5), max_iterations=1)
        result = solve(self.scenario, self.channels, options)
        assert result.iterations == 1
        assert not result.converged
        assert "No convergence" in caplog.text

    def test_seeded(self):
        first = solve(self.scenario, self.channels, SolverOptions(seed=9))
        again = solve(self.scenario, self.channels, SolverOptions(seed=9))
        assert first.to_dict() == again.to_dict()

    def test_many_links(self):
        scenario = ScenarioTemplate(
            n=6, power_db=20.0, d_max=1.5, protocols=["DF", "AF", "DF", "AF", "DF", "AF"]
        ).build()
        channels = sample_channels(scenario, 99)
        result = solve(scenario, channels, SolverOptions(seed=3))
        assert result.converged
        assert np.all((result.profile.rho > 0) & (result.profile.rho < 1))

    @pytest.mark.parametrize(
        "kwargs",
        [{"zeta": 0.0}, {"fixed_point_tolerance": -1.0}, {"max_iterations": 0}, {"abs_floor": 0}],
    )
    def test_bad_options(self, kwargs):
        with pytest.raises(ConfigurationError):
            SolverOptions(**kwargs)

    def test_bad_initial_profile(self):
        with pytest.raises(ConfigurationError):
            solve(self.scenario, self.channels, SolverOptions(initial_profile=(0.5, 1.2)))
        with pytest.raises(ConfigurationError):
            solve(self.scenario, self.channels, SolverOptions(initial_profile=(0.5,)))
        with pytest.raises(ConfigurationError) as err:
            SolverOptions(initial_profile=0.5)
        assert err.value.field == "initial_profile"


class TestAxioms(object):
    def test_fixture(self):
        scenario, channels = fixture_two_link(["DF", "AF"])
        rng = np.random.default_rng(4)
        pairs = [(rng.uniform(size=2), rng.uniform(size=2)) for _ in range(200)]
        alphas = 1.0 + rng.uniform(0.01, 2.0, size=200)
        report = check_standard_axioms(scenario, channels, pairs, alphas)
        assert report.checked == 200
        assert report.passed

    def test_reflexive(self):
        scenario, channels = fixture_two_link("AF")
        rho = np.array([0.3, 0.6])
        report = check_standard_axioms(scenario, channels, [(rho, rho)], [1.5])
        assert report.monotonicity_violations == 0
        assert report.positivity_violations == 0

    def test_bad_alpha(self):
        scenario, channels = fixture_two_link("AF")
        with pytest.raises(ConfigurationError):
            check_standard_axioms(scenario, channels, [([0.1, 0.2], [0.3, 0.4])], [1.0])


class TestCurve(object):
    def test_curve(self):
        scenario, channels = fixture_two_link("AF")
        points = np.linspace(0.0, 1.0, 11)
        xs, responses = best_response_curve(scenario, channels, 0, 1, points)
        assert xs.tolist() == points.tolist()
        assert np.all(np.diff(responses) >= -1e-15)
        link = coefficients(scenario, channels)[0]
        assert responses[3] == pytest.approx(best_response(link, "AF", [0.0, points[3]]))

    def test_same_link(self):
        scenario, channels = fixture_two_link("AF")
        with pytest.raises(ConfigurationError):
            best_response_curve(scenario, channels, 1, 1, [0.5])
