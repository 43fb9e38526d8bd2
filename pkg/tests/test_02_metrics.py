import numpy as np
import pytest

from swiptgame.channel import ChannelRealization
from swiptgame.channel import NetworkScenario
from swiptgame.channel import ScenarioTemplate
from swiptgame.channel import build_parallel_geometry
from swiptgame.channel import fixture_two_link
from swiptgame.channel import sample_channels
from swiptgame.exception import ConfigurationError
from swiptgame.metrics import LinkCoefficients
from swiptgame.metrics import SplitProfile
from swiptgame.metrics import coefficients
from swiptgame.metrics import harvested_power
from swiptgame.metrics import link_rates
from swiptgame.metrics import network_coefficients
from swiptgame.metrics import profile_rates
from swiptgame.metrics import rate
from swiptgame.metrics import rate_from_sinr
from swiptgame.metrics import sinr_af
from swiptgame.metrics import sinr_df
from swiptgame.metrics import sum_rate
from swiptgame.metrics import w_of

P = [5.3080, 7.1917]
G2 = [[2.1713, 1.4836], [3.0937, 0.9773]]
H2 = [[0.4475, 1.5760], [1.5406, 2.6081]]
ETA = 0.5


def _af_sinr_by_hand(x, y, z, rho, w):
    num = rho * (1 - rho) * x * z
    den = rho * (1 - rho) * y * z + (1 - rho) * (x + y) * (w + 1) + rho * z + w + 1
    return num / den


def _single_link(power=2.0, g2=3.0, h2=1.0, protocol="AF"):
    scenario = NetworkScenario(
        powers=[power],
        geometries=build_parallel_geometry(1, 0.0, 0.5),
        protocols=(protocol,),
        eta=ETA,
        sigma2=1.0,
    )
    return scenario, ChannelRealization(g2=[[g2]], h2=[[h2]])


class TestCoefficients(object):
    @pytest.fixture(autouse=True)
    def create_fixture(self):
        self.scenario, self.channels = fixture_two_link()
        self.links = coefficients(self.scenario, self.channels)

    def test_x(self):
        assert self.links[0].x == pytest.approx(5.3080 * 2.1713, rel=1e-12)
        assert self.links[1].x == pytest.approx(7.1917 * 0.9773, rel=1e-12)

    def test_y(self):
        assert self.links[0].y == pytest.approx(P[1] * G2[1][0], rel=1e-12)
        assert self.links[1].y == pytest.approx(P[0] * G2[0][1], rel=1e-12)

    def test_z(self):
        total = P[0] * G2[0][0] + P[1] * G2[1][0]
        assert self.links[0].z == pytest.approx(ETA * total * H2[0][0], rel=1e-12)

    def test_w(self):
        expected = 0.5 * ETA * (P[0] * G2[0][1] + P[1] * G2[1][1]) * H2[1][0]
        assert w_of(self.links[0], [0.9, 0.5]) == pytest.approx(expected, rel=1e-12)
        assert w_of(self.links[0], [0.0, 0.0]) == 0.0
        # own ratio never enters W_i
        assert w_of(self.links[0], [0.1, 0.5]) == w_of(self.links[0], [0.7, 0.5])

    def test_network_form(self):
        coeffs = network_coefficients(self.scenario, self.channels)
        rho = np.array([0.3, 0.8])
        assert coeffs.w(rho) == pytest.approx([w_of(link, rho) for link in self.links])
        assert coeffs.n == 2

    def test_single_link(self):
        scenario, channels = _single_link()
        link = coefficients(scenario, channels)[0]
        assert link.y == 0.0
        assert np.all(link.w_weights == 0.0)
        assert w_of(link, [0.7]) == 0.0

    def test_mismatch(self):
        scenario, _ = _single_link()
        with pytest.raises(ConfigurationError):
            network_coefficients(scenario, self.channels)


class TestSinr(object):
    def test_af_endpoints(self):
        link = LinkCoefficients(0, 4.0, 1.0, 3.0, np.zeros(2))
        assert sinr_af(link, 0.0, 0.5) == 0.0
        assert sinr_af(link, 1.0, 0.5) == 0.0

    def test_af_fixture(self):
        scenario, channels = fixture_two_link()
        links = coefficients(scenario, channels)
        rho = [0.5, 0.5]
        for link in links:
            w_i = w_of(link, rho)
            expected = _af_sinr_by_hand(link.x, link.y, link.z, 0.5, w_i)
            assert sinr_af(link, 0.5, w_i) == pytest.approx(expected, rel=1e-12)

    def test_df_endpoints(self):
        link = LinkCoefficients(0, 4.0, 1.0, 3.0, np.zeros(2))
        first, second, end = sinr_df(link, 0.0, 0.3)
        assert second == 0.0 and end == 0.0
        first, second, end = sinr_df(link, 1.0, 0.3)
        assert first == 0.0 and end == 0.0

    def test_df_crossing(self):
        link = LinkCoefficients(0, 4.0, 0.0, 4.0, np.zeros(1))
        assert sinr_df(link, 0.5, 0.0) == (2.0, 2.0, 2.0)


class TestRates(object):
    @pytest.fixture(autouse=True)
    def create_network(self):
        self.scenario = ScenarioTemplate(
            n=4, power_db=12.0, d_max=2.0, protocols=["AF", "DF", "DF", "AF"]
        ).build()
        self.channels = sample_channels(self.scenario, 17)
        self.coeffs = network_coefficients(self.scenario, self.channels)

    def test_rate_from_sinr(self):
        assert rate_from_sinr(0.0) == 0.0
        assert rate_from_sinr(3.0) == 1.0

    def test_endpoint_nullity(self):
        for i, link in enumerate(coefficients(self.scenario, self.channels)):
            for value in [0.0, 1.0]:
                rho = np.full(4, 0.4)
                rho[i] = value
                assert rate(link, self.scenario.protocols[i], rho) == 0.0

    def test_sum_rate_endpoints(self):
        assert sum_rate(self.scenario, self.channels, np.zeros(4)) == 0.0
        assert sum_rate(self.scenario, self.channels, np.ones(4)) == 0.0

    def test_additivity(self):
        rho = [0.2, 0.4, 0.6, 0.8]
        links = coefficients(self.scenario, self.channels)
        individual = [rate(link, self.scenario.protocols[i], rho) for i, link in enumerate(links)]
        assert sum(individual) == pytest.approx(
            sum_rate(self.scenario, self.channels, rho), abs=1e-12
        )

    def test_batch(self):
        batch = np.random.default_rng(0).uniform(size=(5, 7, 4))
        rates = link_rates(self.coeffs, self.scenario.df_mask, batch)
        assert rates.shape == (5, 7, 4)
        assert rates[3, 2] == pytest.approx(
            profile_rates(self.scenario, self.channels, batch[3, 2]), rel=1e-12
        )

    def test_unknown_protocol(self):
        link = coefficients(self.scenario, self.channels)[0]
        with pytest.raises(ConfigurationError):
            rate(link, "CF", [0.5] * 4)

    def test_profile_length(self):
        with pytest.raises(ConfigurationError):
            profile_rates(self.scenario, self.channels, [0.5, 0.5])


class TestHarvest(object):
    def test_zero(self):
        scenario, channels = _single_link()
        assert harvested_power(scenario, channels, 0, 0.0) == 0.0

    def test_single_link(self):
        scenario, channels = _single_link(power=2.0, g2=3.0)
        assert harvested_power(scenario, channels, 0, 1.0) == pytest.approx(3.0)

    def test_linear(self):
        scenario, channels = fixture_two_link()
        for rho in [0.1, 0.25, 0.5]:
            ratio = harvested_power(scenario, channels, 1, 2 * rho) / harvested_power(
                scenario, channels, 1, rho
            )
            assert ratio == pytest.approx(2.0)


class TestSplitProfile(object):
    def test_range(self):
        with pytest.raises(ConfigurationError):
            SplitProfile([0.5, 1.5])
        with pytest.raises(ConfigurationError):
            SplitProfile([-0.1])
        with pytest.raises(ConfigurationError):
            SplitProfile([float("nan")])

    def test_sequence(self):
        profile = SplitProfile([0.25, 0.75])
        assert len(profile) == 2
        assert profile[1] == 0.75
        assert list(profile) == [0.25, 0.75]
        assert np.asarray(profile).tolist() == [0.25, 0.75]
        assert profile.tolist() == [0.25, 0.75]
