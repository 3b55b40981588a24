import math

import numpy as np
import pytest

from gusqkd.channel import (
    ChannelParams,
    class_statistics,
    detect_prob_k,
    mixture_detect_prob,
    qber_k,
    transmission,
)
from gusqkd.errors import DomainError
from gusqkd.states import GusParams, poisson_pmf

GUS = GusParams(8, math.pi / 2)
# direct evaluation at 40 digits (mpmath) for 2mu = 0.9, L = 100 km
P_SPOT = 0.0002259493825928957800059526167767214971822
Q_SPOT = 0.002212885002216955922221127088012719076017


def paper_channel(length_km):
    return ChannelParams(0.2, length_km, 0.1, 1e-6)


class TestTransmission:
    @pytest.mark.parametrize("length, expected", [(0, 1.0), (100, 0.01), (50, 0.1)])
    def test_values(self, length, expected):
        assert transmission(paper_channel(length)) == pytest.approx(expected, rel=1e-14)

    def test_invalid(self):
        with pytest.raises(DomainError):
            ChannelParams(length_km=-1)
        with pytest.raises(DomainError):
            ChannelParams(detector_efficiency=1.5)


class TestDetectProbK:
    def test_vacuum(self):
        assert detect_prob_k(0, GUS, paper_channel(30)) == 1e-6

    def test_single_photon(self):
        assert detect_prob_k(1, GUS, paper_channel(100)) == pytest.approx(1e-6 + 0.5 * 0.1 * 0.5 * 0.01, rel=1e-14)

    def test_saturation(self):
        assert detect_prob_k(10**7, GUS, paper_channel(0)) == pytest.approx(1e-6 + 0.5, rel=1e-14)

    def test_nondecreasing(self):
        values = detect_prob_k(np.arange(200), GUS, paper_channel(25))
        assert np.all(np.diff(values) >= 0)

    def test_ideal_detector(self):
        gus = GusParams(2, math.pi)
        ideal = ChannelParams(0.2, 0, 1.0, 0.0)
        np.testing.assert_array_equal(detect_prob_k(np.arange(4), gus, ideal), [0, 0.5, 0.5, 0.5])


class TestClassStatistics:
    def test_spot_value(self):
        st = class_statistics(0.9, GUS, paper_channel(100))
        assert st.detect_prob == pytest.approx(P_SPOT, rel=1e-9)
        assert st.qber == pytest.approx(Q_SPOT, rel=1e-9)

    def test_spot_value_against_mixture(self):
        assert mixture_detect_prob(0.9, GUS, paper_channel(100)) == pytest.approx(P_SPOT, rel=1e-9)

    def test_dark_only(self):
        st = class_statistics(0.0, GUS, paper_channel(10))
        assert st.detect_prob == 1e-6
        assert st.qber == 0.5

    def test_no_dark_counts(self):
        st = class_statistics(0.4, GUS, ChannelParams(0.2, 10, 0.1, 0.0))
        assert st.qber == 0.0

    @pytest.mark.parametrize("length", [0, 25, 50, 75, 100, 125])
    @pytest.mark.parametrize("mean", [0.001, 0.05, 0.1, 0.25, 0.5, 0.9])
    @pytest.mark.parametrize("delta_phi", [math.pi / 2, math.pi / 4])
    def test_mixture_identity(self, length, mean, delta_phi):
        gus = GusParams(8, delta_phi)
        channel = paper_channel(length)
        assert mixture_detect_prob(mean, gus, channel) == pytest.approx(
            class_statistics(mean, gus, channel).detect_prob, abs=1e-12
        )

    def test_monotone_in_mean_efficiency_transmission(self):
        base = class_statistics(0.5, GUS, paper_channel(50)).detect_prob
        assert class_statistics(0.6, GUS, paper_channel(50)).detect_prob > base
        assert class_statistics(0.5, GUS, ChannelParams(0.2, 50, 0.2, 1e-6)).detect_prob > base
        assert class_statistics(0.5, GUS, paper_channel(40)).detect_prob > base

    def test_qber_at_most_half(self):
        for length in range(0, 400, 20):
            for mean in (0.0, 0.001, 0.9):
                assert class_statistics(mean, GUS, paper_channel(length)).qber <= 0.5

    def test_misalignment_extension(self):
        channel = ChannelParams(0.2, 50, 0.1, 1e-6, misalignment_error=0.01)
        st = class_statistics(0.5, GUS, channel)
        signal = st.detect_prob - 1e-6
        assert st.qber == pytest.approx((0.5e-6 + 0.01 * signal) / st.detect_prob, rel=1e-14)
        # error yields stay a Poisson mixture of the per-k ones
        k = np.arange(60)
        mix = np.sum(poisson_pmf(k, 0.5) * detect_prob_k(k, GUS, channel) * qber_k(k, GUS, channel))
        assert mix == pytest.approx(st.error_prob, rel=1e-10)
