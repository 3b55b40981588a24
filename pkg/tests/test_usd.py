import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gusqkd.errors import DomainError
from gusqkd.states import fock_state, poisson_pmf
from gusqkd.usd import (
    gram_eigenvalues,
    pairwise_usd,
    usd_exact,
    usd_pure_coherent,
    usd_result,
    usd_tail_bound,
)

# mpmath nsum of the Poisson tail, 40 digits
TAIL_N8_MEAN_01 = 1.818005606873650368182011977840496273273e-11
TAIL_N8_MEAN_2 = 0.004533805526248866290803714757948054934977

MEANS = np.linspace(0.0, 5.0, 101)


def dense_block_gram(n_states, k):
    vectors = [fock_state(k, 2 * math.pi * j / n_states).amplitudes for j in range(n_states)]
    return np.array([[np.vdot(a, b) for b in vectors] for a in vectors])


def dense_coherent_gram(n_states, total_mean):
    alpha = math.sqrt(total_mean / 2)
    amps = [alpha * np.exp(2j * math.pi * j / n_states) for j in range(n_states)]
    # <a|b> for coherent states; the first slot is common to all states
    return np.array([[np.exp(-abs(a) ** 2 / 2 - abs(b) ** 2 / 2 + np.conj(a) * b) for b in amps] for a in amps])


def brute_force_usd(n_states, total_mean, k_stop=80):
    total = 0.0
    for k in range(n_states - 1, k_stop):
        total += poisson_pmf(k, total_mean) * max(0.0, np.linalg.eigvalsh(dense_block_gram(n_states, k)).min())
    return total


class TestTailBound:
    def test_vacuum(self):
        assert usd_tail_bound(8, 0.0) == 0.0

    def test_weak_pulse(self):
        assert usd_tail_bound(8, 0.1) == pytest.approx(TAIL_N8_MEAN_01, rel=1e-12)

    def test_bright_pulse(self):
        assert usd_tail_bound(8, 2.0) == pytest.approx(TAIL_N8_MEAN_2, rel=1e-12)

    def test_two_states(self):
        assert usd_tail_bound(2, 1.0) == pytest.approx(1 - math.exp(-1), abs=1e-15)

    @pytest.mark.parametrize("n, mean", [(1, 0.5), (8, -1.0)])
    def test_domain(self, n, mean):
        with pytest.raises(DomainError):
            usd_tail_bound(n, mean)


class TestGramEigenvalues:
    @pytest.mark.parametrize("n_states", [2, 4, 8, 16])
    @pytest.mark.parametrize("k", [0, 1, 3, 7, 8, 15, 16, 17, 30, 55])
    def test_series_and_fft_match_dense(self, n_states, k):
        dense = np.sort(np.linalg.eigvalsh(dense_block_gram(n_states, k)))
        np.testing.assert_allclose(np.sort(gram_eigenvalues(n_states, k, "series")), dense, atol=1e-9)
        np.testing.assert_allclose(np.sort(gram_eigenvalues(n_states, k, "fft")), dense, atol=1e-9)

    def test_eigenvalues_sum_to_trace(self):
        assert gram_eigenvalues(8, 12).sum() == pytest.approx(8.0)

    def test_dependent_block_has_zero_eigenvalue(self):
        assert gram_eigenvalues(8, 6).min() == 0.0


class TestUsdExact:
    @pytest.mark.parametrize("n", [2, 4, 8, 16])
    def test_identical_states(self, n):
        assert usd_exact(n, 0.0) == 0.0

    @pytest.mark.parametrize("mean", [0.01, 0.1, 0.5, 1.0, 3.0, 5.0])
    def test_two_states_closed_form(self, mean):
        # randomized B92 pair: 1 - |<Psi_0|Psi_1>| with |<Psi_0|Psi_1>| = exp(-2 mu)
        assert usd_exact(2, mean) == pytest.approx(-math.expm1(-mean), abs=1e-12)

    def test_eight_states_bright(self):
        value = usd_exact(8, 2.0)
        assert 0 < value < usd_tail_bound(8, 2.0)
        assert value == pytest.approx(brute_force_usd(8, 2.0), abs=1e-12)

    @pytest.mark.parametrize("n", [4, 8, 16])
    @pytest.mark.parametrize("mean", [0.3, 1.7, 4.2])
    def test_against_dense_oracle(self, n, mean):
        assert usd_exact(n, mean) == pytest.approx(brute_force_usd(n, mean), abs=1e-12)

    @pytest.mark.parametrize("n", [2, 4, 8, 16])
    def test_below_tail_bound(self, n):
        for mean in MEANS:
            assert usd_exact(n, mean) <= usd_tail_bound(n, mean)

    @pytest.mark.parametrize("n", [2, 4, 8, 16])
    def test_nondecreasing(self, n):
        values = [usd_exact(n, m) for m in MEANS]
        assert np.all(np.diff(values) >= 0)

    def test_practical_alphabet_is_usd_safe(self):
        # eight states: safe down to 1e-6 system efficiency at 2mu = 0.5, 1e-5 at 0.9
        assert usd_result(8, 0.5).is_safe(1e-6)
        assert usd_result(8, 0.9).is_safe(1e-5)
        assert not usd_result(4, 0.1).is_safe(1e-5)
        assert usd_result(16, 0.9).is_safe(1e-12)


class TestPureCoherent:
    @pytest.mark.parametrize("n", [2, 4, 8, 16])
    @pytest.mark.parametrize("mean", [0.0, 0.2, 1.0, 3.0, 5.0])
    def test_dft_matches_dense(self, n, mean):
        dense = max(0.0, np.linalg.eigvalsh(dense_coherent_gram(n, mean)).min())
        assert usd_pure_coherent(n, mean) == pytest.approx(dense, abs=1e-9)

    def test_two_states_closed_form(self):
        assert usd_pure_coherent(2, 1.3) == pytest.approx(1 - math.exp(-1.3), abs=1e-12)

    @pytest.mark.parametrize("n", [4, 8, 16])
    def test_never_below_randomized(self, n):
        # phase randomization is a channel and cannot help discrimination
        for mean in MEANS[::5]:
            assert usd_pure_coherent(n, mean) >= usd_exact(n, mean) - 1e-12


class TestPairwise:
    def test_quarter_turn(self):
        assert pairwise_usd(math.pi / 2, 1) == pytest.approx(1 - math.sqrt(2) / 2, abs=1e-15)

    def test_vacuum(self):
        assert pairwise_usd(1.1, 0) == 0.0

    def test_eighth_turn_two_photons(self):
        brute = 1 - abs(fock_state(2, 0.0).inner(fock_state(2, math.pi / 4)))
        assert pairwise_usd(math.pi / 4, 2) == pytest.approx(brute, abs=1e-14)
        assert pairwise_usd(math.pi / 4, 2) == pytest.approx(0.1464466094067262, abs=1e-14)

    @given(st.floats(0.01, math.pi), st.integers(0, 100))
    def test_monotone(self, delta_phi, k):
        assert pairwise_usd(delta_phi, k + 1) >= pairwise_usd(delta_phi, k)
        assert pairwise_usd(min(math.pi, delta_phi * 1.1), k) >= pairwise_usd(delta_phi, k) - 1e-15
