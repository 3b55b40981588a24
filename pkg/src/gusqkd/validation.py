"""Statistical comparison of Monte-Carlo output against the analytic model."""

from __future__ import annotations

import math

import numpy as np

from .channel import ChannelParams, class_statistics
from .decoy import ClassObservation, IntensitySet, ObservedStats
from .keyrate import key_rate_report
from .states import GusParams


def binomial_z(successes: int, trials: int, p: float) -> float:
    """z-score of ``successes`` out of ``trials`` against success probability ``p``.

    Zero when both the expectation and the observation are degenerate.
    """
    if trials == 0:
        return 0.0
    var = trials * p * (1.0 - p)
    diff = successes - trials * p
    if var == 0:
        return 0.0 if diff == 0 else math.inf
    return diff / math.sqrt(var)


def class_z_scores(stats: ObservedStats, intensities: IntensitySet, gus: GusParams, channel: ChannelParams) -> dict:
    """z-scores of observed click fraction and QBER of each class against the analytic values."""
    out = {}
    for (name, obs), mean in zip(stats.items(), intensities.total_means):
        expected = class_statistics(mean, gus, channel)
        out[name] = (
            binomial_z(obs.clicks, obs.pulses, expected.detect_prob),
            binomial_z(obs.errors, obs.clicks, expected.qber),
        )
    return out


def _rate_from_probs(x: np.ndarray, intensities, gus, channel) -> float:
    obs = []
    for c, e in x.reshape(3, 2):
        c = min(max(c, 0.0), 1.0)
        e = min(max(e, 0.0), c)
        obs.append(ClassObservation(c, e / c if c > 0 else 0.0))
    return key_rate_report(ObservedStats(*obs), intensities, gus, channel).r_prime


def practical_rate_sigma(
    intensities: IntensitySet,
    gus: GusParams,
    channel: ChannelParams,
    matched_pulses: tuple[int, int, int],
    rel_step: float = 1e-3,
) -> float:
    """Standard deviation of the practical key rate estimated from finite counts.

    Linearizes the rate in the per-class click and error probabilities
    (central differences) and propagates their multinomial covariance,
    evaluated at the analytic expectations.
    """
    x0 = []
    for mean in intensities.total_means:
        st = class_statistics(mean, gus, channel)
        x0 += [st.detect_prob, st.error_prob]
    x0 = np.array(x0)
    grad = np.zeros_like(x0)
    for i in range(x0.size):
        h = rel_step * x0[i] if x0[i] > 0 else 1e-12
        up, down = x0.copy(), x0.copy()
        up[i] += h
        down[i] -= h
        grad[i] = (_rate_from_probs(up, intensities, gus, channel) - _rate_from_probs(down, intensities, gus, channel)) / (2 * h)
    var = 0.0
    for j, n in enumerate(matched_pulses):
        c, e = x0[2 * j], x0[2 * j + 1]
        cov = np.array([[c * (1 - c), e * (1 - c)], [e * (1 - c), e * (1 - e)]]) / n
        g = grad[2 * j : 2 * j + 2]
        var += float(g @ cov @ g)
    return math.sqrt(var)
