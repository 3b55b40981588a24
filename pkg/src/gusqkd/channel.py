"""Honest fiber channel and threshold-detector model.

All probabilities here are conditioned on Alice and Bob having chosen the
same basis; the factor 1/2 for Bob choosing the measurement setting that
matches Alice's bit is included. Dark counts add linearly to the signal
click probability.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .states import GusParams, PhotonDistribution


@dataclass(frozen=True)
class ChannelParams:
    """Fiber and detector parameters.

    Attributes
    ----------
    attenuation_db_per_km : float
        Fiber loss coefficient.
    length_km : float
        Channel length.
    detector_efficiency : float
        Detector quantum efficiency.
    dark_count_prob : float
        Dark count probability per detection window.
    misalignment_error : float
        Fraction of signal clicks landing on the wrong setting. Zero reproduces
        a perfect-visibility interferometer.
    """

    attenuation_db_per_km: float = 0.2
    length_km: float = 0.0
    detector_efficiency: float = 0.1
    dark_count_prob: float = 1e-6
    misalignment_error: float = 0.0

    def __post_init__(self):
        if self.attenuation_db_per_km < 0 or self.length_km < 0:
            raise DomainError("attenuation and length must be non-negative")
        for name in ("detector_efficiency", "dark_count_prob", "misalignment_error"):
            value = getattr(self, name)
            if not 0 <= value <= 1:
                raise DomainError(f"{name} must be a probability, got {value}")
        if self.misalignment_error > 0.5:
            raise DomainError("misalignment error above 1/2 is not a meaningful visibility")

    @property
    def transmission(self) -> float:
        return transmission(self)

    def at_length(self, length_km: float) -> "ChannelParams":
        return ChannelParams(
            self.attenuation_db_per_km,
            length_km,
            self.detector_efficiency,
            self.dark_count_prob,
            self.misalignment_error,
        )


def transmission(params: ChannelParams) -> float:
    """Fiber transmittance ``10^(-a L / 10)``."""
    return 10.0 ** (-params.attenuation_db_per_km * params.length_km / 10.0)


def photon_detection_prob(gus: GusParams, params: ChannelParams) -> float:
    """Probability that one photon yields a conclusive click on the right setting."""
    return params.detector_efficiency * gus.detection_factor * transmission(params)


def detect_prob_k(k, gus: GusParams, params: ChannelParams):
    """Matched-basis click probability of the ``k``-photon component.

    ``p_d + (1 - (1 - eta*sin^2(dphi/2)*T)^k) / 2``
    """
    k_arr = np.asarray(k)
    if np.any(k_arr < 0):
        raise DomainError(f"photon number must be non-negative, got {k}")
    x = photon_detection_prob(gus, params)
    if x < 1:
        signal = -np.expm1(k_arr * np.log1p(-x))
    else:
        signal = (k_arr > 0).astype(float)
    out = params.dark_count_prob + 0.5 * signal
    return float(out) if np.ndim(out) == 0 else out


def error_prob_k(k, gus: GusParams, params: ChannelParams):
    """Matched-basis probability of a click asserting the wrong bit."""
    signal = np.asarray(detect_prob_k(k, gus, params)) - params.dark_count_prob
    out = params.dark_count_prob / 2 + params.misalignment_error * signal
    return float(out) if np.ndim(out) == 0 else out


def qber_k(k, gus: GusParams, params: ChannelParams):
    """QBER of the ``k``-photon component, ``errors / clicks`` (1/2 if the detector never fires)."""
    p = np.asarray(detect_prob_k(k, gus, params))
    e = np.asarray(error_prob_k(k, gus, params))
    out = np.divide(e, p, out=np.full_like(p, 0.5, dtype=float), where=p > 0)
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class ClassStatistics:
    """Analytic click probability and QBER of one intensity class."""

    total_mean: float
    detect_prob: float
    qber: float

    @property
    def error_prob(self) -> float:
        return self.detect_prob * self.qber


def class_statistics(total_mean: float, gus: GusParams, params: ChannelParams) -> ClassStatistics:
    """Closed-form Poisson average of the per-``k`` model for a pulse of mean ``total_mean``."""
    if total_mean < 0:
        raise DomainError(f"mean photon number must be non-negative, got {total_mean}")
    p_d = params.dark_count_prob
    signal = -0.5 * math.expm1(-total_mean * photon_detection_prob(gus, params))
    p = p_d + signal
    if p == 0:
        return ClassStatistics(total_mean, 0.0, 0.5)
    q = (p_d / 2 + params.misalignment_error * signal) / p
    return ClassStatistics(total_mean, p, q)


def mixture_detect_prob(total_mean: float, gus: GusParams, params: ChannelParams) -> float:
    """Explicit sum ``sum_k P_k(total_mean) * detect_prob_k`` over the truncated distribution."""
    dist = PhotonDistribution(total_mean)
    return float(np.sum(dist.pmf() * detect_prob_k(dist.photon_numbers, gus, params)))
