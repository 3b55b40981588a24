"""Asymptotic secret key rates and the two figures of merit.

Rates are per basis-matched pulse. An optional sifting factor (``2/N``, the
chance that Alice's and Bob's bases coincide) converts the normalized rate
to a per-emitted-pulse figure.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .attack import chi_envelope, holevo_chi, max_qber
from .channel import ChannelParams, class_statistics, detect_prob_k, qber_k, transmission
from .decoy import IntensitySet, ObservedStats, SingleYieldBounds, estimate_single_photon
from .errors import ConfigurationError, DomainError
from .states import GusParams, PhotonDistribution, basis_overlap, binary_entropy, poisson_pmf

REPORT_COLUMNS = (
    "L_km",
    "n_states",
    "delta_phi_rad",
    "two_mu",
    "p_mu",
    "q_mu",
    "p1_lower",
    "q1_upper",
    "chi1",
    "r_prime",
    "secret_per_sifted",
    "normalized_rate",
    "sifting_factor_applied",
    "diagnostic",
)

_MIN_OVERLAP = 1e-12


def eve_information(c_k: float, q: float, use_envelope: bool = False) -> float:
    """Holevo bound used in the rates, with zero credit outside the attack's domain.

    Orthogonal basis states (``c_k`` below 1e-12) and QBERs no symmetric
    attack can produce both count as full information for Eve.
    """
    if c_k < _MIN_OVERLAP or q > max_qber(c_k):
        return 1.0
    return chi_envelope(c_k, q) if use_envelope else holevo_chi(c_k, q)


def rate_full(
    gus: GusParams,
    channel: ChannelParams,
    total_mean: float,
    k_max: int | None = None,
    use_envelope: bool = False,
    leakage_efficiency: float = 1.0,
) -> float:
    """Per-photon-number key rate of the honest channel (diagnostic, not an estimator).

    Sums ``P_k * Pbar_k * (1 - chi_k(Qbar_k))`` over ``k = 1..k_max`` and
    subtracts the error-correction leakage ``f * Pbar * h(Qbar)``.
    """
    if total_mean <= 0:
        raise DomainError(f"mean photon number must be positive, got {total_mean}")
    if k_max is None:
        k_max = PhotonDistribution(total_mean).k_max
    k = np.arange(1, max(k_max, 1) + 1)
    weights = poisson_pmf(k, total_mean) * detect_prob_k(k, gus, channel)
    qbers = qber_k(k, gus, channel)
    overlaps = basis_overlap(gus.delta_phi, k)
    chis = np.array([eve_information(c, q, use_envelope) for c, q in zip(overlaps, qbers)])
    total = class_statistics(total_mean, gus, channel)
    return float(np.sum(weights * (1.0 - chis)) - leakage_efficiency * total.detect_prob * binary_entropy(total.qber))


def rate_practical(
    p_mu: float,
    q_mu: float,
    p1_lower: float,
    q1_upper: float,
    gus: GusParams,
    total_mean: float,
    use_envelope: bool = False,
    leakage_efficiency: float = 1.0,
    feasible: bool = True,
) -> float:
    """Key rate from measurable quantities, keeping only the single-photon term.

    ``2mu e^{-2mu} P1 (1 - chi_1(Q1)) - f * P(mu) h(Q(mu))``; an infeasible
    decoy estimate gives 0. Negative values are returned unchanged.
    """
    if total_mean <= 0:
        raise DomainError(f"mean photon number must be positive, got {total_mean}")
    if not feasible:
        return 0.0
    chi1 = eve_information(gus.basis_overlap_1, q1_upper, use_envelope) if p1_lower > 0 else 1.0
    single = total_mean * math.exp(-total_mean) * p1_lower * (1.0 - chi1)
    return single - leakage_efficiency * p_mu * binary_entropy(q_mu)


class FiguresOfMerit(NamedTuple):
    secret_per_sifted: float
    normalized_rate: float


def figures_of_merit(
    r_prime: float, p_mu: float, eta: float, t: float, sifting_factor: float | None = None
) -> FiguresOfMerit:
    """``R'/P(mu)`` and ``R'/(eta*T)``; a sifting factor scales both ``R'`` and ``P(mu)`` first."""
    if p_mu <= 0 or eta * t <= 0:
        raise DomainError("figures of merit need a positive click probability and efficiency")
    f = 1.0 if sifting_factor is None else sifting_factor
    return FiguresOfMerit((f * r_prime) / (f * p_mu), f * r_prime / (eta * t))


@dataclass(frozen=True)
class KeyRateReport:
    """Everything computed at one operating point, down to the key rates.

    ``r_prime`` and ``p_mu`` are per matched-basis pulse; the sifting factor,
    when applied, only enters ``normalized_rate``.
    """

    total_mean: float
    p_mu: float
    q_mu: float
    p0_lower: float
    p1_lower: float
    q1_upper: float
    chi1: float
    r_prime: float
    secret_per_sifted: float
    normalized_rate: float
    sifting_factor_applied: bool = False
    feasible: bool = True
    length_km: float = float("nan")
    n_states: int = 0
    delta_phi: float = float("nan")
    diagnostics: tuple[str, ...] = field(default=())

    def csv_row(self) -> list[str]:
        values = [
            self.length_km,
            self.n_states,
            self.delta_phi,
            self.total_mean,
            self.p_mu,
            self.q_mu,
            self.p1_lower,
            self.q1_upper,
            self.chi1,
            self.r_prime,
            self.secret_per_sifted,
            self.normalized_rate,
        ]
        out = [str(v) if isinstance(v, int) else repr(float(v)) for v in values]
        out.append("1" if self.sifting_factor_applied else "0")
        out.append("; ".join(self.diagnostics))
        return out


def reports_to_csv(reports) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(REPORT_COLUMNS)
    for report in reports:
        writer.writerow(report.csv_row())
    return buf.getvalue()


def key_rate_report(
    stats: ObservedStats,
    intensities: IntensitySet,
    gus: GusParams,
    channel: ChannelParams,
    use_envelope: bool = False,
    sifting_factor: float | None = None,
    leakage_efficiency: float = 1.0,
) -> KeyRateReport:
    """Run decoy estimation and the practical rate on observed class statistics.

    Intensities the decoy bounds cannot work with (for instance a zero signal
    mean) give an infeasible report rather than an exception.
    """
    try:
        bounds = estimate_single_photon(stats, intensities)
    except ConfigurationError as exc:
        bounds = SingleYieldBounds(0.0, 0.0, 0.5, False, (str(exc),))
    total_mean = intensities.signal_total_mean
    p_mu, q_mu = stats.signal.detect_prob, stats.signal.qber
    diagnostics = list(bounds.diagnostics)
    if bounds.feasible:
        chi1 = eve_information(gus.basis_overlap_1, bounds.q1_upper, use_envelope)
        if bounds.q1_upper > max_qber(gus.basis_overlap_1):
            diagnostics.append("single-photon QBER beyond the symmetric-attack range; chi1 set to 1")
    else:
        chi1 = float("nan")
        diagnostics.append("decoy estimate infeasible; r_prime set to 0")
    r_prime = 0.0 if not bounds.feasible else rate_practical(
        p_mu,
        q_mu,
        bounds.p1_lower,
        bounds.q1_upper,
        gus,
        total_mean,
        use_envelope=use_envelope,
        leakage_efficiency=leakage_efficiency,
        feasible=bounds.feasible,
    )
    eta_t = channel.detector_efficiency * transmission(channel)
    if p_mu > 0 and eta_t > 0:
        merit = figures_of_merit(r_prime, p_mu, channel.detector_efficiency, transmission(channel), sifting_factor)
    else:
        merit = FiguresOfMerit(0.0, 0.0)
        diagnostics.append("no signal clicks; figures of merit set to 0")
    return KeyRateReport(
        total_mean=total_mean,
        p_mu=p_mu,
        q_mu=q_mu,
        p0_lower=bounds.p0_lower,
        p1_lower=bounds.p1_lower,
        q1_upper=bounds.q1_upper,
        chi1=chi1,
        r_prime=r_prime,
        secret_per_sifted=merit.secret_per_sifted,
        normalized_rate=merit.normalized_rate,
        sifting_factor_applied=sifting_factor is not None,
        feasible=bounds.feasible,
        length_km=channel.length_km,
        n_states=gus.n_states,
        delta_phi=gus.delta_phi,
        diagnostics=tuple(diagnostics),
    )


def analytic_report(
    gus: GusParams,
    channel: ChannelParams,
    intensities: IntensitySet,
    use_envelope: bool = False,
    sifting_factor: float | None = None,
    leakage_efficiency: float = 1.0,
) -> KeyRateReport:
    """:func:`key_rate_report` fed with the honest channel's exact class statistics."""
    stats = ObservedStats.from_channel(intensities, gus, channel)
    return key_rate_report(stats, intensities, gus, channel, use_envelope, sifting_factor, leakage_efficiency)
