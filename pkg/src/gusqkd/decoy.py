"""Three-intensity decoy-state estimation of the single-photon yield and error rate.

Intensities are stored as total mean photon numbers per pulse (``2*mu``,
``2*nu1``, ``2*nu2``). The estimators are written in per-slot intensities,
so the conversion happens once, in :meth:`IntensitySet.per_slot`.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Iterable

from .channel import ChannelParams, class_statistics
from .errors import ConfigurationError, DomainError, EstimationInfeasibleError
from .states import GusParams

CLASSES = ("signal", "decoy1", "decoy2")
STATS_COLUMNS = ("class", "pulses", "clicks", "errors", "p_hat", "q_hat")


@dataclass(frozen=True)
class IntensitySet:
    """Total mean photon numbers of the three pulse classes and their selection probabilities."""

    signal_total_mean: float = 0.5
    decoy1_total_mean: float = 0.05
    decoy2_total_mean: float = 1e-3
    class_probabilities: tuple[float, float, float] = (0.8, 0.1, 0.1)

    def __post_init__(self):
        object.__setattr__(self, "class_probabilities", tuple(float(p) for p in self.class_probabilities))
        # ordering against the signal is left to check_decoy_configuration so a
        # session can still be simulated (and reported as unusable) without it
        if not (0 <= self.decoy2_total_mean < self.decoy1_total_mean and self.signal_total_mean >= 0):
            raise ConfigurationError(
                "intensities must satisfy 0 <= decoy2 < decoy1 and signal >= 0, got "
                f"{self.decoy2_total_mean}, {self.decoy1_total_mean}, {self.signal_total_mean}"
            )
        probs = self.class_probabilities
        if len(probs) != 3 or any(p < 0 for p in probs) or abs(sum(probs) - 1.0) > 1e-12:
            raise ConfigurationError(f"class probabilities must be three non-negative numbers summing to 1, got {probs}")

    @property
    def total_means(self) -> tuple[float, float, float]:
        return (self.signal_total_mean, self.decoy1_total_mean, self.decoy2_total_mean)

    def per_slot(self) -> tuple[float, float, float]:
        """``(mu, nu1, nu2)``: half of each total mean."""
        return tuple(m / 2.0 for m in self.total_means)

    def with_signal(self, signal_total_mean: float) -> "IntensitySet":
        return IntensitySet(signal_total_mean, self.decoy1_total_mean, self.decoy2_total_mean, self.class_probabilities)


def check_decoy_configuration(intensities: IntensitySet) -> None:
    """Raise :class:`ConfigurationError` unless ``nu1 + nu2 < mu`` (positive p1 denominator)."""
    mu, nu1, nu2 = intensities.per_slot()
    if nu1 == nu2:
        raise ConfigurationError("decoy intensities coincide")
    if mu <= 0 or nu1 - nu2 - (nu1**2 - nu2**2) / mu <= 0:
        raise ConfigurationError(
            f"single-photon bound needs nu1 + nu2 < mu (total means {intensities.total_means})"
        )


@dataclass(frozen=True)
class ClassObservation:
    """Observed (or modelled) matched-basis statistics of one intensity class.

    ``pulses`` counts basis-matched pulses, ``clicks`` the sifted clicks and
    ``errors`` the sifted bits that disagree with Alice. Analytic inputs carry
    only the two probabilities.
    """

    detect_prob: float
    qber: float
    pulses: int | None = None
    clicks: int | None = None
    errors: int | None = None

    def __post_init__(self):
        if not 0 <= self.detect_prob <= 1 or not 0 <= self.qber <= 1:
            raise DomainError(f"observed probabilities out of range: {self.detect_prob}, {self.qber}")

    @classmethod
    def from_counts(cls, pulses: int, clicks: int, errors: int) -> "ClassObservation":
        if not 0 <= errors <= clicks <= pulses:
            raise DomainError(f"need errors <= clicks <= pulses, got {errors}, {clicks}, {pulses}")
        p = clicks / pulses if pulses else 0.0
        q = errors / clicks if clicks else 0.0
        return cls(p, q, int(pulses), int(clicks), int(errors))

    @property
    def usable(self) -> bool:
        return self.pulses is None or self.pulses > 0

    @property
    def error_prob(self) -> float:
        if self.pulses:
            return self.errors / self.pulses
        return self.detect_prob * self.qber


@dataclass(frozen=True)
class ObservedStats:
    signal: ClassObservation
    decoy1: ClassObservation
    decoy2: ClassObservation

    def __iter__(self):
        return iter((self.signal, self.decoy1, self.decoy2))

    def items(self) -> Iterable[tuple[str, ClassObservation]]:
        return zip(CLASSES, self)

    @property
    def usable(self) -> bool:
        return all(obs.usable for obs in self)

    @classmethod
    def from_channel(cls, intensities: IntensitySet, gus: GusParams, channel: ChannelParams) -> "ObservedStats":
        """Exact expectations of the honest model (no sampling noise)."""
        obs = []
        for mean in intensities.total_means:
            st = class_statistics(mean, gus, channel)
            obs.append(ClassObservation(st.detect_prob, st.qber))
        return cls(*obs)

    @classmethod
    def from_counts(cls, counts) -> "ObservedStats":
        """``counts`` maps class name to ``(pulses, clicks, errors)``."""
        return cls(*(ClassObservation.from_counts(*counts[name]) for name in CLASSES))

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(STATS_COLUMNS)
        for name, obs in self.items():
            writer.writerow(
                [
                    name,
                    "" if obs.pulses is None else obs.pulses,
                    "" if obs.clicks is None else obs.clicks,
                    "" if obs.errors is None else obs.errors,
                    repr(obs.detect_prob),
                    repr(obs.qber),
                ]
            )
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "ObservedStats":
        """Parse the CSV written by :meth:`to_csv`; counts win over probabilities when present."""
        rows = {}
        for row in csv.DictReader(io.StringIO(text)):
            name = row["class"].strip()
            if name not in CLASSES:
                raise DomainError(f"unknown class {name!r}")
            if row.get("pulses", "").strip():
                rows[name] = ClassObservation.from_counts(int(row["pulses"]), int(row["clicks"]), int(row["errors"]))
            else:
                rows[name] = ClassObservation(float(row["p_hat"]), float(row["q_hat"]))
        missing = set(CLASSES) - rows.keys()
        if missing:
            raise DomainError(f"missing classes: {sorted(missing)}")
        return cls(*(rows[name] for name in CLASSES))


@dataclass(frozen=True)
class SingleYieldBounds:
    p0_lower: float
    p1_lower: float
    q1_upper: float
    feasible: bool
    diagnostics: tuple[str, ...] = field(default=())


def p0_lower_bound(stats: ObservedStats, intensities: IntensitySet) -> float:
    """Lower bound on the vacuum click probability."""
    _, nu1, nu2 = intensities.per_slot()
    if nu1 == nu2:
        raise ConfigurationError("decoy intensities coincide")
    value = (
        nu1 * math.exp(2 * nu2) * stats.decoy2.detect_prob - nu2 * math.exp(2 * nu1) * stats.decoy1.detect_prob
    ) / (nu1 - nu2)
    return max(value, 0.0)


def _p1_raw(stats: ObservedStats, intensities: IntensitySet, p0: float) -> float:
    mu, nu1, nu2 = intensities.per_slot()
    denominator = nu1 - nu2 - (nu1**2 - nu2**2) / mu
    bracket = (
        stats.decoy1.detect_prob * math.exp(2 * nu1)
        - stats.decoy2.detect_prob * math.exp(2 * nu2)
        - (nu1**2 - nu2**2) / mu**2 * (stats.signal.detect_prob * math.exp(2 * mu) - p0)
    )
    return 0.5 / denominator * bracket


def p1_lower_bound(stats: ObservedStats, intensities: IntensitySet) -> float:
    """Lower bound on the single-photon click probability, clamped at 0."""
    check_decoy_configuration(intensities)
    return max(_p1_raw(stats, intensities, p0_lower_bound(stats, intensities)), 0.0)


def _q1_raw(stats: ObservedStats, intensities: IntensitySet, p1: float) -> float:
    if p1 <= 0:
        raise EstimationInfeasibleError("single-photon click bound is zero; its QBER is unbounded")
    _, nu1, nu2 = intensities.per_slot()
    numerator = math.exp(2 * nu1) * stats.decoy1.error_prob - math.exp(2 * nu2) * stats.decoy2.error_prob
    return numerator / (2 * (nu1 - nu2) * p1)


def q1_upper_bound(stats: ObservedStats, intensities: IntensitySet, p1: float) -> float:
    """Upper bound on the single-photon QBER given a single-photon click bound ``p1``, clamped to [0, 1/2]."""
    return min(max(_q1_raw(stats, intensities, p1), 0.0), 0.5)


def estimate_single_photon(stats: ObservedStats, intensities: IntensitySet) -> SingleYieldBounds:
    """All three bounds with feasibility and clamp diagnostics; never raises on bad data."""
    check_decoy_configuration(intensities)
    if not stats.usable:
        empty = [name for name, obs in stats.items() if not obs.usable]
        return SingleYieldBounds(0.0, 0.0, 0.5, False, (f"no pulses in class {', '.join(empty)}",))
    diagnostics = []
    p0 = p0_lower_bound(stats, intensities)
    p1 = _p1_raw(stats, intensities, p0)
    if p1 <= 0:
        diagnostics.append(f"single-photon click bound {p1:.3e} is not positive")
        return SingleYieldBounds(p0, 0.0, 0.5, False, tuple(diagnostics))
    q1 = _q1_raw(stats, intensities, p1)
    if q1 < 0:
        diagnostics.append(f"single-photon QBER bound {q1:.3e} clamped to 0")
    elif q1 > 0.5:
        diagnostics.append(f"single-photon QBER bound {q1:.3e} clamped to 1/2")
    return SingleYieldBounds(p0, p1, min(max(q1, 0.0), 0.5), True, tuple(diagnostics))
