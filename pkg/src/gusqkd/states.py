"""Photon statistics and Fock-space amplitudes of the phase-encoded GUS alphabet.

A source pulse is split into two time slots, each holding a coherent state of
mean photon number ``mu``; the alphabet state ``j`` carries a relative phase
``2*pi*j/N`` on the second slot. After phase randomization every pulse is an
incoherent Poisson mixture (total mean ``2*mu``) of the ``k``-photon states::

    |psi_k(phi)> = sqrt(k!/2^k) * sum_m e^{i m phi} |m>_1 |k-m>_2 / sqrt(m!(k-m)!)

All public functions take the *total* mean photon number of the pulse.
The carrier phase of the laser plays no role after randomization and is not
represented anywhere in the package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.special import gammaln

from .errors import DomainError

#: Cumulative Poisson mass required of a truncated photon-number sum.
PMF_MASS_TOLERANCE = 1e-12
#: Hard cap on the photon-number truncation.
K_MAX_CAP = 200


def poisson_pmf(k, total_mean: float):
    """Probability of ``k`` photons in a pulse of total mean ``total_mean``.

    Evaluated in log space, so large ``k`` neither overflows nor underflows
    prematurely. ``k`` may be an integer or an integer array.

    >>> round(poisson_pmf(1, 0.5), 5)
    0.30327
    """
    k_arr = np.asarray(k)
    if np.any(k_arr < 0):
        raise DomainError(f"photon number must be non-negative, got {k}")
    if total_mean < 0:
        raise DomainError(f"mean photon number must be non-negative, got {total_mean}")
    if total_mean == 0:
        out = np.where(k_arr == 0, 1.0, 0.0)
    else:
        out = np.exp(k_arr * math.log(total_mean) - total_mean - gammaln(k_arr + 1))
    return float(out) if out.ndim == 0 else out


def truncation_k_max(total_mean: float) -> int:
    """Smallest ``k`` whose cumulative Poisson mass reaches ``1 - 1e-12`` (capped at 200)."""
    if total_mean < 0:
        raise DomainError(f"mean photon number must be non-negative, got {total_mean}")
    cumulative = np.cumsum(poisson_pmf(np.arange(K_MAX_CAP + 1), total_mean))
    hits = np.nonzero(cumulative >= 1.0 - PMF_MASS_TOLERANCE)[0]
    return int(hits[0]) if hits.size else K_MAX_CAP


@dataclass(frozen=True)
class PhotonDistribution:
    """Poisson photon-number distribution of a pulse, truncated at ``k_max``."""

    mean: float
    k_max: int = field(default=-1)

    def __post_init__(self):
        if self.mean < 0:
            raise DomainError(f"mean photon number must be non-negative, got {self.mean}")
        if self.k_max < 0:
            object.__setattr__(self, "k_max", truncation_k_max(self.mean))

    @property
    def photon_numbers(self) -> np.ndarray:
        return np.arange(self.k_max + 1)

    def pmf(self) -> np.ndarray:
        return poisson_pmf(self.photon_numbers, self.mean)


def binomial_half_pmf(k: int) -> np.ndarray:
    """``C(k, m) / 2^k`` for ``m = 0..k`` via log-gamma."""
    m = np.arange(k + 1)
    return np.exp(gammaln(k + 1) - gammaln(m + 1) - gammaln(k - m + 1) - k * math.log(2.0))


@dataclass(frozen=True)
class FockStateVector:
    """Amplitudes of a ``k``-photon two-slot state.

    ``amplitudes[m]`` is the coefficient of ``|m>_1 |k-m>_2``.
    """

    k: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if len(self.amplitudes) != self.k + 1:
            raise DomainError("a k-photon state needs k+1 amplitudes")

    def inner(self, other: "FockStateVector") -> complex:
        """``<self|other>``."""
        if other.k != self.k:
            return 0j
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


def fock_state(k: int, phi: float) -> FockStateVector:
    """The ``k``-photon component of the alphabet state with relative phase ``phi``."""
    if k < 0:
        raise DomainError(f"photon number must be non-negative, got {k}")
    m = np.arange(k + 1)
    amplitudes = np.sqrt(binomial_half_pmf(k)) * np.exp(1j * m * phi)
    return FockStateVector(k, amplitudes)


def basis_overlap(delta_phi: float, k):
    """Overlap magnitude ``|cos(delta_phi/2)|^k`` of the two logical ``k``-photon states."""
    k_arr = np.asarray(k)
    if np.any(k_arr < 0):
        raise DomainError(f"photon number must be non-negative, got {k}")
    out = abs(math.cos(delta_phi / 2.0)) ** k_arr.astype(float)
    return float(out) if out.ndim == 0 else out


def binary_entropy(x):
    """Binary Shannon entropy in bits, with ``h(0) = h(1) = 0``.

    >>> binary_entropy(0.5)
    1.0
    """
    x_arr = np.asarray(x, dtype=float)
    if np.any((x_arr < 0) | (x_arr > 1)) or np.any(np.isnan(x_arr)):
        raise DomainError(f"binary entropy needs a probability in [0, 1], got {x}")
    inner = (x_arr > 0) & (x_arr < 1)
    safe = np.where(inner, x_arr, 0.5)
    h = np.where(inner, -safe * np.log2(safe) - (1 - safe) * np.log2(1 - safe), 0.0)
    return float(h) if h.ndim == 0 else h


def _phase_pairing(n_states: int, step: int) -> tuple[tuple[int, int], ...]:
    # Pair every phase index j with j + step (mod N) by walking each cycle of
    # the map j -> j + step and taking consecutive elements.
    pairs = []
    seen = set()
    for start in range(n_states):
        if start in seen:
            continue
        cycle = []
        j = start
        while j not in seen:
            seen.add(j)
            cycle.append(j)
            j = (j + step) % n_states
        pairs.extend((cycle[i], cycle[i + 1]) for i in range(0, len(cycle), 2))
    return tuple(sorted(pairs))


@dataclass(frozen=True)
class GusParams:
    """Alphabet of ``n_states`` geometrically uniform states grouped into ``N/2`` bases.

    ``delta_phi`` is the phase between logical 0 and 1 inside each basis and
    must be a multiple of ``2*pi/N``. Bases are formed by pairing phase index
    ``j`` (bit 0) with ``j + delta_phi*N/(2*pi)`` (bit 1).

    Examples
    --------
    >>> gus = GusParams(8, math.pi / 2)
    >>> [gus.phase_index(b, 0) for b in range(4)], [gus.phase_index(b, 1) for b in range(4)]
    ([0, 1, 4, 5], [2, 3, 6, 7])
    """

    n_states: int = 8
    delta_phi: float = math.pi / 2

    def __post_init__(self):
        if self.n_states < 2 or self.n_states % 2:
            raise DomainError(f"the number of states must be even and >= 2, got {self.n_states}")
        if not 0 < self.delta_phi <= math.pi + 1e-12:
            raise DomainError(f"delta_phi must lie in (0, pi], got {self.delta_phi}")
        steps = self.delta_phi * self.n_states / (2 * math.pi)
        if abs(steps - round(steps)) > 1e-9:
            raise DomainError(
                f"delta_phi={self.delta_phi} is not a multiple of 2*pi/{self.n_states}"
            )
        if (self.n_states // math.gcd(self.n_states, round(steps))) % 2:
            raise DomainError(
                f"states {2 * math.pi / self.n_states:.4g} rad apart cannot be paired "
                f"into bases with delta_phi={self.delta_phi}"
            )

    @property
    def n_bases(self) -> int:
        return self.n_states // 2

    @property
    def step(self) -> int:
        """``delta_phi`` in units of ``2*pi/N``."""
        return round(self.delta_phi * self.n_states / (2 * math.pi))

    @cached_property
    def bases(self) -> tuple[tuple[int, int], ...]:
        """``(index of bit 0, index of bit 1)`` for each basis."""
        return _phase_pairing(self.n_states, self.step)

    def phase_index(self, basis: int, bit: int) -> int:
        if not 0 <= basis < self.n_bases or bit not in (0, 1):
            raise DomainError(f"no state for basis={basis}, bit={bit}")
        return self.bases[basis][bit]

    def phase_of(self, basis: int, bit: int) -> float:
        """Relative phase (radians) encoding ``bit`` in ``basis``."""
        return 2 * math.pi * self.phase_index(basis, bit) / self.n_states

    @property
    def basis_overlap_1(self) -> float:
        """Single-photon overlap ``cos(delta_phi/2)``."""
        return basis_overlap(self.delta_phi, 1)

    @property
    def detection_factor(self) -> float:
        """``sin^2(delta_phi/2) = 1 - c_1^2``, the conclusive fraction of a matched measurement."""
        return math.sin(self.delta_phi / 2) ** 2
