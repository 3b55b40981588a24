"""Unambiguous discrimination of the GUS alphabet.

The phase-randomized alphabet states are block diagonal in the total photon
number ``k``, so an optimal unambiguous measurement acts on each block
separately. Inside a block the ``N`` states ``|psi_k(2*pi*j/N)>`` are
symmetric pure states with circulant Gram matrix
``G[j, l] = ((1 + exp(i*2*pi*(l-j)/N)) / 2)**k``; their optimal
equal-prior USD success probability is the smallest Gram eigenvalue. The
eigenvalues are the discrete Fourier transform of the first Gram row, which
folds into residue sums of the ``Binomial(k, 1/2)`` distribution::

    g_q = N * sum_{m = -q (mod N)} C(k, m) / 2**k

A block with ``k + 1 < N`` has linearly dependent states and an empty residue
class, hence zero success probability, which is where the tail bound
``sum_{k >= N-1} P_k`` comes from.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ConsistencyError, DomainError
from .states import basis_overlap, binomial_half_pmf, poisson_pmf

#: Default overall system efficiency below which USD success is considered dangerous.
DEFAULT_EFFICIENCY_THRESHOLD = 1e-6

_IMAG_TOLERANCE = 1e-9


def _check(n_states: int, total_mean: float) -> None:
    if n_states < 2:
        raise DomainError(f"need at least two states, got {n_states}")
    if total_mean < 0:
        raise DomainError(f"mean photon number must be non-negative, got {total_mean}")


def _tail_photon_numbers(start: int, total_mean: float) -> np.ndarray:
    # Past the mode the Poisson terms fall faster than geometrically; 60 extra
    # terms beyond mean + 15 sigma leave nothing representable.
    stop = max(start, math.ceil(total_mean + 15 * math.sqrt(total_mean))) + 60
    return np.arange(start, stop + 1)


def gram_eigenvalues(n_states: int, k: int, method: str = "series") -> np.ndarray:
    """Eigenvalues ``g_q`` (q = 0..N-1) of the ``k``-photon GUS Gram matrix.

    ``method="series"`` folds the binomial weights by residue (exact, no
    cancellation); ``method="fft"`` transforms the first Gram row numerically
    and rejects results with a non-negligible imaginary part.
    """
    if k < 0:
        raise DomainError(f"photon number must be non-negative, got {k}")
    if method == "series":
        m = np.arange(k + 1)
        # index by -m mod N so that entry q matches sum_j G[0, j] e^{+i 2 pi j q/N}
        return n_states * np.bincount((-m) % n_states, weights=binomial_half_pmf(k), minlength=n_states)
    if method == "fft":
        roots = np.exp(2j * np.pi * np.arange(n_states) / n_states)
        row = ((1 + roots) / 2) ** k
        g = np.fft.ifft(row) * n_states
        if np.max(np.abs(g.imag)) > _IMAG_TOLERANCE:
            raise ConsistencyError("Gram eigenvalues acquired an imaginary part")
        return g.real
    raise ValueError(f"unknown method {method!r}")


@lru_cache(maxsize=4096)
def block_usd_probability(n_states: int, k: int) -> float:
    """Optimal USD success probability within the ``k``-photon block."""
    if k + 1 < n_states:
        return 0.0
    # roundoff clamp: the smallest residue mass is at most 1/N analytically
    return min(1.0, max(0.0, float(gram_eigenvalues(n_states, k).min())))


def usd_tail_bound(n_states: int, total_mean: float) -> float:
    """Poisson weight of the photon numbers ``k >= N-1`` that admit USD of ``N`` states.

    Summed term by term from ``k = N-1`` upward, which keeps full relative
    precision for tiny tails.
    """
    _check(n_states, total_mean)
    k = _tail_photon_numbers(n_states - 1, total_mean)
    return float(np.sum(poisson_pmf(k, total_mean)))


def usd_exact(n_states: int, total_mean: float) -> float:
    """Optimal USD success probability for the phase-randomized ``N``-GUS alphabet.

    Never exceeds :func:`usd_tail_bound` (same terms, each weighted by a
    block probability ``<= 1``); for ``N = 2`` both equal ``1 - exp(-total_mean)``.
    """
    _check(n_states, total_mean)
    k = _tail_photon_numbers(n_states - 1, total_mean)
    weights = np.array([block_usd_probability(n_states, int(kk)) for kk in k])
    return float(np.sum(poisson_pmf(k, total_mean) * weights))


def usd_pure_coherent(n_states: int, total_mean: float) -> float:
    """USD success probability for the *pure* (not phase-randomized) coherent alphabet.

    The Gram row is ``exp(-(total_mean/2) * (1 - exp(i*2*pi*j/N)))``; the
    result is the smallest of its DFT eigenvalues. This is larger than the
    phase-randomized value because the carrier phase is treated as known.
    """
    _check(n_states, total_mean)
    roots = np.exp(2j * np.pi * np.arange(n_states) / n_states)
    row = np.exp(-(total_mean / 2) * (1 - roots))
    g = np.fft.ifft(row) * n_states
    if np.max(np.abs(g.imag)) > _IMAG_TOLERANCE:
        raise ConsistencyError("Gram eigenvalues acquired an imaginary part")
    return max(0.0, float(np.clip(g.real, 0.0, None).min()))


def pairwise_usd(delta_phi: float, k):
    """USD success probability ``1 - cos(delta_phi/2)^k`` for the two states of one basis."""
    return 1.0 - basis_overlap(delta_phi, k)


@dataclass(frozen=True)
class UsdResult:
    n_states: int
    total_mean: float
    p_exact: float
    p_tail_bound: float

    def is_safe(self, system_efficiency: float = DEFAULT_EFFICIENCY_THRESHOLD) -> bool:
        """Whether USD succeeds less often than Bob detects (efficiency ``system_efficiency``)."""
        return self.p_exact < system_efficiency


def usd_result(n_states: int, total_mean: float) -> UsdResult:
    return UsdResult(n_states, total_mean, usd_exact(n_states, total_mean), usd_tail_bound(n_states, total_mean))
