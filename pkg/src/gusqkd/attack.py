"""Symmetric unitary attack on one logical basis and the resulting Holevo bound.

Eve entangles an ancilla with the transmitted ``k``-photon state so that a
bit sent as ``j`` reaches Bob as ``A|Psi(j)>|E(j)> + B|Psi(1-j)>|E(1-j)>``.
With a projective B92-like measurement Bob observes the QBER
``q = B^2 / (A^2 + B^2)``; unitarity then fixes the overlap of Eve's
ancillae as a function of ``(c, q)`` where ``c`` is the overlap of the two
basis states. The amplitudes ``A, B`` are real and positive without loss of
generality and never need to be materialized.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConsistencyError, DomainError
from .states import binary_entropy

_SQRT_TOLERANCE = 1e-12
#: Grid spacing used by :func:`chi_envelope`.
ENVELOPE_STEP = 1e-4


def _check_domain(c_k, q) -> None:
    c_arr, q_arr = np.asarray(c_k, dtype=float), np.asarray(q, dtype=float)
    if np.any((c_arr <= 0) | (c_arr >= 1)):
        raise DomainError(f"basis overlap must lie strictly inside (0, 1), got {c_k}")
    if np.any((q_arr < 0) | (q_arr > 0.5)):
        raise DomainError(f"QBER must lie in [0, 1/2], got {q}")


def disturbance(q):
    """``2AB/(A^2+B^2) = sqrt(1 - (1-2q)^2)`` for a symmetric attack with QBER ``q``."""
    q = np.asarray(q, dtype=float)
    out = np.sqrt(np.clip(1.0 - (1.0 - 2.0 * q) ** 2, 0.0, None))
    return float(out) if out.ndim == 0 else out


def zero_overlap_qber(c_k: float) -> float:
    """QBER at which Eve's ancillae become orthogonal: ``(1 - sqrt(1 - c^2)) / 2``."""
    return (1.0 - math.sqrt(1.0 - c_k * c_k)) / 2.0


def max_qber(c_k: float) -> float:
    """Largest QBER for which the ancilla overlap stays within ``[-1, 1]``.

    Beyond it the symmetric attack cannot produce the observed statistics.
    """
    s = min(1.0, 2.0 * c_k / (1.0 + c_k * c_k))
    return (1.0 - math.sqrt(1.0 - s * s)) / 2.0


def eve_overlap(c_k, q):
    """Signed overlap of Eve's ancilla states for basis overlap ``c_k`` and QBER ``q``.

    ``(c - s) / (c * (1 - c*s))`` with ``s = sqrt(1 - (1-2q)^2)``. Vanishes at
    :func:`zero_overlap_qber` and is negative beyond it.
    """
    _check_domain(c_k, q)
    c = np.asarray(c_k, dtype=float)
    s = disturbance(q)
    out = (c - s) / (c * (1.0 - c * s))
    return float(out) if np.ndim(out) == 0 else out


def _eigen_pairs(c_k, q):
    e = np.abs(np.asarray(eve_overlap(c_k, q)))
    if np.any(e > 1.0 + _SQRT_TOLERANCE):
        raise DomainError(
            f"QBER {q} exceeds what a symmetric attack can produce at overlap {c_k} "
            f"(max {max_qber(float(np.min(c_k))):.6g})"
        )
    e = np.minimum(e, 1.0)
    q = np.asarray(q, dtype=float)
    radicand = 1.0 - 4.0 * q * (1.0 - e * e) * (1.0 - q)
    if np.any(radicand < -_SQRT_TOLERANCE):
        raise ConsistencyError(f"negative eigenvalue radicand {radicand.min():.3e}")
    root = np.sqrt(np.clip(radicand, 0.0, None))
    return e, (1.0 + e) / 2.0, (1.0 + root) / 2.0


def holevo_chi(c_k, q):
    """Vectorized Holevo quantity in bits.

    Entropy of Eve's ancilla averaged over the bit minus the entropy of the
    ancilla given the bit, each a two-level state with known eigenvalues.
    """
    _, avg_plus, cond_plus = _eigen_pairs(c_k, q)
    chi = binary_entropy(np.clip(avg_plus, 0.0, 1.0)) - binary_entropy(np.clip(cond_plus, 0.0, 1.0))
    return float(chi) if np.ndim(chi) == 0 else chi


@dataclass(frozen=True)
class AttackPoint:
    """Everything the attack analysis yields at one ``(c_k, q)``.

    ``negative_overlap`` flags the regime past the zero of :func:`eve_overlap`,
    where the magnitude of the overlap is used.
    """

    c_k: float
    q: float
    ancilla_overlap: float
    average_eigenvalues: tuple[float, float]
    conditional_eigenvalues: tuple[float, float]
    chi: float
    negative_overlap: bool

    @property
    def conditional_entropy_bound(self) -> float:
        """Lower bound ``1 - chi`` on ``H(X|E)`` per conclusive bit."""
        return 1.0 - self.chi


def holevo(c_k: float, q: float) -> AttackPoint:
    """Holevo bound on Eve's information for basis overlap ``c_k`` at QBER ``q``."""
    overlap = eve_overlap(c_k, q)
    _, avg_plus, cond_plus = _eigen_pairs(c_k, q)
    avg_plus, cond_plus = float(avg_plus), float(cond_plus)
    return AttackPoint(
        c_k=c_k,
        q=q,
        ancilla_overlap=overlap,
        average_eigenvalues=(avg_plus, 1.0 - avg_plus),
        conditional_eigenvalues=(cond_plus, 1.0 - cond_plus),
        chi=binary_entropy(avg_plus) - binary_entropy(cond_plus),
        negative_overlap=overlap < 0,
    )


def chi_envelope(c_k: float, q: float, step: float = ENVELOPE_STEP) -> float:
    """Running maximum of the Holevo quantity over ``[0, q]``.

    The Holevo quantity is not monotone in the QBER; this is the conservative
    variant that never credits Eve with less information at a higher error rate.
    """
    _check_domain(c_k, q)
    # fixed lattice i*step plus the endpoint: grids for larger q contain those
    # for smaller q, so the envelope is exactly nondecreasing
    grid = np.append(np.arange(math.floor(q / step) + 1) * step, q)
    return float(np.max(holevo_chi(c_k, np.minimum(grid, q))))
