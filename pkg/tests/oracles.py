"""Independent reference computations shared by the test modules.

Nothing here calls into the code paths being checked except for trivially
verified constructors.
"""

import math

import numpy as np


def entropy_bits(p):
    return 0.0 if p <= 0 or p >= 1 else -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def oracle_eve_overlap(c, q):
    # Solve c (1 - e)(A^2 + B^2) = 2 (1 - c^2 e) A B for e, with A^2 = 1 - q, B^2 = q.
    a, b = math.sqrt(1 - q), math.sqrt(q)
    coeff = np.array([[2 * c * c * a * b - c * (a * a + b * b)]])
    rhs = np.array([2 * a * b - c * (a * a + b * b)])
    return float(np.linalg.solve(coeff, rhs)[0])


def von_neumann(rho):
    w = np.linalg.eigvalsh(rho)
    w = w[w > 1e-300]
    return float(-np.sum(w * np.log2(w)))


def oracle_chi(c, q):
    """Holevo quantity from explicit 2x2 density matrices of Eve's ancilla."""
    e = abs(oracle_eve_overlap(c, q))
    e0 = np.array([1.0, 0.0])
    e1 = np.array([e, math.sqrt(max(0.0, 1 - e * e))])
    rho0 = (1 - q) * np.outer(e0, e0) + q * np.outer(e1, e1)
    rho1 = (1 - q) * np.outer(e1, e1) + q * np.outer(e0, e0)
    return von_neumann((rho0 + rho1) / 2) - (von_neumann(rho0) + von_neumann(rho1)) / 2


def _pd(p_d, x, mean):
    return p_d + 0.5 * (1 - math.exp(-mean * x))


def oracle_practical_rate(length, signal, delta_phi, eta=0.1, a=0.2, p_d=1e-6, decoy1=0.05, decoy2=1e-3):
    """Channel -> decoy -> attack -> rate chain written out from the raw formulas."""
    x = eta * math.sin(delta_phi / 2) ** 2 * 10 ** (-a * length / 10)
    p = {m: _pd(p_d, x, m) for m in (signal, decoy1, decoy2)}
    err = {m: p_d / 2 for m in p}
    mu, n1, n2 = signal / 2, decoy1 / 2, decoy2 / 2
    p0 = max((n1 * math.exp(2 * n2) * p[decoy2] - n2 * math.exp(2 * n1) * p[decoy1]) / (n1 - n2), 0)
    p1 = (
        0.5
        / (n1 - n2 - (n1**2 - n2**2) / mu)
        * (p[decoy1] * math.exp(2 * n1) - p[decoy2] * math.exp(2 * n2) - (n1**2 - n2**2) / mu**2 * (p[signal] * math.exp(2 * mu) - p0))
    )
    q1 = (math.exp(2 * n1) * err[decoy1] - math.exp(2 * n2) * err[decoy2]) / (2 * (n1 - n2) * p1)
    chi = oracle_chi(math.cos(delta_phi / 2), q1)
    q_mu = err[signal] / p[signal]
    rate = signal * math.exp(-signal) * p1 * (1 - chi) - p[signal] * entropy_bits(q_mu)
    return {"p_mu": p[signal], "p1": p1, "q1": q1, "chi1": chi, "r_prime": rate, "eta_t": x / math.sin(delta_phi / 2) ** 2}


def oracle_full_rate(length, signal, delta_phi, eta=0.1, a=0.2, p_d=1e-6, k_stop=60):
    x = eta * math.sin(delta_phi / 2) ** 2 * 10 ** (-a * length / 10)
    c1 = math.cos(delta_phi / 2)
    total = 0.0
    for k in range(1, k_stop):
        pk = math.exp(-signal) * signal**k / math.factorial(k)
        yk = p_d + 0.5 * (1 - (1 - x) ** k)
        total += pk * yk * (1 - oracle_chi(c1**k, p_d / (2 * yk)))
    p = _pd(p_d, x, signal)
    return total - p * entropy_bits(p_d / (2 * p))


def fock_vector(k, phi):
    """Amplitudes of k photons split over two slots with relative phase phi, from explicit factorials."""
    norm = math.sqrt(math.factorial(k) / 2**k)
    return np.array([norm * np.exp(1j * m * phi) / math.sqrt(math.factorial(m) * math.factorial(k - m)) for m in range(k + 1)])
