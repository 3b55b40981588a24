"""
Phase states and how much they overlap
======================================

Each signal is a coherent pulse split over two time slots; only the relative
phase carries information. After phase randomization a pulse is a Poisson
mixture of photon-number states, and two states of one basis overlap by
cos(dphi/2) per photon.
"""

import math

import numpy as np

from gusqkd import GusParams, PhotonDistribution, basis_overlap, fock_state

# eight phases, bases built from pairs a quarter turn apart
gus = GusParams(n_states=8, delta_phi=math.pi / 2)
for b, (zero, one) in enumerate(gus.bases):
    print(f"basis {b}: bit 0 -> phase {zero}/8 turn, bit 1 -> phase {one}/8 turn")

# photon-number statistics for a total mean of 0.5 over both slots
dist = PhotonDistribution(0.5)
print("k_max:", dist.k_max, " P(k<=3):", np.round(dist.pmf()[:4], 5))

# overlap of the two states of a basis, from vectors and from the closed form
for k in (1, 2, 5):
    a, b = fock_state(k, 0.0), fock_state(k, gus.delta_phi)
    print(f"k={k}: |<a|b>| = {abs(a.inner(b)):.6f}  closed form {basis_overlap(gus.delta_phi, k):.6f}")
