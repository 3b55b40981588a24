"""
Estimating single-photon statistics with decoy pulses
=====================================================

Two weak decoy intensities next to the signal bound the click probability
and the QBER of single-photon pulses from quantities Bob can measure.
"""

import math

from gusqkd import ChannelParams, GusParams, IntensitySet, ObservedStats, estimate_single_photon
from gusqkd.channel import detect_prob_k, qber_k

gus = GusParams(8, math.pi / 2)
intensities = IntensitySet(0.5, 0.05, 1e-3)
for length in (0, 50, 100):
    channel = ChannelParams(length_km=length)
    stats = ObservedStats.from_channel(intensities, gus, channel)
    bounds = estimate_single_photon(stats, intensities)
    print(
        f"L={length:>3} km  P1 >= {bounds.p1_lower:.4e} (true {detect_prob_k(1, gus, channel):.4e})  "
        f"Q1 <= {bounds.q1_upper:.3e} (true {qber_k(1, gus, channel):.3e})"
    )

# the same estimate works on measured counts, e.g. read from CSV
print(ObservedStats.from_channel(intensities, gus, ChannelParams(length_km=50)).to_csv())
