"""
Monte-Carlo session and the analytic model side by side
=======================================================

Simulate pulses end to end, then compare the decoy analysis of the counts
with the exact expectations. Runs are reproducible from the seed alone.
"""

import math

from gusqkd import ChannelParams, GusParams, IntensitySet, SessionConfig, analytic_report, key_rate_report, run_session
from gusqkd.simulator import per_k_yield_check
from gusqkd.validation import class_z_scores, practical_rate_sigma

gus = GusParams(8, math.pi / 2)
# a little misalignment so the error counts are large enough for z-scores to mean something
channel = ChannelParams(length_km=0, misalignment_error=0.01)
intensities = IntensitySet(0.5, 0.05, 1e-3, (1 / 3, 1 / 3, 1 / 3))
config = SessionConfig(gus, intensities, channel, n_pulses=5_000_000, seed=42)

result = run_session(config, workers=2)
print(result.stats.to_csv())
print("z-scores per class (clicks, errors):", class_z_scores(result.stats, intensities, gus, channel))
print("per photon number max |z|:", per_k_yield_check(result, channel, gus).max_abs_z)

simulated = key_rate_report(result.stats, intensities, gus, channel).r_prime
analytic = analytic_report(gus, channel, intensities).r_prime
sigma = practical_rate_sigma(intensities, gus, channel, tuple(int(n) for n in result.matched))
print(f"R' simulated {simulated:.4e}, analytic {analytic:.4e}, sigma {sigma:.1e}")
print("sifted key length:", result.sifted_key_alice.size, " errors:", int((result.sifted_key_alice != result.sifted_key_bob).sum()))
