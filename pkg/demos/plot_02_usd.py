"""
Can an eavesdropper identify the state without error?
=====================================================

Unambiguous discrimination of all N phases needs at least N-1 photons. The
exact success probability is compared with the crude bound "probability of
at least N-1 photons" and with the naive pure-coherent-state value.
"""

from gusqkd.usd import usd_pure_coherent, usd_result

for n in (2, 4, 8, 16):
    print(f"N = {n}")
    for two_mu in (0.1, 0.5, 0.9, 2.0):
        res = usd_result(n, two_mu)
        print(
            f"  2mu={two_mu:<4} exact {res.p_exact:.3e}  bound {res.p_tail_bound:.3e}  "
            f"pure {usd_pure_coherent(n, two_mu):.3e}  safe at 1e-6: {res.is_safe(1e-6)}"
        )

# more states push the attack's success probability down by orders of magnitude
