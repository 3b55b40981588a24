"""
Information leaked to a symmetric unitary attack
================================================

For a given basis overlap c the eavesdropper's ancilla overlap is fixed by
the QBER she causes; the Holevo quantity then bounds what she learns. It is
not monotone in the QBER, so a running maximum is offered as the cautious
alternative.
"""

import math

import numpy as np

from gusqkd.attack import chi_envelope, holevo, max_qber

c = math.sqrt(2) / 2
print(f"largest QBER the attack can produce at c = {c:.4f}: {max_qber(c):.4f}")
for q in np.linspace(0, max_qber(c), 9):
    point = holevo(c, q)
    print(f"q={q:.4f}  ancilla overlap {point.ancilla_overlap:+.4f}  chi {point.chi:.4f}  running max {chi_envelope(c, q):.4f}")
