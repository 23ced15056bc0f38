"""
Klein-Gordon modes on a circle
==============================

Mode table, hypersurface pairing and Wick pairing for the default
configuration (m = 1, L = 2 pi, kmax = 1).
"""

import numpy as np

from starfield.kleingordon import KGConfig, ModeTable, sigma_form, wick_form

cfg = KGConfig(mass=1.0, L=2 * np.pi, kmax=1)
table = ModeTable.default(cfg)
print(table.tsv())

# the pairing integrates the time derivative of one mode against the other,
# so only rows of sin t modes are nonzero; it is not antisymmetric
S = np.array(sigma_form(table).matrix, dtype=complex).real
np.set_printoptions(precision=3, suppress=True, linewidth=120)
print("sigma pairing\n", S)
print("antisymmetric part (enters the bracket)\n", S - S.T)
print("sigma(s0, c0) =", S[1, 0], " 2 pi =", 2 * np.pi)

# the Wick pairing is complex; its antisymmetric part is i times sigma
W = np.array(wick_form(table).matrix, dtype=complex)
print("W(s0, c0) =", W[1, 0])
assert np.allclose(W - W.T, 1j * (S - S.T))
