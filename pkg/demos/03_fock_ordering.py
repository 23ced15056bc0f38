"""
Ordering theorems on a truncated Fock space
===========================================

Quantize random polynomial observables with the momentum-left map and with
normal ordering, and compare operator products with quantized star products.
Comparisons are restricted to the low-occupation block where the truncation
cannot be felt.
"""

import numpy as np

from starfield.checks import ccr_deviation, real_basis
from starfield.fock import (FockModel, Factor, OperatorWord, PHI, PI, guarded_deviation,
                            theta, vacuum_contraction, verify_ordering_theorem, wick_normal_form)
from starfield.kleingordon import KGConfig, ModeTable
from starfield.testkit import RandomStream, random_element

table = ModeTable.default(KGConfig())
model = FockModel(table, ncap=8)
print("Fock dimension:", model.space.dim)

# canonical commutation relations on the basis of Cauchy data
basis = real_basis(1)
worst = max(ccr_deviation(f, g, model.space) for f in basis for g in basis)
print(f"CCR max deviation: {worst:.2e}")

# Theta(A) Theta(B) against Theta(A * B), both orderings
s = RandomStream(7)
for _ in range(3):
    A = random_element(s, table.space, 3, 1)
    B = random_element(s, table.space, 3, 1)
    for which in ("hbar", "wick"):
        print(verify_ordering_theorem(A, B, model, which).line())

# theta of the unit is the identity
one = theta(table.generator("c0") ** 0, model)
print("theta(1) deviation from identity:", guarded_deviation(one, one @ one))

# the vacuum two-point function reproduces the Wick pairing
print("<0|s0 c0|0> =", vacuum_contraction("s0", "c0", model))
print("W(s0, c0)   =", model.wick("s0", "c0"))

# the Wick rewrite of phi(f) pi(g): a scalar contraction plus the reordered word
f = Factor(PHI, basis[1])
g = Factor(PI, basis[1])
for word in wick_normal_form(OperatorWord(1, (f,)), OperatorWord(1, (g,))):
    print(np.round(word.coefficient, 6), [fac.kind for fac in word.factors])
