"""
Star products on a small symmetric algebra
==========================================

Three modes, an exact rational pairing, and the three ways of computing the
star product.  Everything here is exact: coefficients are rationals.
"""

from gmpy2 import mpq

from starfield.symalg import (AlgebraElement, ModeSpace, PairingForm, commutator, dumps,
                              poisson, project_pi, star, star_iterated, sym_mul)
from starfield.testkit import injection_oracle

space = ModeSpace(("u", "v", "w"))
B = PairingForm(space, ((mpq(0), mpq(1, 2), mpq(0)),
                        (mpq(-1, 2), mpq(0), mpq(3)),
                        (mpq(1), mpq(0), mpq(0))))
u, v, w = (AlgebraElement.generator(space, x) for x in "uvw")

# generators: the symmetric product plus one contraction
print("u * v       =", dumps(star(B, u, v)))
print("v * u       =", dumps(star(B, v, u)))

# squares pick up two contractions, with multiplicities 4 and 2
a, b = u ** 2, v ** 2
print("u^2 * v^2   =", dumps(star(B, a, b)))

# closed form, iterated single contractions, and brute force all agree
assert star(B, a, b) == star_iterated(B, a, b) == injection_oracle(B, (2, 0, 0), (0, 2, 0))

# the product is associative ...
x, y, z = u + w, sym_mul(v, w), u ** 2 - v
assert star(B, x, star(B, y, z)) == star(B, star(B, x, y), z)

# ... deforms the symmetric product ...
assert project_pi(star(B, x, y)) == sym_mul(project_pi(x), project_pi(y))

# ... and its commutator starts at first order in hbar with the Poisson bracket
print("[x, y]      =", dumps(commutator(B, x, y)))
print("{x, y}      =", dumps(poisson(B, x, y)))
