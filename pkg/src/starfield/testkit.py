"""Seeded random generators, the brute-force injection oracle, and comparison helpers.

Randomness comes from :class:`RandomStream`: splitmix64 turns a seed into a
nonzero state, then xorshift64* produces the stream.  The algorithm is fixed
so that a seed names the same random elements on every platform.
"""

from __future__ import annotations

import itertools
import math
from gmpy2 import mpq
from typing import Sequence

import numpy as np

from .fock import PHI, PI, Factor, OperatorWord
from .symalg import AlgebraElement, ModeSpace, PairingForm
from .symalg.element import monomial_factors, monomial_from_factors

MASK64 = (1 << 64) - 1
ORACLE_MAX_DEGREE = 8


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


class RandomStream:
    """xorshift64* generator seeded through splitmix64."""

    def __init__(self, seed: int):
        self.seed = seed & MASK64
        self._state = splitmix64(self.seed) or 0x9E3779B97F4A7C15
        self.position = 0

    def next_u64(self) -> int:
        x = self._state
        x ^= x >> 12
        x ^= (x << 25) & MASK64
        x ^= x >> 27
        self._state = x
        self.position += 1
        return (x * 0x2545F4914F6CDD1D) & MASK64

    def below(self, n: int) -> int:
        """Integer in ``[0, n)`` by multiply-shift."""
        if n <= 0:
            raise ValueError("n must be positive")
        return (self.next_u64() * n) >> 64

    def randint(self, lo: int, hi: int) -> int:
        """Integer in ``[lo, hi]``."""
        return lo + self.below(hi - lo + 1)

    def choice(self, seq: Sequence):
        return seq[self.below(len(seq))]

    def uniform(self, lo: float = 0.0, hi: float = 1.0) -> float:
        return lo + (hi - lo) * ((self.next_u64() >> 11) * 2.0 ** -53)

    def split(self, index: int) -> "RandomStream":
        """Independent deterministic substream, a function of the seed and index only."""
        return RandomStream(splitmix64(self.seed ^ splitmix64(index + 1)))


def _nonzero_digit(stream: RandomStream) -> int:
    v = stream.randint(1, 18)
    return v - 10 if v <= 9 else v - 9


def random_rational(stream: RandomStream) -> mpq:
    """``p/q`` with ``p, q`` drawn from ``[-9, 9] \\ {0}``."""
    return mpq(_nonzero_digit(stream), _nonzero_digit(stream))


def random_monomial(stream: RandomStream, n: int, degree: int, max_exponent: int | None = None):
    exps = [0] * n
    if n == 0:
        return tuple(exps)
    cap = max_exponent if max_exponent is not None else degree
    degree = min(degree, n * cap)
    for _ in range(degree):
        open_modes = [i for i in range(n) if exps[i] < cap]
        exps[stream.choice(open_modes)] += 1
    return tuple(exps)


def random_element(stream: RandomStream, space, max_degree: int, max_hbar_degree: int = 0,
                   max_terms: int = 5, max_exponent: int | None = None) -> AlgebraElement:
    """Sum of 1 to ``max_terms`` random terms with exact rational coefficients.

    ``max_exponent`` caps the exponent of each individual mode.
    """
    if isinstance(space, int):
        space = ModeSpace(tuple(f"x{i}" for i in range(space)))
    data = {}
    for _ in range(stream.randint(1, max_terms)):
        mono = random_monomial(stream, space.n, stream.randint(0, max_degree), max_exponent)
        key = (mono, stream.randint(0, max_hbar_degree))
        c = random_rational(stream)
        # a repeated key keeps its first draw so every coefficient stays a p/q with small p, q
        data.setdefault(key, c)
    return AlgebraElement(space, data)


def random_pairing(stream: RandomStream, space: ModeSpace) -> PairingForm:
    """Exact rational pairing; entries ``p/q`` with ``p`` in ``[-9, 9]`` and ``q`` in ``[1, 9]``."""
    mat = tuple(tuple(mpq(stream.randint(-9, 9), stream.randint(1, 9)) for _ in range(space.n))
                for _ in range(space.n))
    return PairingForm(space, mat, "random")


def random_real_fourier(stream: RandomStream, kmax: int) -> np.ndarray:
    """Fourier data of a random real trigonometric polynomial of bandwidth ``kmax``."""
    f = np.zeros(2 * kmax + 1, dtype=complex)
    f[kmax] = stream.uniform(-1, 1)
    for k in range(1, kmax + 1):
        c = complex(stream.uniform(-1, 1), stream.uniform(-1, 1))
        f[kmax + k] = c
        f[kmax - k] = c.conjugate()
    return f


def random_word(stream: RandomStream, kmax: int, n_pi: int, n_phi: int) -> OperatorWord:
    factors = [Factor(PI, random_real_fourier(stream, kmax)) for _ in range(n_pi)]
    factors += [Factor(PHI, random_real_fourier(stream, kmax)) for _ in range(n_phi)]
    coeff = complex(stream.uniform(-1, 1), stream.uniform(-1, 1))
    return OperatorWord(coeff, tuple(factors))


def injection_oracle(B: PairingForm, a_mono: Sequence[int], b_mono: Sequence[int]) -> AlgebraElement:
    """Star product of two monomials by literal enumeration.

    Both monomials are expanded into lists of labelled factors; every subset
    ``J`` of factors of ``a`` and every injection of ``J`` into the factors of
    ``b`` is visited one by one.
    """
    a_f = monomial_factors(tuple(a_mono))
    b_f = monomial_factors(tuple(b_mono))
    if len(a_f) + len(b_f) > ORACLE_MAX_DEGREE:
        raise ValueError(f"oracle is capped at total degree {ORACLE_MAX_DEGREE}")
    n = B.n
    data = {}
    for p in range(min(len(a_f), len(b_f)) + 1):
        for J in itertools.combinations(range(len(a_f)), p):
            for sigma in itertools.permutations(range(len(b_f)), p):
                w = 1
                for j, s in zip(J, sigma):
                    w = w * B.matrix[a_f[j]][b_f[s]]
                rest = [a_f[i] for i in range(len(a_f)) if i not in J]
                rest += [b_f[i] for i in range(len(b_f)) if i not in sigma]
                key = (monomial_from_factors(rest, n), p)
                data[key] = data.get(key, 0) + w
    return AlgebraElement(B.space, data)


_AST_LEAVES = ("label", "num", "hbar")
_AST_BINARY = ("add", "sub", "star", "symmul", "poisson", "comm")
_AST_UNARY = ("neg", "pow", "theta", "thetaW", "pi0")


def random_ast(stream: RandomStream, labels: Sequence[str], depth: int):
    """Random expression tree of depth at most ``depth``, in the shape the parser produces."""
    from . import expr as E

    if depth <= 1 or stream.below(4) == 0:
        kind = _AST_LEAVES[stream.below(3)]
        if kind == "label":
            return E.ModeRef(labels[stream.below(len(labels))])
        if kind == "num":
            return E.Num(mpq(stream.below(20), 1 + stream.below(4 if stream.below(2) else 1)))
        return E.Hbar()
    sub = lambda: random_ast(stream, labels, depth - 1)  # noqa: E731
    if stream.below(2):
        kind = _AST_BINARY[stream.below(len(_AST_BINARY))]
        left, right = sub(), sub()
        return {"add": lambda: E.Add(left, right), "sub": lambda: E.Add(left, E.Neg(right)),
                "star": lambda: E.Star(left, right), "symmul": lambda: E.SymMul(left, right),
                "poisson": lambda: E.Poisson(left, right),
                "comm": lambda: E.Commutator(left, right)}[kind]()
    kind = _AST_UNARY[stream.below(len(_AST_UNARY))]
    operand = sub()
    if kind == "neg":
        return E.Neg(operand)
    if kind == "pow":
        return E.Pow(operand, stream.below(4))
    return {"theta": E.Theta, "thetaW": E.ThetaW, "pi0": E.Pi0}[kind](operand)


def relative_deviation(a: AlgebraElement, b: AlgebraElement) -> float:
    """Largest coefficient difference, scaled by the larger operand's largest coefficient (at least 1)."""
    scale = max(1.0, a.max_abs_coeff(), b.max_abs_coeff())
    return a.max_abs_diff(b) / scale


def assert_elements_close(a: AlgebraElement, b: AlgebraElement, tol: float):
    dev = a.max_abs_diff(b)
    if dev > tol:
        raise AssertionError(f"elements differ by {dev:.3e} > {tol:.1e}:\n  {a}\n  {b}")


def float_close(x, y, tol: float) -> bool:
    return math.isclose(abs(complex(x) - complex(y)), 0.0, abs_tol=tol)
