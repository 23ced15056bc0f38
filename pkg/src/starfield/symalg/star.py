"""Contraction star products, commutator and Poisson bracket.

Every star product here is determined by a :class:`PairingForm` ``B``: on
monomials ``a``, ``b`` it sums, over all ways of contracting labelled factors of
``a`` with distinct labelled factors of ``b``, the product of pairing values
times the symmetric product of whatever is left, weighted by ``hbar**p`` for
``p`` contractions.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb, factorial, perm
from typing import Dict, List, Sequence, Tuple

from .element import (AlgebraElement, DimensionError, ModeSpace, Monomial, TermKey,
                      contract, divide_by_hbar, project_pi, sym_mul)
from .scalars import Scalar, normalize, to_complex


class ConsistencyError(ArithmeticError):
    """Two routes that must agree did not."""


@dataclass(frozen=True)
class PairingForm:
    """Bilinear form on the mode space, ``matrix[r][s] = B(mode_r, mode_s)``.

    No symmetry is assumed.
    """

    space: ModeSpace
    matrix: Tuple[Tuple[Scalar, ...], ...]
    name: str = "custom"

    def __post_init__(self):
        rows = tuple(tuple(normalize(x) for x in row) for row in self.matrix)
        n = self.space.n
        if len(rows) != n or any(len(r) != n for r in rows):
            raise DimensionError(f"pairing matrix must be {n}x{n}")
        object.__setattr__(self, "matrix", rows)

    @property
    def n(self) -> int:
        return self.space.n

    def __call__(self, r, s) -> Scalar:
        return self.matrix[self.space.index(r)][self.space.index(s)]

    def transpose(self) -> "PairingForm":
        return PairingForm(self.space, tuple(zip(*self.matrix)), self.name + "^T")

    def antisymmetric(self) -> Tuple[Tuple[Scalar, ...], ...]:
        """``B[r][s] - B[s][r]``, the generator bracket table."""
        m = self.matrix
        return tuple(tuple(m[r][s] - m[s][r] for s in range(self.n)) for r in range(self.n))

    def to_complex(self) -> "PairingForm":
        return PairingForm(self.space, tuple(tuple(to_complex(x) for x in row) for row in self.matrix),
                           self.name)

    def nonzero_pairs(self) -> List[Tuple[int, int, Scalar]]:
        return [(r, s, v) for r, row in enumerate(self.matrix) for s, v in enumerate(row) if v != 0]


def _check(B: PairingForm, a: AlgebraElement, b: AlgebraElement):
    if a.space != b.space:
        raise DimensionError("operands live over different mode spaces")
    if B.space != a.space:
        raise DimensionError("pairing form does not match the operands' mode space")


@lru_cache(maxsize=None)
def _contraction_patterns(ea: Monomial, eb: Monomial, support: Tuple[Tuple[int, int], ...]):
    """All contraction-count matrices between two monomials.

    Returns ``(counts, multiplicity, rem_a, rem_b, p)`` tuples where ``counts``
    gives ``C[r, s]`` for each pair in ``support``, ``multiplicity`` is the
    number of (subset, injection) choices on labelled factors realising it.
    Assigning ``c`` contractions to the pair ``(r, s)`` picks ``c`` of the
    remaining ``r``-factors of ``a`` and injects them into the remaining
    ``s``-factors of ``b``: ``comb(left_r, c) * perm(left_s, c)`` ways.
    """
    pairs = [(r, s) for r, s in support if ea[r] and eb[s]]
    out = []
    row_left = list(ea)
    col_left = list(eb)
    counts = [0] * len(pairs)

    def rec(idx, mult, p):
        if idx == len(pairs):
            out.append((tuple(counts), mult, tuple(row_left), tuple(col_left), p))
            return
        r, s = pairs[idx]
        lr, ls = row_left[r], col_left[s]
        for c in range(min(lr, ls) + 1):
            counts[idx] = c
            row_left[r] = lr - c
            col_left[s] = ls - c
            rec(idx + 1, mult * comb(lr, c) * perm(ls, c), p + c)
        row_left[r], col_left[s] = lr, ls
        counts[idx] = 0

    rec(0, 1, 0)
    return tuple(pairs), tuple(out)


def _group(a: AlgebraElement) -> Dict[Monomial, Dict[int, Scalar]]:
    grouped: Dict[Monomial, Dict[int, Scalar]] = {}
    for (m, p), c in a._data.items():
        grouped.setdefault(m, {})[p] = c
    return grouped


def star(B: PairingForm, a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    """Closed-form star product ``a * b`` for the pairing ``B``.

    Contraction patterns are counted in closed form: a count matrix ``C`` is
    realised by ``prod_r (e_r)_{R_r} * prod_s (f_s)_{S_s} / prod C_rs!``
    labelled (subset, injection) choices, ``(n)_k`` the falling factorial and
    ``R``, ``S`` the row and column sums of ``C``.
    """
    _check(B, a, b)
    support = tuple((r, s) for r, s, _ in B.nonzero_pairs())
    mat = B.matrix
    weights: Dict[tuple, Scalar] = {}
    out: Dict[TermKey, Scalar] = {}
    b_groups = _group(b)
    for ma, a_coeffs in _group(a).items():
        for mb, b_coeffs in b_groups.items():
            hpoly: Dict[int, Scalar] = {}
            for pa, ca in a_coeffs.items():
                for pb, cb in b_coeffs.items():
                    hpoly[pa + pb] = hpoly.get(pa + pb, 0) + ca * cb
            pairs, patterns = _contraction_patterns(ma, mb, support)
            for counts, mult, rem_a, rem_b, p in patterns:
                wkey = (pairs, counts)
                w = weights.get(wkey)
                if w is None:
                    w = 1
                    for (r, s), c in zip(pairs, counts):
                        if c:
                            w = w * mat[r][s] ** c
                    weights[wkey] = w
                w = w * mult
                mono = tuple(x + y for x, y in zip(rem_a, rem_b))
                for q, c in hpoly.items():
                    key = (mono, q + p)
                    out[key] = out.get(key, 0) + c * w
    return AlgebraElement(a.space, out)


def star_iterated(B: PairingForm, a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    """Star product by iterating the single-contraction map and dividing by ``p!``.

    The bilinear map ``M(x (x) y) = sum_{r,s} B[r][s] d_r x (x) d_s y`` acts on
    a sparse tensor of term pairs; after ``p`` applications the pairs are
    multiplied with the symmetric product and weighted by ``hbar**p / p!``.
    """
    _check(B, a, b)
    nz = B.nonzero_pairs()
    n = a.space.n
    # tensor: {(mono_a, mono_b, hbar_power): coefficient}
    tensor: Dict[Tuple[Monomial, Monomial, int], Scalar] = {}
    for (ma, pa), ca in a._data.items():
        for (mb, pb), cb in b._data.items():
            key = (ma, mb, pa + pb)
            tensor[key] = tensor.get(key, 0) + ca * cb
    out: Dict[TermKey, Scalar] = {}
    p = 0
    while tensor:
        inv = normalize(1) / factorial(p) if p else 1
        for (ma, mb, q), c in tensor.items():
            key = (tuple(x + y for x, y in zip(ma, mb)), q + p)
            out[key] = out.get(key, 0) + c * inv
        nxt: Dict[Tuple[Monomial, Monomial, int], Scalar] = {}
        for (ma, mb, q), c in tensor.items():
            for r, s, v in nz:
                er, fs = ma[r], mb[s]
                if not er or not fs:
                    continue
                na = ma[:r] + (er - 1,) + ma[r + 1:]
                nb = mb[:s] + (fs - 1,) + mb[s + 1:]
                key = (na, nb, q)
                nxt[key] = nxt.get(key, 0) + c * v * (er * fs)
        tensor = {k: v for k, v in nxt.items() if v != 0}
        p += 1
        if p > 2 * (a.degree() + b.degree()) + n + 1:
            raise ConsistencyError("contraction iteration failed to terminate")
    return AlgebraElement(a.space, out)


def commutator(B: PairingForm, a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    return star(B, a, b) - star(B, b, a)


def poisson(B: PairingForm, a: AlgebraElement, b: AlgebraElement, *, check: bool = False) -> AlgebraElement:
    """Leibniz-extended bracket ``sum (B[r][s]-B[s][r]) d_r a . d_s b``.

    With ``check=True`` the result is cross-checked against the hbar-linear
    part of the star commutator and :class:`ConsistencyError` is raised on
    any disagreement.
    """
    _check(B, a, b)
    anti = B.antisymmetric()
    n = B.n
    result = AlgebraElement.zero(a.space)
    da = [contract(r, a) for r in range(n)]
    db = [contract(s, b) for s in range(n)]
    for r in range(n):
        if da[r].is_zero():
            continue
        for s in range(n):
            w = anti[r][s]
            if w == 0 or db[s].is_zero():
                continue
            result = result + sym_mul(da[r], db[s]).scale(w)
    if check:
        comm = commutator(B, a, b)
        try:
            reduced = divide_by_hbar(comm)
        except ArithmeticError as exc:
            raise ConsistencyError("star commutator is not divisible by hbar") from exc
        if project_pi(reduced) != project_pi(result):
            raise ConsistencyError("bracket disagrees with the hbar-linear part of the commutator")
    return result


def lemma1_check(k: int, z_modes: Sequence, a: AlgebraElement, b: AlgebraElement) -> bool:
    """Check the contraction-distribution identity and commutativity of contractions.

    ``d_{z_k} ... d_{z_1}(a . b)`` must equal the sum over subsets ``J`` of
    positions of ``d_{z_J} a . d_{z_rest} b``.
    """
    if len(z_modes) != k:
        raise ValueError("need exactly k contraction modes")
    space = a.space
    z = [space.index(m) for m in z_modes]

    def apply(seq, x):
        for m in seq:
            x = contract(m, x)
        return x

    lhs = apply(z, sym_mul(a, b))
    rhs = AlgebraElement.zero(space)
    for mask in range(1 << k):
        left = [z[i] for i in range(k) if mask >> i & 1]
        right = [z[i] for i in range(k) if not mask >> i & 1]
        rhs = rhs + sym_mul(apply(left, a), apply(right, b))
    if lhs != rhs:
        return False
    # contractions commute pairwise
    for i in range(k):
        for j in range(i + 1, k):
            for x in (a, b):
                if contract(z[i], contract(z[j], x)) != contract(z[j], contract(z[i], x)):
                    return False
    return True
