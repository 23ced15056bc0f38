"""Truncated bosonic Fock space over the circle modes ``k_index = -kmax..kmax``.

Basis vectors are occupation tuples with total occupation ``<= ncap``, ordered
by total occupation and then lexicographically, so that the states with
occupation ``<= d`` form a prefix of the basis.  Raising operators drop any
component that would exceed the cap; a product of ``d`` ladder factors is
therefore exact on matrix elements between states of occupation
``<= ncap - d`` (the truncation guard).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, List, Sequence, Tuple

import numpy as np
import scipy.sparse as sp

from .kleingordon import (DomainError, KGConfig, ModeTable, cauchy_data, circle_integral,
                          is_real_fourier, sigma_form, wick_coefficients_from_data, wick_form)
from .symalg import AlgebraElement, PairingForm, star


class GuardError(ValueError):
    """The truncation cap is too small for the requested comparison."""


def _compositions(total: int, parts: int):
    """Occupation tuples of a fixed total, lexicographically descending."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


class FockSpace:
    def __init__(self, mode_count: int, ncap: int, mu: Sequence[float] | None = None):
        if mode_count < 1 or ncap < 0:
            raise ValueError("need mode_count >= 1 and ncap >= 0")
        self.mode_count = mode_count
        self.ncap = ncap
        self.mu = np.ones(mode_count) if mu is None else np.asarray(mu, dtype=float)
        if self.mu.shape != (mode_count,):
            raise ValueError("mu must have one entry per mode")
        basis = []
        for total in range(ncap + 1):
            basis.extend(_compositions(total, mode_count))
        self.basis: Tuple[Tuple[int, ...], ...] = tuple(basis)
        self.index = {occ: i for i, occ in enumerate(self.basis)}

    @classmethod
    def from_config(cls, cfg: KGConfig, ncap: int) -> "FockSpace":
        return cls(cfg.mode_count, ncap, cfg.mu_vector())

    @property
    def dim(self) -> int:
        return len(self.basis)

    def guard_dim(self, degree: int) -> int:
        """Number of basis states with occupation ``<= ncap - degree``."""
        d = self.ncap - degree
        if d < 0:
            return 0
        return math.comb(self.mode_count + d, d)

    def vacuum(self) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        v[0] = 1
        return v

    def state(self, occupation: Sequence[int]) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        v[self.index[tuple(occupation)]] = 1
        return v

    @cached_property
    def _lowering(self) -> List[sp.csr_matrix]:
        mats = []
        for j in range(self.mode_count):
            rows, cols, vals = [], [], []
            for col, occ in enumerate(self.basis):
                if occ[j]:
                    lower = occ[:j] + (occ[j] - 1,) + occ[j + 1:]
                    rows.append(self.index[lower])
                    cols.append(col)
                    vals.append(math.sqrt(occ[j]))
            mats.append(sp.csr_matrix((vals, (rows, cols)), shape=(self.dim, self.dim), dtype=complex))
        return mats

    @cached_property
    def _raising(self) -> List[sp.csr_matrix]:
        # adjoint of lowering: components above the cap never appear
        return [m.conj().T.tocsr() for m in self._lowering]

    def lowering(self, j: int) -> sp.csr_matrix:
        return self._lowering[j]

    def raising(self, j: int) -> sp.csr_matrix:
        return self._raising[j]


@dataclass(frozen=True)
class FockOperator:
    space: FockSpace
    matrix: sp.csr_matrix
    formal_degree: int = 0

    @classmethod
    def identity(cls, space: FockSpace) -> "FockOperator":
        return cls(space, sp.identity(space.dim, dtype=complex, format="csr"), 0)

    @classmethod
    def zero(cls, space: FockSpace) -> "FockOperator":
        return cls(space, sp.csr_matrix((space.dim, space.dim), dtype=complex), 0)

    def _check(self, other):
        if other.space is not self.space:
            raise ValueError("operators act on different Fock spaces")

    def __matmul__(self, other: "FockOperator") -> "FockOperator":
        self._check(other)
        return FockOperator(self.space, (self.matrix @ other.matrix).tocsr(),
                            self.formal_degree + other.formal_degree)

    def __add__(self, other: "FockOperator") -> "FockOperator":
        self._check(other)
        return FockOperator(self.space, (self.matrix + other.matrix).tocsr(),
                            max(self.formal_degree, other.formal_degree))

    def __neg__(self):
        return FockOperator(self.space, -self.matrix, self.formal_degree)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, c):
        return FockOperator(self.space, (self.matrix * complex(c)).tocsr(), self.formal_degree)

    __rmul__ = __mul__

    def dagger(self) -> "FockOperator":
        return FockOperator(self.space, self.matrix.conj().T.tocsr(), self.formal_degree)

    def dense(self) -> np.ndarray:
        return self.matrix.toarray()

    def guarded(self, degree: int | None = None) -> np.ndarray:
        """Dense block on states with occupation ``<= ncap - degree``."""
        g = self.space.guard_dim(self.formal_degree if degree is None else degree)
        return self.matrix[:g, :g].toarray()

    def is_zero(self) -> bool:
        return self.matrix.count_nonzero() == 0


def commutator(a: FockOperator, b: FockOperator) -> FockOperator:
    return a @ b - b @ a


def guarded_deviation(a: FockOperator, b: FockOperator, degree: int | None = None) -> float:
    """Largest absolute matrix-element difference on the guarded subspace."""
    if degree is None:
        degree = max(a.formal_degree, b.formal_degree)
    g = a.space.guard_dim(degree)
    if g == 0:
        raise GuardError(f"ncap={a.space.ncap} leaves no guarded states for degree {degree}")
    diff = (a.matrix[:g, :g] - b.matrix[:g, :g]).toarray()
    return float(np.max(np.abs(diff))) if diff.size else 0.0


# -- ladder operators ----------------------------------------------------------

def _check_vector(f, space: FockSpace) -> np.ndarray:
    f = np.asarray(f, dtype=complex)
    if f.shape != (space.mode_count,):
        raise ValueError(f"mode vector has length {f.shape}, expected {space.mode_count}")
    return f


def a_minus(f, space: FockSpace) -> FockOperator:
    """Annihilation ``sum_k conj(f_k) b_k``."""
    f = _check_vector(f, space)
    mat = sp.csr_matrix((space.dim, space.dim), dtype=complex)
    for j, c in enumerate(f):
        if c != 0:
            mat = mat + np.conj(c) * space.lowering(j)
    return FockOperator(space, mat.tocsr(), 1)


def a_minus_star(f, space: FockSpace) -> FockOperator:
    """Creation ``sum_k f_k b_k^dagger`` (adjoint of :func:`a_minus`)."""
    f = _check_vector(f, space)
    mat = sp.csr_matrix((space.dim, space.dim), dtype=complex)
    for j, c in enumerate(f):
        if c != 0:
            mat = mat + c * space.raising(j)
    return FockOperator(space, mat.tocsr(), 1)


def reflect_conj(f) -> np.ndarray:
    """``(C f)(k) = conj(f(-k))``."""
    return np.conj(np.asarray(f, dtype=complex)[::-1])


def ladder(f, space: FockSpace) -> Tuple[FockOperator, FockOperator]:
    """``a(f) = a_minus(sqrt(mu) C f)`` and ``a_dagger(f) = a_minus_star(sqrt(mu) f)``.

    ``[a(f), a_dagger(g)] = sum_k mu(k) f(-k) g(k)`` on the guarded subspace.
    """
    f = _check_vector(f, space)
    root = np.sqrt(space.mu)
    return a_minus(root * reflect_conj(f), space), a_minus_star(root * f, space)


def ladder_commutator_scalar(f, g, space: FockSpace) -> complex:
    f = np.asarray(f, dtype=complex)
    g = np.asarray(g, dtype=complex)
    return complex(np.sum(space.mu * f[::-1] * g))


def field_ops(f, space: FockSpace) -> Tuple[FockOperator, FockOperator]:
    """Field and momentum operators ``(phi_m(f), pi_m(f))`` from Fourier data of a real ``f``."""
    f = _check_vector(f, space)
    if not is_real_fourier(f):
        raise DomainError("field operators need a real-valued test function")
    a_low, a_high = ladder(f / space.mu, space)
    phi = (a_low + a_high) * (1 / math.sqrt(2))
    b_low, b_high = ladder(f, space)
    pi = (b_high - b_low) * (1j / math.sqrt(2))
    return phi, pi


# -- orderings -----------------------------------------------------------------

class FockModel:
    """A mode table together with a truncated Fock space and cached field operators."""

    def __init__(self, table: ModeTable, ncap: int):
        self.table = table
        self.cfg = table.cfg
        self.space = FockSpace.from_config(table.cfg, ncap)
        self._data = [cauchy_data(m, self.cfg) for m in table.modes]
        self._theta_cache: Dict[Tuple[int, ...], FockOperator] = {}
        self._wick_cache: Dict[Tuple[int, ...], FockOperator] = {}

    @property
    def ncap(self) -> int:
        return self.space.ncap

    @cached_property
    def _pi_phi(self) -> List[Tuple[FockOperator | None, FockOperator | None]]:
        # per mode: pi_m(psi(0)) and phi_m(psi_t(0)); None where the datum vanishes
        out = []
        for d in self._data:
            pi = field_ops(d.value_at_0, self.space)[1] if np.any(d.value_at_0) else None
            phi = field_ops(d.tderiv_at_0, self.space)[0] if np.any(d.tderiv_at_0) else None
            out.append((pi, phi))
        return out

    @cached_property
    def _ladders(self) -> List[Tuple[FockOperator, FockOperator]]:
        # per mode: a(F psi) and a_dagger(G psi)
        out = []
        for d in self._data:
            F, G = wick_coefficients_from_data(d, self.cfg)
            out.append((ladder(F, self.space)[0], ladder(G, self.space)[1]))
        return out

    @cached_property
    def sigma(self) -> PairingForm:
        return sigma_form(self.table)

    @cached_property
    def wick(self) -> PairingForm:
        return wick_form(self.table)

    def _mono(self, mono, cache, step) -> FockOperator:
        if mono in cache:
            return cache[mono]
        if not any(mono):
            op = FockOperator.identity(self.space)
        else:
            j = max(i for i, e in enumerate(mono) if e)
            rest = mono[:j] + (mono[j] - 1,) + mono[j + 1:]
            op = step(self._mono(rest, cache, step), j)
        cache[mono] = op
        return op

    def _theta_step(self, prev: FockOperator, j: int) -> FockOperator:
        # sum over subsets: the new factor is either -pi on the left or phi on the right
        pi, phi = self._pi_phi[j]
        out = FockOperator(self.space, FockOperator.zero(self.space).matrix, prev.formal_degree + 1)
        if phi is not None:
            out = out + prev @ phi
        if pi is not None:
            out = out - pi @ prev
        return out

    def _wick_step(self, prev: FockOperator, j: int) -> FockOperator:
        low, high = self._ladders[j]
        return high @ prev + prev @ low

    def theta_monomial(self, mono) -> FockOperator:
        return self._mono(tuple(mono), self._theta_cache, self._theta_step)

    def wick_monomial(self, mono) -> FockOperator:
        return self._mono(tuple(mono), self._wick_cache, self._wick_step)

    def _check(self, A: AlgebraElement):
        if A.space != self.table.space:
            raise DomainError("element is not over this model's mode table")


def theta(A: AlgebraElement, model: FockModel) -> FockOperator:
    """Momentum-left ordering: ``psi_1...psi_k -> sum_I (-1)^|I| prod_I pi_m(psi_i) prod_rest phi_m(psi_j,t)``.

    ``hbar`` maps to ``-i``.
    """
    model._check(A)
    out = FockOperator.zero(model.space)
    for (mono, p), c in A.items():
        out = out + model.theta_monomial(mono) * (complex(c) * (-1j) ** p)
    return out


def theta_wick(A: AlgebraElement, model: FockModel) -> FockOperator:
    """Normal ordering: ``sum_I prod_I a_dagger(G psi_i) prod_rest a(F psi_j)``; ``hbar`` maps to 1."""
    model._check(A)
    out = FockOperator.zero(model.space)
    for (mono, p), c in A.items():
        out = out + model.wick_monomial(mono) * complex(c)
    return out


# -- Wick rewriting of field-operator words --------------------------------------

PI, PHI = "pi", "phi"


@dataclass(frozen=True)
class Factor:
    kind: str
    f: Tuple[complex, ...]

    def __post_init__(self):
        if self.kind not in (PI, PHI):
            raise ValueError("factor kind must be 'pi' or 'phi'")
        object.__setattr__(self, "f", tuple(complex(x) for x in self.f))

    @property
    def vector(self) -> np.ndarray:
        return np.array(self.f, dtype=complex)


@dataclass(frozen=True)
class OperatorWord:
    """``coefficient * F_1 F_2 ... F_n`` with each ``F`` a ``pi_m`` or ``phi_m`` factor."""

    coefficient: complex = 1
    factors: Tuple[Factor, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))

    def is_normal_ordered(self) -> bool:
        kinds = [fac.kind for fac in self.factors]
        return kinds == sorted(kinds, key=lambda k: k != PI)

    def split(self):
        pis = [fac for fac in self.factors if fac.kind == PI]
        phis = [fac for fac in self.factors if fac.kind == PHI]
        return pis, phis

    def matrix(self, space: FockSpace) -> FockOperator:
        op = FockOperator.identity(space) * self.coefficient
        for fac in self.factors:
            phi, pi = field_ops(fac.vector, space)
            op = op @ (pi if fac.kind == PI else phi)
        return op


def wick_normal_form(left: OperatorWord, right: OperatorWord) -> List[OperatorWord]:
    """Rewrite ``left * right`` as a sum of momentum-left words.

    Every field factor of ``left`` may be contracted with a distinct momentum
    factor of ``right``; each contraction contributes ``i * int f g``.
    """
    if not (left.is_normal_ordered() and right.is_normal_ordered()):
        raise DomainError("wick_normal_form expects momentum-left ordered words")
    pa, fb = left.split()
    pc, fd = right.split()
    out = []
    for size in range(min(len(fb), len(pc)) + 1):
        for I in itertools.combinations(range(len(fb)), size):
            for sigma in itertools.permutations(range(len(pc)), size):
                c = complex(left.coefficient) * complex(right.coefficient) * (1j ** size)
                for j, s in zip(I, sigma):
                    c *= circle_integral(fb[j].vector, pc[s].vector)
                pis = pa + [pc[s] for s in range(len(pc)) if s not in sigma]
                phis = fd + [fb[j] for j in range(len(fb)) if j not in I]
                out.append(OperatorWord(c, tuple(pis + phis)))
    return out


# -- theorem verification ------------------------------------------------------

@dataclass(frozen=True)
class OrderingReport:
    theorem: str
    deg_a: int
    deg_b: int
    ncap: int
    max_abs_dev: float
    guard_dim: int

    def line(self) -> str:
        return (f"{self.theorem}\t{self.deg_a}\t{self.deg_b}\t{self.ncap}\t"
                f"{self.max_abs_dev:.3e}\t{self.guard_dim}")

    def passed(self, tol: float) -> bool:
        return self.max_abs_dev <= tol


def verify_ordering_theorem(A: AlgebraElement, B: AlgebraElement, model: FockModel,
                            which: str = "hbar") -> OrderingReport:
    """Compare ``Q(A) Q(B)`` with ``Q(A * B)`` on the guarded subspace.

    ``which="hbar"`` uses the momentum-left ordering with the hypersurface
    pairing; ``which="wick"`` uses normal ordering with the Wick pairing.
    """
    deg_a, deg_b = max(A.degree(), 0), max(B.degree(), 0)
    degree = deg_a + deg_b
    g = model.space.guard_dim(degree)
    if g == 0:
        raise GuardError(f"ncap={model.ncap} is below the combined degree {degree}")
    if which == "hbar":
        quant, form, name = theta, model.sigma, "ordre"
    elif which == "wick":
        quant, form, name = theta_wick, model.wick, "wick"
    else:
        raise ValueError(f"unknown ordering {which!r}")
    lhs = quant(A, model) @ quant(B, model)
    rhs = quant(star(form, A.to_complex(), B.to_complex()), model)
    dev = guarded_deviation(lhs, rhs, degree)
    return OrderingReport(name, deg_a, deg_b, model.ncap, dev, g)


def vacuum_contraction(psi_label, chi_label, model: FockModel) -> complex:
    """``<0| Q_W(psi) Q_W(chi) |0>``: the Fock-side value of the Wick pairing."""
    space = model.table.space
    a = theta_wick(AlgebraElement.generator(space, psi_label), model)
    b = theta_wick(AlgebraElement.generator(space, chi_label), model)
    v = model.space.vacuum()
    return complex(v.conj() @ ((a @ b).matrix @ v))
