"""Sparse elements of the graded symmetric algebra ``SV[hbar]`` over a finite mode basis."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, Mapping, Sequence, Tuple

from .scalars import Scalar, is_exact, normalize, to_complex

Monomial = Tuple[int, ...]
TermKey = Tuple[Monomial, int]

RESERVED_NAMES = frozenset({"hbar", "poisson", "comm", "theta", "thetaW", "pi0"})
_LABEL_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


class DimensionError(ValueError):
    """Operands live over different mode spaces or pairing sizes."""


@dataclass(frozen=True)
class ModeSpace:
    """Finite set of named generators."""

    labels: Tuple[str, ...]

    def __post_init__(self):
        labels = tuple(self.labels)
        object.__setattr__(self, "labels", labels)
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate mode labels in {labels}")
        for lab in labels:
            if not _LABEL_RE.fullmatch(lab) or lab in RESERVED_NAMES:
                raise ValueError(f"invalid mode label {lab!r}")
        object.__setattr__(self, "_index", {lab: i for i, lab in enumerate(labels)})

    @property
    def n(self) -> int:
        return len(self.labels)

    def index(self, mode) -> int:
        if isinstance(mode, int):
            if not 0 <= mode < self.n:
                raise IndexError(f"mode index {mode} out of range for {self.n} modes")
            return mode
        try:
            return self._index[mode]
        except KeyError:
            raise KeyError(f"unknown mode {mode!r}") from None

    def unit(self, mode) -> Monomial:
        i = self.index(mode)
        return tuple(1 if j == i else 0 for j in range(self.n))

    def __len__(self):
        return self.n

    def __contains__(self, label):
        return label in self._index


def monomial_degree(m: Monomial) -> int:
    return sum(m)


def monomial_factors(m: Monomial) -> list:
    """Expand an exponent vector into a list of mode indices, one per factor."""
    out = []
    for i, e in enumerate(m):
        out.extend([i] * e)
    return out


def monomial_from_factors(factors: Iterable[int], n: int) -> Monomial:
    exps = [0] * n
    for i in factors:
        exps[i] += 1
    return tuple(exps)


def grlex_key(m: Monomial):
    return (sum(m), m)


class HPoly:
    """Polynomial in ``hbar`` with scalar coefficients, stored sparsely."""

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs: Mapping[int, Scalar] | None = None):
        clean = {}
        for p, c in (coeffs or {}).items():
            if p < 0:
                raise ValueError("negative hbar exponent")
            c = normalize(c)
            if c != 0:
                clean[int(p)] = c
        self._coeffs = dict(sorted(clean.items()))

    @property
    def coeffs(self) -> Dict[int, Scalar]:
        return dict(self._coeffs)

    def __getitem__(self, p: int) -> Scalar:
        return self._coeffs.get(p, 0)

    def degree(self) -> int:
        return max(self._coeffs, default=-1)

    def __bool__(self):
        return bool(self._coeffs)

    def __eq__(self, other):
        if isinstance(other, HPoly):
            return self._coeffs == other._coeffs
        if other == 0:
            return not self._coeffs
        return NotImplemented

    def __hash__(self):
        return hash(tuple(self._coeffs.items()))

    def __add__(self, other: "HPoly") -> "HPoly":
        out = dict(self._coeffs)
        for p, c in other._coeffs.items():
            out[p] = out.get(p, 0) + c
        return HPoly(out)

    def __neg__(self):
        return HPoly({p: -c for p, c in self._coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, HPoly):
            return HPoly({p: c * other for p, c in self._coeffs.items()})
        out: Dict[int, Scalar] = {}
        for p, c in self._coeffs.items():
            for q, d in other._coeffs.items():
                out[p + q] = out.get(p + q, 0) + c * d
        return HPoly(out)

    __rmul__ = __mul__

    def __repr__(self):
        return f"HPoly({self._coeffs!r})"


class AlgebraElement:
    """Element of ``SV[hbar]`` (or ``SV[hbar] (x) C``).

    Terms are stored flat as ``{(exponents, hbar_power): coefficient}``; the
    per-monomial :class:`HPoly` view is available through :meth:`terms`.
    ``*`` is the commutative symmetric product; star products live in
    :mod:`starfield.symalg.star`.
    """

    __slots__ = ("space", "_data")

    def __init__(self, space: ModeSpace, data: Mapping[TermKey, Scalar] | None = None):
        self.space = space
        clean = {}
        n = space.n
        for (mono, p), c in (data or {}).items():
            mono = tuple(mono)
            if len(mono) != n:
                raise DimensionError(f"monomial {mono} does not match {n} modes")
            if p < 0 or any(e < 0 for e in mono):
                raise ValueError(f"negative exponent in term {(mono, p)}")
            c = normalize(c)
            if c != 0:
                clean[(mono, p)] = c
        self._data = clean

    @classmethod
    def _raw(cls, space, data):
        # data already canonical: normalized scalars, no zeros
        obj = cls.__new__(cls)
        obj.space = space
        obj._data = data
        return obj

    @classmethod
    def zero(cls, space: ModeSpace) -> "AlgebraElement":
        return cls(space)

    @classmethod
    def constant(cls, space: ModeSpace, c: Scalar = 1, hbar_power: int = 0) -> "AlgebraElement":
        return cls(space, {((0,) * space.n, hbar_power): c})

    @classmethod
    def one(cls, space: ModeSpace) -> "AlgebraElement":
        return cls.constant(space, 1)

    @classmethod
    def hbar(cls, space: ModeSpace) -> "AlgebraElement":
        return cls.constant(space, 1, 1)

    @classmethod
    def generator(cls, space: ModeSpace, mode) -> "AlgebraElement":
        return cls(space, {(space.unit(mode), 0): 1})

    @classmethod
    def monomial(cls, space: ModeSpace, exps: Sequence[int], coeff: Scalar = 1,
                 hbar_power: int = 0) -> "AlgebraElement":
        return cls(space, {(tuple(exps), hbar_power): coeff})

    @classmethod
    def from_terms(cls, space: ModeSpace, terms: Mapping[Monomial, HPoly]) -> "AlgebraElement":
        data = {}
        for mono, poly in terms.items():
            for p, c in poly.coeffs.items():
                data[(tuple(mono), p)] = c
        return cls(space, data)

    # -- inspection ----------------------------------------------------------

    def items(self) -> Iterator[Tuple[TermKey, Scalar]]:
        """Terms in canonical order: graded-lex descending by monomial, then hbar power."""
        for key in sorted(self._data, key=lambda k: (grlex_key(k[0]), -k[1]), reverse=True):
            yield key, self._data[key]

    def terms(self) -> Dict[Monomial, HPoly]:
        grouped: Dict[Monomial, Dict[int, Scalar]] = {}
        for (mono, p), c in self._data.items():
            grouped.setdefault(mono, {})[p] = c
        order = sorted(grouped, key=grlex_key, reverse=True)
        return {m: HPoly(grouped[m]) for m in order}

    def coefficient(self, mono: Sequence[int], hbar_power: int | None = None):
        mono = tuple(mono)
        if hbar_power is not None:
            return self._data.get((mono, hbar_power), 0)
        return HPoly({p: c for (m, p), c in self._data.items() if m == mono})

    def hbar_part(self, p: int) -> "AlgebraElement":
        """The coefficient of ``hbar**p`` as an hbar-free element."""
        return AlgebraElement._raw(self.space, {(m, 0): c for (m, q), c in self._data.items() if q == p})

    def __len__(self):
        return len(self._data)

    def is_zero(self) -> bool:
        return not self._data

    def degree(self) -> int:
        """Largest monomial degree; -1 for the zero element."""
        return max((sum(m) for m, _ in self._data), default=-1)

    def hbar_degree(self) -> int:
        return max((p for _, p in self._data), default=-1)

    def is_homogeneous(self, k: int) -> bool:
        return all(sum(m) == k for m, _ in self._data)

    def is_exact(self) -> bool:
        return all(is_exact(c) for c in self._data.values())

    def scalar_part(self):
        """Constant ``hbar**0`` coefficient."""
        return self._data.get(((0,) * self.space.n, 0), 0)

    # -- arithmetic ----------------------------------------------------------

    def _check(self, other: "AlgebraElement"):
        if self.space != other.space:
            raise DimensionError("operands live over different mode spaces")

    def _lift(self, other):
        if isinstance(other, AlgebraElement):
            self._check(other)
            return other
        return AlgebraElement.constant(self.space, other)

    def __add__(self, other):
        other = self._lift(other)
        out = dict(self._data)
        for k, c in other._data.items():
            v = normalize(out.get(k, 0) + c)
            if v == 0:
                out.pop(k, None)
            else:
                out[k] = v
        return AlgebraElement._raw(self.space, out)

    __radd__ = __add__

    def __neg__(self):
        return AlgebraElement._raw(self.space, {k: -c for k, c in self._data.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c: Scalar) -> "AlgebraElement":
        c = normalize(c)
        if c == 0:
            return AlgebraElement.zero(self.space)
        return AlgebraElement._raw(self.space, {k: normalize(v * c) for k, v in self._data.items()})

    def __mul__(self, other):
        if isinstance(other, AlgebraElement):
            return sym_mul(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only nonnegative integer powers")
        result = AlgebraElement.one(self.space)
        for _ in range(n):
            result = sym_mul(result, self)
        return result

    def times_hbar(self, p: int = 1) -> "AlgebraElement":
        return AlgebraElement._raw(self.space, {(m, q + p): c for (m, q), c in self._data.items()})

    def map_coefficients(self, fn) -> "AlgebraElement":
        return AlgebraElement(self.space, {k: fn(c) for k, c in self._data.items()})

    def to_complex(self) -> "AlgebraElement":
        """Same element on the float backend."""
        return AlgebraElement._raw(self.space, {k: to_complex(c) for k, c in self._data.items() if c != 0})

    # -- comparison ----------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, AlgebraElement):
            return self.space == other.space and self._data == other._data
        if other == 0:
            return not self._data
        return NotImplemented

    def __hash__(self):
        return hash((self.space, frozenset(self._data.items())))

    def max_abs_diff(self, other: "AlgebraElement") -> float:
        self._check(other)
        keys = set(self._data) | set(other._data)
        return max((abs(complex(self._data.get(k, 0)) - complex(other._data.get(k, 0))) for k in keys),
                   default=0.0)

    def max_abs_coeff(self) -> float:
        return max((abs(complex(c)) for c in self._data.values()), default=0.0)

    def __repr__(self):
        from .text import dumps
        return f"AlgebraElement({dumps(self)!r})"

    def __str__(self):
        from .text import dumps
        return dumps(self)


def sym_mul(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    """Commutative symmetric product; ``u . u`` is ``u^2`` with coefficient 1."""
    a._check(b)
    out: Dict[TermKey, Scalar] = {}
    for (ma, pa), ca in a._data.items():
        for (mb, pb), cb in b._data.items():
            key = (tuple(x + y for x, y in zip(ma, mb)), pa + pb)
            out[key] = out.get(key, 0) + ca * cb
    return AlgebraElement(a.space, out)


def contract(mode, a: AlgebraElement) -> AlgebraElement:
    """Coordinate contraction: the derivation d/d(mode), annihilating constants."""
    i = a.space.index(mode)
    out: Dict[TermKey, Scalar] = {}
    for (m, p), c in a._data.items():
        e = m[i]
        if e == 0:
            continue
        lowered = m[:i] + (e - 1,) + m[i + 1:]
        out[(lowered, p)] = out.get((lowered, p), 0) + c * e
    return AlgebraElement(a.space, out)


def project_pi(a: AlgebraElement) -> AlgebraElement:
    """Set ``hbar = 0``."""
    return AlgebraElement._raw(a.space, {k: c for k, c in a._data.items() if k[1] == 0})


def divide_by_hbar(a: AlgebraElement) -> AlgebraElement:
    """Strip one power of hbar; raises if ``a`` is not divisible by hbar."""
    if any(p == 0 for _, p in a._data):
        raise ArithmeticError("element is not divisible by hbar")
    return AlgebraElement._raw(a.space, {(m, p - 1): c for (m, p), c in a._data.items()})
