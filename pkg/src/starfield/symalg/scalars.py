"""Scalar backends for algebra coefficients.

Two interchangeable backends are supported:

* exact: ``gmpy2.mpq`` for real values and :class:`GaussianRational` for values
  with a nonzero imaginary part.  Exact values are always kept in normalized
  form (any rational becomes an ``mpq``; a Gaussian rational with zero imaginary
  part collapses to its real part), so equal scalars have identical storage.
* float: Python ``complex``.

Mixing an exact scalar with a float scalar produces a ``complex``.
"""

from __future__ import annotations

import re
from numbers import Rational
from typing import Union

from gmpy2 import mpc, mpfr, mpq


class GaussianRational:
    """Exact complex number ``re + i*im`` with rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re, im=0):
        object.__setattr__(self, "re", mpq(re))
        object.__setattr__(self, "im", mpq(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussianRational is immutable")

    @staticmethod
    def _coerce(other):
        if isinstance(other, GaussianRational):
            return other
        if isinstance(other, Rational):
            return GaussianRational(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            if isinstance(other, (float, complex)):
                return complex(self) + other
            return NotImplemented
        return normalize(GaussianRational(self.re + o.re, self.im + o.im))

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            if isinstance(other, (float, complex)):
                return complex(self) * other
            return NotImplemented
        return normalize(GaussianRational(self.re * o.re - self.im * o.im,
                                          self.re * o.im + self.im * o.re))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            if isinstance(other, (float, complex)):
                return complex(self) / other
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            if isinstance(other, (float, complex)):
                return other / complex(self)
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result = GaussianRational(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def inverse(self):
        norm = self.re * self.re + self.im * self.im
        if norm == 0:
            raise ZeroDivisionError("GaussianRational division by zero")
        return GaussianRational(self.re / norm, -self.im / norm)

    def conjugate(self):
        return normalize(GaussianRational(self.re, -self.im))

    @property
    def real(self):
        return self.re

    @property
    def imag(self):
        return self.im

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __abs__(self):
        return abs(complex(self))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        if isinstance(other, GaussianRational):
            return self.re == other.re and self.im == other.im
        if isinstance(other, Rational):
            return self.im == 0 and self.re == other
        if isinstance(other, (float, complex)):
            return complex(self) == other
        return NotImplemented

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __repr__(self):
        return f"GaussianRational({self.re!s}, {self.im!s})"


Scalar = Union[mpq, GaussianRational, complex]

I = GaussianRational(0, 1)


def normalize(x) -> Scalar:
    """Bring a scalar to canonical storage for its backend."""
    if type(x) is mpq:
        return x
    if isinstance(x, GaussianRational):
        return x.re if x.im == 0 else x
    if isinstance(x, Rational):
        return mpq(x)
    if isinstance(x, (float, complex, mpfr, mpc)):
        return complex(x)
    raise TypeError(f"unsupported scalar type {type(x).__name__}")


def is_exact(x) -> bool:
    return isinstance(x, (Rational, GaussianRational))


def to_complex(x) -> complex:
    return complex(x)


def conj(x) -> Scalar:
    if isinstance(x, Rational):
        return x
    return x.conjugate()


def is_zero(x) -> bool:
    return x == 0


# -- text form ---------------------------------------------------------------

def _format_real(r) -> str:
    if isinstance(r, Rational):
        return str(r)
    return repr(float(r))


def format_scalar(x) -> str:
    """Text form of a scalar: ``3/4``, ``-2``, ``1.5``, ``(1/2-3i)``, ``(2.0i)``."""
    x = normalize(x)
    if type(x) is mpq:
        return str(x)
    if isinstance(x, complex) and x.imag == 0:
        return repr(x.real)
    re_part, im_part = x.real, x.imag
    im_txt = _format_real(im_part)
    if re_part == 0:
        return f"({im_txt}i)"
    sign = "" if im_txt.startswith("-") else "+"
    return f"({_format_real(re_part)}{sign}{im_txt}i)"


_REAL = r"[-+]?(?:\d+(?:/\d+)?(?![.\deE])|(?:\d+\.\d*|\.\d+|\d+)(?:[eE][-+]?\d+)?|inf|nan)"
_REAL_RE = re.compile(rf"^{_REAL}$")
_COMPLEX_RE = re.compile(rf"^\((?:(?P<re>{_REAL})(?=[-+]))?(?P<im>{_REAL})i\)$")


def _parse_real(text: str):
    if "/" in text or re.fullmatch(r"[-+]?\d+", text):
        return mpq(text.lstrip("+"))
    return float(text)


def parse_scalar(text: str) -> Scalar:
    """Inverse of :func:`format_scalar`."""
    text = text.strip()
    if _REAL_RE.match(text):
        return normalize(_parse_real(text))
    m = _COMPLEX_RE.match(text)
    if not m:
        raise ValueError(f"cannot parse scalar {text!r}")
    im = _parse_real(m.group("im"))
    re_txt = m.group("re")
    re_val = _parse_real(re_txt) if re_txt is not None else None
    if isinstance(im, float) or isinstance(re_val, float):
        return complex(float(re_val or 0.0), float(im))
    return normalize(GaussianRational(re_val or 0, im))
