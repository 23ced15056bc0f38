"""Text form of algebra elements.

Each term prints as ``coeff * hbar^p * u^2*v``; the ``hbar`` factor is omitted
at ``p = 0`` and the monomial is omitted for constants.  Terms come in
canonical order, joined with `` + `` (or `` - `` for negative real
coefficients).  The zero element prints as ``0``.
"""

from __future__ import annotations

import re
from numbers import Rational

from .element import AlgebraElement, ModeSpace
from .scalars import format_scalar, normalize, parse_scalar


def _format_monomial(space: ModeSpace, mono) -> str:
    parts = []
    for label, e in zip(space.labels, mono):
        if e == 1:
            parts.append(label)
        elif e > 1:
            parts.append(f"{label}^{e}")
    return "*".join(parts)


def _is_negative_real(c) -> bool:
    c = normalize(c)
    if isinstance(c, Rational):
        return c < 0
    return isinstance(c, complex) and c.imag == 0 and c.real < 0


def dumps(a: AlgebraElement) -> str:
    pieces = []
    for (mono, p), c in a.items():
        neg = bool(pieces) and _is_negative_real(c)
        body = [format_scalar(-c if neg else c)]
        if p == 1:
            body.append("hbar")
        elif p > 1:
            body.append(f"hbar^{p}")
        if any(mono):
            body.append(_format_monomial(a.space, mono))
        term = " * ".join(body)
        if not pieces:
            pieces.append(term)
        else:
            pieces.append(("- " if neg else "+ ") + term)
    return " ".join(pieces) if pieces else "0"


_SPLIT = re.compile(r"\s+([+-])\s+")


def loads(text: str, space: ModeSpace) -> AlgebraElement:
    """Parse the output of :func:`dumps` back into an element over ``space``."""
    text = text.strip()
    if text == "0":
        return AlgebraElement.zero(space)
    tokens = _SPLIT.split(text)
    signs = ["+"] + tokens[1::2]
    terms = tokens[0::2]
    data = {}
    for sign, term in zip(signs, terms):
        fields = [f.strip() for f in term.split(" * ")]
        coeff = parse_scalar(fields[0])
        if sign == "-":
            coeff = -coeff
        p = 0
        exps = [0] * space.n
        for field in fields[1:]:
            if field == "hbar" or field.startswith("hbar^"):
                p = int(field[5:]) if "^" in field else 1
                continue
            for factor in field.split("*"):
                label, _, e = factor.partition("^")
                exps[space.index(label)] += int(e) if e else 1
        key = (tuple(exps), p)
        if key in data:
            raise ValueError(f"duplicate term {term!r}")
        data[key] = coeff
    return AlgebraElement(space, data)
