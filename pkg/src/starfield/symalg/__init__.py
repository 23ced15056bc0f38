"""Graded symmetric algebra ``SV[hbar]`` with contraction star products."""

from .element import (AlgebraElement, DimensionError, HPoly, ModeSpace, contract,
                      divide_by_hbar, project_pi, sym_mul)
from .scalars import GaussianRational, I, format_scalar, parse_scalar
from .star import (ConsistencyError, PairingForm, commutator, lemma1_check, poisson, star,
                   star_iterated)
from .text import dumps, loads

__all__ = [
    "AlgebraElement", "ConsistencyError", "DimensionError", "GaussianRational", "HPoly", "I",
    "ModeSpace", "PairingForm", "commutator", "contract", "divide_by_hbar", "dumps",
    "format_scalar", "lemma1_check", "loads", "parse_scalar", "poisson", "project_pi",
    "star", "star_iterated", "sym_mul",
]
