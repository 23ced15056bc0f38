"""Seeded invariant suites behind ``check``.

Every suite draws from its own substream of the run seed, so a suite's
report does not depend on which other suites ran before it.  Each suite
returns report lines (tab-separated) and an overall pass flag.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Dict, List, Tuple

import numpy as np

from .fock import (FockModel, FockOperator, FockSpace, GuardError, commutator as op_commutator,
                   field_ops, guarded_deviation, ladder, ladder_commutator_scalar, theta_wick,
                   verify_ordering_theorem, wick_normal_form)
from .kleingordon import KGConfig, ModeTable, circle_integral
from .symalg import (AlgebraElement, ConsistencyError, ModeSpace, commutator,
                     divide_by_hbar, lemma1_check, poisson, project_pi, star, star_iterated,
                     sym_mul)
from .symalg.scalars import I
from .testkit import (RandomStream, injection_oracle, random_element, random_pairing,
                      random_real_fourier, random_word, relative_deviation)

SUITES = ("assoc", "poisson", "lemma1", "ccr", "ordre", "wick")

# algebraic family: five modes, element degree <= 4 with each exponent <= 2,
# at most one power of hbar
ALGEBRA_MODES = ModeSpace(("u", "v", "w", "x", "y"))
ALGEBRA_DEGREE = 4
ALGEBRA_EXPONENT = 2
JACOBI_DEGREE = 3
THREE_WAY_SPACE = ModeSpace(("u", "v", "w"))
THREE_WAY_DEGREE = 4
CCR_DEGREE = 2
WICK_WORD_DEGREE = 4


@dataclass(frozen=True)
class SuiteConfig:
    mass: float = 1.0
    L: float = 2 * math.pi
    kmax: int = 1
    Ncap: int = 6
    tolerance: float = 1e-10
    trials: int = 100
    seed: int = 42
    max_degree: int = 2

    @property
    def kg(self) -> KGConfig:
        return KGConfig(mass=self.mass, L=self.L, kmax=self.kmax)


@dataclass
class SuiteResult:
    lines: List[str]
    passed: bool


def summary(name: str, ok: int, total: int, detail: str) -> str:
    return f"{name}\t{'PASS' if ok == total else 'FAIL'}\t{ok}/{total}\t{detail}"


def _dev_detail(dev: float) -> str:
    return f"max_dev={dev:.3e}"


def guard_requirement(suite: str, cfg: SuiteConfig) -> int:
    """Smallest Ncap a suite can run at; 0 for the purely algebraic suites."""
    if suite == "ccr":
        return max(CCR_DEGREE, cfg.max_degree)
    if suite in ("ordre", "wick"):
        return 2 * cfg.max_degree
    return 0


def check_guard(suites, cfg: SuiteConfig):
    for s in suites:
        need = guard_requirement(s, cfg)
        if cfg.Ncap < need:
            raise GuardError(f"suite {s} needs Ncap >= {need} for max_degree {cfg.max_degree}, "
                             f"got Ncap={cfg.Ncap}")


def _stream(cfg: SuiteConfig, suite: str) -> RandomStream:
    return RandomStream(cfg.seed).split(SUITES.index(suite))


# -- algebraic suites ----------------------------------------------------------------

def random_triple(s: RandomStream, degree: int):
    B = random_pairing(s, ALGEBRA_MODES)
    elems = [random_element(s, ALGEBRA_MODES, degree, 1, max_exponent=ALGEBRA_EXPONENT)
             for _ in range(3)]
    return B, elems


def suite_assoc(cfg: SuiteConfig) -> SuiteResult:
    """Associativity on random triples, plus three-way star agreement on all small monomial pairs.

    The three-way check visits every pair of monomials of degree at most 4
    over three modes.
    """
    root = _stream(cfg, "assoc")
    ok = 0
    for t in range(cfg.trials):
        B, (a, b, c) = random_triple(root.split(t), ALGEBRA_DEGREE)
        ok += star(B, a, star(B, b, c)) == star(B, star(B, a, b), c)
    lines = [summary("assoc", ok, cfg.trials, "exact")]

    B = random_pairing(root.split(cfg.trials), THREE_WAY_SPACE)
    monos = all_monomials(THREE_WAY_SPACE.n, THREE_WAY_DEGREE)
    agree = total = 0
    for ma in monos:
        for mb in monos:
            a = AlgebraElement.monomial(THREE_WAY_SPACE, ma)
            b = AlgebraElement.monomial(THREE_WAY_SPACE, mb)
            closed = star(B, a, b)
            total += 1
            agree += closed == star_iterated(B, a, b) == injection_oracle(B, ma, mb)
    lines.append(summary("star3", agree, total, "exact"))
    return SuiteResult(lines, agree == total and ok == cfg.trials)


def all_monomials(n: int, max_degree: int) -> List[Tuple[int, ...]]:
    out = []

    def rec(prefix, left):
        if len(prefix) == n:
            out.append(tuple(prefix))
            return
        for e in range(left + 1):
            rec(prefix + [e], left - e)

    rec([], max_degree)
    return out


def suite_poisson(cfg: SuiteConfig) -> SuiteResult:
    """Deformation, bracket correspondence, Jacobi and Leibniz, all exact."""
    root = _stream(cfg, "poisson")
    counts = {"deform": 0, "correspondence": 0, "jacobi": 0, "leibniz": 0}
    for t in range(cfg.trials):
        s = root.split(t)
        B, (a, b, c) = random_triple(s, ALGEBRA_DEGREE)
        counts["deform"] += project_pi(star(B, a, b)) == sym_mul(project_pi(a), project_pi(b))
        try:
            poisson(B, a, b, check=True)
            counts["correspondence"] += 1
        except ConsistencyError:
            pass
        x, y, z = (random_element(s, ALGEBRA_MODES, JACOBI_DEGREE, 1) for _ in range(3))
        jac = (poisson(B, x, poisson(B, y, z)) + poisson(B, y, poisson(B, z, x))
               + poisson(B, z, poisson(B, x, y)))
        counts["jacobi"] += jac.is_zero()
        leib = poisson(B, a, sym_mul(b, c)) - sym_mul(poisson(B, a, b), c) - sym_mul(b, poisson(B, a, c))
        counts["leibniz"] += leib.is_zero()
    lines = [summary(f"poisson.{k}" if k != "deform" else "deform", v, cfg.trials, "exact")
             for k, v in counts.items()]
    return SuiteResult(lines, all(v == cfg.trials for v in counts.values()))


def suite_lemma1(cfg: SuiteConfig) -> SuiteResult:
    root = _stream(cfg, "lemma1")
    ok = 0
    for t in range(cfg.trials):
        s = root.split(t)
        k = s.randint(1, 3)
        z = [s.choice(ALGEBRA_MODES.labels) for _ in range(k)]
        a = random_element(s, ALGEBRA_MODES, ALGEBRA_DEGREE, 1, max_exponent=ALGEBRA_EXPONENT)
        b = random_element(s, ALGEBRA_MODES, ALGEBRA_DEGREE, 1, max_exponent=ALGEBRA_EXPONENT)
        ok += lemma1_check(k, z, a, b)
    return SuiteResult([summary("lemma1", ok, cfg.trials, "exact")], ok == cfg.trials)


# -- Fock suites --------------------------------------------------------------------------

def real_basis(kmax: int) -> List[np.ndarray]:
    """Fourier data of ``1, cos(kx), sin(kx)`` for ``1 <= k <= kmax`` (unnormalized)."""
    n = 2 * kmax + 1
    out = []
    for k in range(kmax + 1):
        c = np.zeros(n, dtype=complex)
        c[kmax + k] += 0.5
        c[kmax - k] += 0.5
        out.append(c)
        if k:
            s = np.zeros(n, dtype=complex)
            s[kmax + k] = -0.5j
            s[kmax - k] = 0.5j
            out.append(s)
    return out


def ccr_deviation(f, g, space: FockSpace) -> float:
    phi, _ = field_ops(f, space)
    _, pi = field_ops(g, space)
    expected = FockOperator.identity(space) * (1j * circle_integral(f, g))
    return guarded_deviation(op_commutator(phi, pi), expected, CCR_DEGREE)


def ladder_deviation(f, g, space: FockSpace) -> float:
    a, _ = ladder(f, space)
    _, ad = ladder(g, space)
    expected = FockOperator.identity(space) * ladder_commutator_scalar(f, g, space)
    return guarded_deviation(op_commutator(a, ad), expected, CCR_DEGREE)


def suite_ccr(cfg: SuiteConfig) -> SuiteResult:
    space = FockSpace.from_config(cfg.kg, cfg.Ncap)
    root = _stream(cfg, "ccr")
    basis = real_basis(cfg.kmax)
    pairs = [(f, g) for f in basis for g in basis]
    for t in range(cfg.trials):
        s = root.split(t)
        pairs.append((random_real_fourier(s, cfg.kmax), random_real_fourier(s, cfg.kmax)))
    devs = [ccr_deviation(f, g, space) for f, g in pairs]
    n = space.mode_count
    units = [np.eye(n, dtype=complex)[i] for i in range(n)]
    ldevs = [ladder_deviation(f, g, space) for f in units for g in units]
    lines = [summary("ccr", sum(d <= cfg.tolerance for d in devs), len(devs), _dev_detail(max(devs))),
             summary("ccr.ladder", sum(d <= cfg.tolerance for d in ldevs), len(ldevs),
                     _dev_detail(max(ldevs)))]
    return SuiteResult(lines, all(d <= cfg.tolerance for d in devs + ldevs))


def _ordering_suite(cfg: SuiteConfig, which: str, name: str) -> Tuple[List[str], bool, FockModel]:
    table = ModeTable.default(cfg.kg)
    model = FockModel(table, cfg.Ncap)
    root = _stream(cfg, name)
    lines = []
    worst = 0.0
    ok = 0
    for t in range(cfg.trials):
        s = root.split(t)
        A = random_element(s, table.space, cfg.max_degree, 1)
        B = random_element(s, table.space, cfg.max_degree, 1)
        rep = verify_ordering_theorem(A, B, model, which)
        lines.append(rep.line())
        worst = max(worst, rep.max_abs_dev)
        ok += rep.passed(cfg.tolerance)
    lines.append(summary(name, ok, cfg.trials, _dev_detail(worst)))
    return lines, ok == cfg.trials, model


def suite_ordre(cfg: SuiteConfig) -> SuiteResult:
    lines, passed, _ = _ordering_suite(cfg, "hbar", "ordre")
    return SuiteResult(lines, passed)


def wick_lemma_deviation(left, right, space: FockSpace) -> float:
    direct = left.matrix(space) @ right.matrix(space)
    rewritten = FockOperator.zero(space)
    for w in wick_normal_form(left, right):
        rewritten = rewritten + w.matrix(space)
    degree = len(left.factors) + len(right.factors)
    return guarded_deviation(direct, rewritten, degree)


def random_word_pair(s: RandomStream, kmax: int, total: int):
    """Two momentum-left words whose combined length is at most ``total``."""
    sizes = [s.randint(0, 2) for _ in range(4)]
    while sum(sizes) > total:
        sizes[s.below(4)] = 0
    return random_word(s, kmax, sizes[0], sizes[1]), random_word(s, kmax, sizes[2], sizes[3])


def wickstar_deviations(table: ModeTable, model: FockModel, s: RandomStream, degree: int):
    """Associativity and the bracket property of the Wick star product, complex floats.

    The hbar-linear part of the Wick commutator, at hbar = 0, must be ``i``
    times the bracket of the hypersurface pairing.  Deviations are relative to the
    largest coefficient involved (at least 1).
    """
    W = model.wick
    a, b, c = (random_element(s, table.space, degree, 1).to_complex() for _ in range(3))
    assoc = relative_deviation(star(W, a, star(W, b, c)), star(W, star(W, a, b), c))
    lin = project_pi(divide_by_hbar(commutator(W, a, b)))
    bracket = project_pi(poisson(model.sigma, a, b)).scale(complex(I))
    return assoc, relative_deviation(lin, bracket)


def suite_wick(cfg: SuiteConfig) -> SuiteResult:
    lines, passed, model = _ordering_suite(cfg, "wick", "wick")
    space = model.space
    unit_dev = guarded_deviation(theta_wick(AlgebraElement.one(model.table.space), model),
                                 FockOperator.identity(space))
    lines.append(summary("wick.unit", int(unit_dev == 0), 1, _dev_detail(unit_dev)))
    passed &= unit_dev == 0

    root = _stream(cfg, "wick")
    lemma, assoc, bracket = [], [], []
    for t in range(cfg.trials):
        s = root.split(cfg.trials + t)
        left, right = random_word_pair(s, cfg.kmax, min(WICK_WORD_DEGREE, cfg.Ncap))
        lemma.append(wick_lemma_deviation(left, right, space))
        d1, d2 = wickstar_deviations(model.table, model, s, cfg.max_degree)
        assoc.append(d1)
        bracket.append(d2)
    for name, devs in (("wick.lemma", lemma), ("wick.assoc", assoc), ("wick.bracket", bracket)):
        good = sum(d <= cfg.tolerance for d in devs)
        lines.append(summary(name, good, len(devs), _dev_detail(max(devs))))
        passed &= good == len(devs)
    return SuiteResult(lines, passed)


RUNNERS: Dict[str, Callable[[SuiteConfig], SuiteResult]] = {
    "assoc": suite_assoc,
    "poisson": suite_poisson,
    "lemma1": suite_lemma1,
    "ccr": suite_ccr,
    "ordre": suite_ordre,
    "wick": suite_wick,
}


def run(suite: str, cfg: SuiteConfig) -> SuiteResult:
    """Run one suite or ``all``; raises :class:`GuardError` before any work if Ncap is too small."""
    names = SUITES if suite == "all" else (suite,)
    for name in names:
        if name not in RUNNERS:
            raise ValueError(f"unknown suite {suite!r}")
    check_guard(names, cfg)
    lines: List[str] = []
    passed = True
    for name in names:
        res = RUNNERS[name](cfg)
        lines.extend(res.lines)
        passed &= res.passed
    return SuiteResult(lines, passed)
