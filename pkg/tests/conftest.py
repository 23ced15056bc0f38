"""Shared hypothesis strategies and settings."""

import os
import sys

from gmpy2 import mpq
from hypothesis import HealthCheck, settings, strategies as st

from starfield.symalg import AlgebraElement, GaussianRational, ModeSpace, PairingForm

settings.register_profile("default", deadline=None, max_examples=60, derandomize=True,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

UVW = ModeSpace(("u", "v", "w"))

small_ints = st.integers(-9, 9)
nonzero = st.integers(-9, 9).filter(bool)
rationals = st.builds(mpq, small_ints, nonzero)
gaussians = st.builds(GaussianRational, rationals, rationals)
exact_scalars = st.one_of(rationals, gaussians)


@st.composite
def elements(draw, space=UVW, max_degree=3, max_hbar=1, max_terms=4, scalars=rationals):
    data = {}
    for _ in range(draw(st.integers(0, max_terms))):
        exps = [0] * space.n
        for _ in range(draw(st.integers(0, max_degree))):
            exps[draw(st.integers(0, space.n - 1))] += 1
        data[(tuple(exps), draw(st.integers(0, max_hbar)))] = draw(scalars)
    return AlgebraElement(space, data)


@st.composite
def pairings(draw, space=UVW, scalars=rationals):
    n = space.n
    return PairingForm(space, tuple(tuple(draw(scalars) for _ in range(n)) for _ in range(n)))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.RESULTS:
        RESULTS = mod.RESULTS
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
