import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from starfield.fock import (PHI, PI, Factor, FockModel, FockOperator, FockSpace, GuardError,
                            OperatorWord, a_minus, a_minus_star, commutator, field_ops,
                            guarded_deviation, ladder, ladder_commutator_scalar, theta, theta_wick,
                            vacuum_contraction, verify_ordering_theorem, wick_normal_form)
from starfield.kleingordon import (DomainError, KGConfig, ModeTable, cauchy_data, circle_integral,
                                   wick_coefficients)
from starfield.symalg import AlgebraElement, star, sym_mul
from starfield.testkit import RandomStream, random_element, random_real_fourier, random_word

CFG = KGConfig(mass=1.0, L=2 * math.pi, kmax=1)
TABLE = ModeTable.default(CFG)
MODEL = FockModel(TABLE, 6)
SPACE = MODEL.space
gen = TABLE.generator


# -- space and ladders -------------------------------------------------------------

@pytest.mark.parametrize("modes, ncap", [(1, 0), (1, 5), (3, 4), (4, 3)])
def test_basis(modes, ncap):
    sp = FockSpace(modes, ncap)
    assert sp.dim == math.comb(modes + ncap, ncap)
    assert len(set(sp.basis)) == sp.dim
    totals = [sum(o) for o in sp.basis]
    assert totals == sorted(totals)
    for d in range(ncap + 1):
        g = sp.guard_dim(d)
        assert g == sum(t <= ncap - d for t in totals)
        assert all(t <= ncap - d for t in totals[:g])
    assert sp.guard_dim(ncap + 1) == 0


def test_single_mode_ladder():
    sp = FockSpace(1, 4)
    low, high = a_minus([1], sp), a_minus_star([1], sp)
    assert np.allclose(low.dense() @ sp.state([1]), sp.state([0]))
    assert np.allclose(high.dense() @ sp.state([0]), sp.state([1]))
    assert np.allclose(low.dense() @ sp.vacuum(), 0)
    assert sp.state([2]) @ high.dense() @ sp.state([1]) == pytest.approx(math.sqrt(2))


def test_single_mode_matches_oscillator_matrices():
    sp = FockSpace(1, 5)
    ref = np.diag(np.sqrt(np.arange(1, 6)), k=1)
    assert np.allclose(a_minus([1], sp).dense(), ref)
    assert np.allclose(a_minus_star([1], sp).dense(), ref.T)


def test_length_mismatch():
    with pytest.raises(ValueError):
        a_minus([1, 2], FockSpace(3, 2))


def test_ladder_commutator_unit_mode():
    sp = FockSpace(1, 6, [1.0])
    a, ad = ladder([1], sp)
    assert guarded_deviation(commutator(a, ad), FockOperator.identity(sp), 2) <= 1e-12


def test_ladder_lowering_commute():
    s = RandomStream(3)
    f = np.array([complex(s.uniform(), s.uniform()) for _ in range(3)])
    g = np.array([complex(s.uniform(), s.uniform()) for _ in range(3)])
    a_f, _ = ladder(f, SPACE)
    a_g, _ = ladder(g, SPACE)
    assert guarded_deviation(commutator(a_f, a_g), FockOperator.zero(SPACE), 2) <= 1e-12


def test_ladder_mu_scaling():
    values = []
    for m in (1.0, 2.0):
        sp = FockSpace.from_config(KGConfig(mass=m, kmax=0), 4)
        a, ad = ladder([1], sp)
        values.append(commutator(a, ad).guarded(2)[0, 0])
        assert ladder_commutator_scalar([1], [1], sp) == pytest.approx(m)
    assert values[1] == pytest.approx(2 * values[0])


@given(st.integers(0, 2 ** 32))
def test_ladder_commutator_scalar_property(seed):
    s = RandomStream(seed)
    f = np.array([complex(s.uniform(-1, 1), s.uniform(-1, 1)) for _ in range(3)])
    g = np.array([complex(s.uniform(-1, 1), s.uniform(-1, 1)) for _ in range(3)])
    a, _ = ladder(f, SPACE)
    _, ad = ladder(g, SPACE)
    expected = FockOperator.identity(SPACE) * ladder_commutator_scalar(f, g, SPACE)
    assert guarded_deviation(commutator(a, ad), expected, 2) <= 1e-10


# -- field operators -------------------------------------------------------------------

def test_same_kind_commute():
    s = RandomStream(11)
    f, g = random_real_fourier(s, 1), random_real_fourier(s, 1)
    (phi_f, pi_f), (phi_g, pi_g) = field_ops(f, SPACE), field_ops(g, SPACE)
    zero = FockOperator.zero(SPACE)
    assert guarded_deviation(commutator(phi_f, phi_g), zero, 2) <= 1e-12
    assert guarded_deviation(commutator(pi_f, pi_g), zero, 2) <= 1e-12


def test_ccr_constant_functions():
    one = np.array([0, math.sqrt(CFG.L), 0], dtype=complex)
    phi, _ = field_ops(one, SPACE)
    _, pi = field_ops(one, SPACE)
    expected = FockOperator.identity(SPACE) * (2j * math.pi)
    assert guarded_deviation(commutator(phi, pi), expected, 2) <= 1e-10


@given(st.integers(0, 2 ** 32))
def test_ccr_random(seed):
    s = RandomStream(seed)
    f, g = random_real_fourier(s, 1), random_real_fourier(s, 1)
    phi, _ = field_ops(f, SPACE)
    _, pi = field_ops(g, SPACE)
    expected = FockOperator.identity(SPACE) * (1j * circle_integral(f, g))
    assert guarded_deviation(commutator(phi, pi), expected, 2) <= 1e-10


def test_field_ops_hermitian():
    f = random_real_fourier(RandomStream(5), 1)
    for op in field_ops(f, SPACE):
        m = op.dense()
        assert np.allclose(m, m.conj().T, atol=1e-14)


def test_field_ops_reject_complex_function():
    with pytest.raises(DomainError):
        field_ops(np.array([0, 1j, 0]), SPACE)


# -- orderings --------------------------------------------------------------------------

def _pi_phi(label):
    d = cauchy_data(TABLE.mode(label), CFG)
    return field_ops(d.value_at_0, SPACE)[1], field_ops(d.tderiv_at_0, SPACE)[0]


def _dense_theta(labels):
    """Subset formula written out directly, factors in the order given.

    Momentum factors fail to commute near the cap, so only the guarded block
    is comparable with the recursive construction.
    """
    out = np.zeros((SPACE.dim, SPACE.dim), dtype=complex)
    ops = [_pi_phi(lab) for lab in labels]
    for mask in itertools.product((0, 1), repeat=len(labels)):
        left = np.eye(SPACE.dim, dtype=complex)
        right = np.eye(SPACE.dim, dtype=complex)
        for (pi, phi), chosen in zip(ops, mask):
            if chosen:
                left = left @ pi.dense()
            else:
                right = right @ phi.dense()
        out += (-1) ** sum(mask) * (left @ right)
    return out


def _dense_theta_w(labels):
    out = np.zeros((SPACE.dim, SPACE.dim), dtype=complex)
    ops = []
    for lab in labels:
        F, G = wick_coefficients(TABLE.mode(lab), CFG)
        ops.append((ladder(G, SPACE)[1].dense(), ladder(F, SPACE)[0].dense()))
    for mask in itertools.product((0, 1), repeat=len(labels)):
        left = np.eye(SPACE.dim, dtype=complex)
        right = np.eye(SPACE.dim, dtype=complex)
        for (create, annihilate), chosen in zip(ops, mask):
            if chosen:
                left = left @ create
            else:
                right = right @ annihilate
        out += left @ right
    return out


def test_theta_unit_and_hbar():
    one = AlgebraElement.one(TABLE.space)
    assert np.array_equal(theta(one, MODEL).dense(), np.eye(SPACE.dim))
    c = AlgebraElement.constant(TABLE.space, 3, 1)
    assert np.allclose(theta(c, MODEL).dense(), -3j * np.eye(SPACE.dim))


def test_theta_generator():
    for label in ("s0", "c0", "cs1", "ssm1"):
        pi, phi = _pi_phi(label)
        assert np.allclose(theta(gen(label), MODEL).dense(), phi.dense() - pi.dense(), atol=1e-13)


@pytest.mark.parametrize("labels", [("s0", "c0"), ("cs1", "cs1"), ("c0", "sc1", "ss1")])
def test_theta_monomial_subset_formula(labels):
    mono = AlgebraElement.one(TABLE.space)
    for lab in labels:
        mono = sym_mul(mono, gen(lab))
    g = SPACE.guard_dim(len(labels))
    assert np.allclose(theta(mono, MODEL).dense()[:g, :g], _dense_theta(labels)[:g, :g], atol=1e-12)


def test_theta_wick_unit_and_hbar():
    one = AlgebraElement.one(TABLE.space)
    assert np.array_equal(theta_wick(one, MODEL).dense(), np.eye(SPACE.dim))
    assert np.array_equal(theta_wick(AlgebraElement.hbar(TABLE.space), MODEL).dense(), np.eye(SPACE.dim))


@pytest.mark.parametrize("labels", [("s0",), ("cc1",), ("s0", "c0"), ("cs1", "csm1", "sc1")])
def test_theta_wick_subset_formula(labels):
    mono = AlgebraElement.one(TABLE.space)
    for lab in labels:
        mono = sym_mul(mono, gen(lab))
    g = SPACE.guard_dim(len(labels))
    assert np.allclose(theta_wick(mono, MODEL).dense()[:g, :g], _dense_theta_w(labels)[:g, :g], atol=1e-12)


def test_theta_wick_vacuum_expectation_of_product_vanishes():
    v = SPACE.vacuum()
    for p in TABLE.space.labels:
        for q in TABLE.space.labels:
            op = theta_wick(sym_mul(gen(p), gen(q)), MODEL).dense()
            assert abs(v.conj() @ op @ v) <= 1e-14


def test_vacuum_contraction_equals_wick_pairing():
    W = MODEL.wick
    for p in TABLE.space.labels:
        for q in TABLE.space.labels:
            assert abs(vacuum_contraction(p, q, MODEL) - complex(W(p, q))) <= 1e-12
    assert vacuum_contraction("s0", "c0", MODEL) == pytest.approx(1j * math.pi)


# -- Wick rewriting ----------------------------------------------------------------------------

def test_wick_phi_pi():
    s = RandomStream(2)
    f, g = random_real_fourier(s, 1), random_real_fourier(s, 1)
    words = wick_normal_form(OperatorWord(1, (Factor(PHI, f),)), OperatorWord(1, (Factor(PI, g),)))
    by_len = {len(w.factors): w for w in words}
    assert set(by_len) == {0, 2}
    assert by_len[0].coefficient == pytest.approx(1j * circle_integral(f, g))
    assert [fac.kind for fac in by_len[2].factors] == [PI, PHI]
    assert by_len[2].coefficient == 1


def test_wick_pi_pi_no_contraction():
    s = RandomStream(4)
    left = OperatorWord(1, (Factor(PI, random_real_fourier(s, 1)),))
    right = OperatorWord(1, (Factor(PI, random_real_fourier(s, 1)),))
    words = wick_normal_form(left, right)
    assert len(words) == 1 and words[0].factors == left.factors + right.factors


def test_wick_rejects_unordered_word():
    f = random_real_fourier(RandomStream(1), 1)
    bad = OperatorWord(1, (Factor(PHI, f), Factor(PI, f)))
    with pytest.raises(DomainError):
        wick_normal_form(bad, OperatorWord())


@settings(max_examples=25)
@given(st.integers(0, 2 ** 32))
def test_wick_rewrite_matches_product(seed):
    s = RandomStream(seed)
    left, right = random_word(s, 1, 1, 1), random_word(s, 1, 1, 1)
    direct = left.matrix(SPACE) @ right.matrix(SPACE)
    rewritten = FockOperator.zero(SPACE)
    for w in wick_normal_form(left, right):
        rewritten = rewritten + w.matrix(SPACE)
    assert guarded_deviation(direct, rewritten, 4) <= 1e-10


def test_empty_word_is_identity():
    assert np.array_equal(OperatorWord().matrix(SPACE).dense(), np.eye(SPACE.dim))


# -- ordering theorems ---------------------------------------------------------------------------

def test_verify_units():
    one = AlgebraElement.one(TABLE.space)
    for which in ("hbar", "wick"):
        assert verify_ordering_theorem(one, one, MODEL, which).max_abs_dev == 0


@pytest.mark.parametrize("which", ["hbar", "wick"])
def test_verify_generators_k0(which):
    for p in ("s0", "c0"):
        for q in ("s0", "c0"):
            assert verify_ordering_theorem(gen(p), gen(q), MODEL, which).max_abs_dev <= 1e-9


@pytest.mark.parametrize("which", ["hbar", "wick"])
def test_verify_square_times_generator(which):
    rep = verify_ordering_theorem(sym_mul(gen("s0"), gen("s0")), gen("c0"), MODEL, which)
    assert rep.max_abs_dev <= 1e-9
    assert rep.line().split("\t")[:4] == ["ordre" if which == "hbar" else "wick", "2", "1", "6"]
    assert rep.guard_dim == SPACE.guard_dim(3)


def test_verify_guard():
    x = sym_mul(gen("s0"), sym_mul(gen("c0"), gen("cs1")))
    small = FockModel(TABLE, 5)
    with pytest.raises(GuardError):
        verify_ordering_theorem(x, x, small)


def test_wrong_sign_of_hbar_is_detected():
    # the comparison is sensitive: a product with a contraction needs Theta(hbar) = -i
    rep = verify_ordering_theorem(gen("s0"), gen("c0"), MODEL)
    lhs = theta(gen("s0"), MODEL) @ theta(gen("c0"), MODEL)
    rhs_flipped = theta(sym_mul(gen("s0"), gen("c0")), MODEL) + FockOperator.identity(SPACE) * (1j * 2 * math.pi)
    assert rep.max_abs_dev <= 1e-12
    assert guarded_deviation(lhs, rhs_flipped, 2) > 1


def test_truncation_monotonic():
    s = RandomStream(99)
    A = random_element(s, TABLE.space, 2, 1)
    B = random_element(s, TABLE.space, 2, 1)
    big = FockModel(TABLE, 8)
    for which, quant in (("hbar", theta), ("wick", theta_wick)):
        small_dev = verify_ordering_theorem(A, B, MODEL, which).max_abs_dev
        form = big.sigma if which == "hbar" else big.wick
        lhs = quant(A, big) @ quant(B, big)
        rhs = quant(star(form, A.to_complex(), B.to_complex()), big)
        g = SPACE.guard_dim(A.degree() + B.degree())
        restricted = np.max(np.abs((lhs.matrix - rhs.matrix)[:g, :g].toarray()))
        assert restricted <= small_dev + 1e-12


def test_formal_degree_adds():
    a, ad = ladder([1, 0, 0], SPACE)
    assert (a @ ad @ a).formal_degree == 3
    assert (a + a @ ad).formal_degree == 2
