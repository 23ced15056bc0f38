import numpy as np
import pytest
from gmpy2 import mpq

from starfield.symalg import AlgebraElement, ModeSpace, PairingForm, star, star_iterated, sym_mul
from starfield.testkit import (ORACLE_MAX_DEGREE, RandomStream, injection_oracle, random_element,
                               random_monomial, random_pairing, relative_deviation, splitmix64)

UV = ModeSpace(("u", "v"))
B = PairingForm(UV, ((mpq(2), mpq(-3, 7)), (mpq(5), mpq(1, 3))))
u = AlgebraElement.generator(UV, "u")
v = AlgebraElement.generator(UV, "v")
hbar = AlgebraElement.hbar(UV)


def test_splitmix64_reference_value():
    # first output of the published splitmix64 generator started from state 0
    assert splitmix64(0) == 0xE220A8397B1DCDAF


def _xorshift_star_numpy(seed, count):
    """Independent xorshift64* written with numpy uint64 wraparound."""
    with np.errstate(over="ignore"):
        state = np.uint64(splitmix64(seed))
        out = []
        for _ in range(count):
            state ^= state >> np.uint64(12)
            state ^= state << np.uint64(25)
            state ^= state >> np.uint64(27)
            out.append(int(state * np.uint64(0x2545F4914F6CDD1D)))
    return out


def test_stream_matches_reference():
    s = RandomStream(42)
    got = [s.next_u64() for _ in range(50)]
    assert got == _xorshift_star_numpy(42, 50)
    assert got[:3] == [0x31B0ECE7C4F697A2, 0x9008A3B1CB686F03, 0x7C7173ABD97BE16F]
    assert s.position == 50


def test_below_and_randint_ranges():
    s = RandomStream(1)
    draws = [s.below(7) for _ in range(5000)]
    assert set(draws) == set(range(7))
    assert all(-3 <= s.randint(-3, 3) <= 3 for _ in range(1000))
    with pytest.raises(ValueError):
        s.below(0)


def test_split_is_deterministic_and_independent():
    a, b = RandomStream(5).split(3), RandomStream(5).split(3)
    assert [a.next_u64() for _ in range(5)] == [b.next_u64() for _ in range(5)]
    c = RandomStream(5).split(4)
    assert RandomStream(5).split(3).next_u64() != c.next_u64()
    # splitting does not depend on how far the parent has advanced
    parent = RandomStream(5)
    parent.next_u64()
    assert parent.split(3).next_u64() == RandomStream(5).split(3).next_u64()


def test_constant_when_degrees_zero():
    s = RandomStream(8)
    for _ in range(50):
        x = random_element(s, UV, 0, 0)
        assert x.degree() <= 0 and x.hbar_degree() <= 0


def test_same_seed_same_element():
    assert random_element(RandomStream(42), 5, 4, 1) == random_element(RandomStream(42), 5, 4, 1)


def test_degree_and_coefficient_bounds():
    s = RandomStream(2024)
    space = ModeSpace(tuple("abcde"))
    for _ in range(10_000):
        x = random_element(s, space, 3, 2)
        assert 1 <= len(x) <= 5
        assert x.degree() <= 3 and x.hbar_degree() <= 2
        for _, c in x.items():
            assert 1 <= abs(c.numerator) <= 9 and 1 <= c.denominator <= 9


def test_exponent_cap():
    s = RandomStream(3)
    for _ in range(500):
        assert max(random_monomial(s, 5, 4, max_exponent=2)) <= 2


def test_random_pairing_shape():
    P = random_pairing(RandomStream(0), UV)
    assert len(P.matrix) == 2 and all(len(r) == 2 for r in P.matrix)


def test_oracle_generators():
    assert injection_oracle(B, (1, 0), (0, 1)) == sym_mul(u, v) + hbar.scale(B("u", "v"))


def test_oracle_squares():
    Buv = B("u", "v")
    expected = (sym_mul(u ** 2, v ** 2) + sym_mul(u, v).times_hbar(1).scale(4 * Buv)
                + AlgebraElement.constant(UV, 2 * Buv ** 2, 2))
    assert injection_oracle(B, (2, 0), (0, 2)) == expected


def test_oracle_with_unit():
    assert injection_oracle(B, (1, 0), (0, 0)) == u


def test_oracle_cap():
    with pytest.raises(ValueError):
        injection_oracle(B, (5, 0), (0, ORACLE_MAX_DEGREE - 4))


def test_three_way_on_random_monomials():
    s = RandomStream(77)
    space = ModeSpace(("u", "v", "w"))
    P = random_pairing(s, space)
    for _ in range(200):
        ma, mb = random_monomial(s, 3, s.randint(0, 4)), random_monomial(s, 3, s.randint(0, 4))
        a, b = AlgebraElement.monomial(space, ma), AlgebraElement.monomial(space, mb)
        assert injection_oracle(P, ma, mb) == star(P, a, b) == star_iterated(P, a, b)


def test_relative_deviation():
    a = u.scale(100.0)
    b = u.scale(100.0 + 1e-8)
    assert relative_deviation(a, b) == pytest.approx(1e-10, rel=1e-3)
