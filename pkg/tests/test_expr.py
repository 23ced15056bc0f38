import pytest
from gmpy2 import mpq
from hypothesis import given, strategies as st

from starfield.expr import (Add, Commutator, Environment, EvalError, Hbar, ModeRef, Neg, Num,
                            ParseError, Pi0, Poisson, Pow, Star, SymMul, Theta, ThetaW,
                            eval_source, parse, to_source, tokenize)
from starfield.fock import FockModel, guarded_deviation, theta, theta_wick
from starfield.kleingordon import KGConfig, ModeTable
from starfield.symalg import AlgebraElement, ModeSpace, PairingForm, poisson, star, sym_mul
from starfield.testkit import RandomStream, random_ast

u, v, w = ModeRef("u"), ModeRef("v"), ModeRef("w")
UVW = ModeSpace(("u", "v", "w"))
B = PairingForm(UVW, ((mpq(0), mpq(3, 2), mpq(1)),
                      (mpq(-1, 2), mpq(0), mpq(2)),
                      (mpq(0), mpq(-1), mpq(5))))
ENV = Environment(UVW, B)


def gen(label):
    return AlgebraElement.generator(UVW, label)


# -- parser ---------------------------------------------------------------------------

def test_examples():
    assert parse("u . v + hbar") == Add(SymMul(u, v), Hbar())
    assert parse("poisson(u, v)") == Poisson(u, v)
    with pytest.raises(ParseError) as err:
        parse("u *")
    assert err.value.offset == 3


GOLDEN = [
    ("a * b . c", Star(ModeRef("a"), SymMul(ModeRef("b"), ModeRef("c")))),
    ("a . b * c", Star(SymMul(ModeRef("a"), ModeRef("b")), ModeRef("c"))),
    ("a + b * c", Add(ModeRef("a"), Star(ModeRef("b"), ModeRef("c")))),
    ("a - b - c", Add(Add(ModeRef("a"), Neg(ModeRef("b"))), Neg(ModeRef("c")))),
    ("a * b * c", Star(Star(ModeRef("a"), ModeRef("b")), ModeRef("c"))),
    ("a . b . c", SymMul(SymMul(ModeRef("a"), ModeRef("b")), ModeRef("c"))),
    ("-a . b", SymMul(Neg(ModeRef("a")), ModeRef("b"))),
    ("-a^2", Neg(Pow(ModeRef("a"), 2))),
    ("a^2^3", Pow(Pow(ModeRef("a"), 2), 3)),
    ("(a + b)^2", Pow(Add(ModeRef("a"), ModeRef("b")), 2)),
    ("1/2 . a", SymMul(Num(mpq(1, 2)), ModeRef("a"))),
    ("--a", Neg(Neg(ModeRef("a")))),
    ("a * -b", Star(ModeRef("a"), Neg(ModeRef("b")))),
    ("hbar^2 . a", SymMul(Pow(Hbar(), 2), ModeRef("a"))),
    ("comm(a, b) + pi0(a)", Add(Commutator(ModeRef("a"), ModeRef("b")), Pi0(ModeRef("a")))),
    ("theta(a) * thetaW(b)", Star(Theta(ModeRef("a")), ThetaW(ModeRef("b")))),
    ("  a*b.c  ", Star(ModeRef("a"), SymMul(ModeRef("b"), ModeRef("c")))),
]


@pytest.mark.parametrize("src,tree", GOLDEN)
def test_golden_precedence(src, tree):
    assert parse(src) == tree


def test_random_round_trip():
    s = RandomStream(20240611)
    for _ in range(1000):
        tree = random_ast(s, ("u", "v", "w", "s0", "cc1"), 6)
        text = to_source(tree)
        assert parse(text) == tree
        assert to_source(parse(text)) == text


@given(st.integers(0, 2**63))
def test_round_trip_any_seed(seed):
    tree = random_ast(RandomStream(seed), ("u", "v"), 6)
    assert parse(to_source(tree)) == tree


def test_printer_minimal_parentheses():
    assert to_source(parse("(a . b) * c")) == "a . b * c"
    assert to_source(parse("a * (b * c)")) == "a * (b * c)"
    assert to_source(parse("(1/2)^2")) == "(1/2)^2"


@pytest.mark.parametrize("src,offset", [("u *", 3), ("(u", 2), ("u + + ", 4), ("u $ v", 2),
                                        ("poisson(u)", 9), ("3/0", 2), ("", 0), ("u v", 2)])
def test_error_offsets(src, offset):
    with pytest.raises(ParseError) as err:
        parse(src)
    assert err.value.offset == offset


def test_offsets_are_utf8_bytes():
    # a no-break space is whitespace but takes two bytes
    with pytest.raises(ParseError) as err:
        parse("\u00a0u *")
    assert err.value.offset == 5
    with pytest.raises(ParseError) as err:
        parse("u + ü")
    assert err.value.offset == 4
    assert tokenize("(u)")[-1].offset == 3


def test_expected_set_and_unknown_function():
    with pytest.raises(ParseError) as err:
        parse("u *")
    assert "label" in err.value.expected and "(" in err.value.expected
    with pytest.raises(ParseError) as err:
        parse("foo(u)")
    assert "unknown function" in str(err.value)
    assert "theta" in err.value.expected


def test_num_is_nonnegative():
    with pytest.raises(ValueError):
        Num(mpq(-1))
    assert parse("-3") == Neg(Num(mpq(3)))


# -- evaluation -------------------------------------------------------------------------

def test_star_delegates():
    assert eval_source("u * v", ENV) == star(B, gen("u"), gen("v"))
    assert eval_source("u * v", ENV) == sym_mul(gen("u"), gen("v")) + AlgebraElement.hbar(UVW).scale(mpq(3, 2))


def test_pi0_of_commutator_is_zero():
    assert eval_source("pi0(comm(u,v))", ENV).is_zero()
    assert eval_source("pi0(comm(u . w, v^2))", ENV).is_zero()


def test_arithmetic():
    assert eval_source("u - u", ENV).is_zero()
    assert eval_source("(u + v)^2", ENV) == eval_source("u^2 + 2 . u . v + v^2", ENV)
    assert eval_source("poisson(u, v)", ENV) == poisson(B, gen("u"), gen("v"))
    assert eval_source("u^0", ENV) == AlgebraElement.one(UVW)


def test_unbound_label_and_missing_model():
    with pytest.raises(EvalError, match="unbound"):
        eval_source("z", ENV)
    with pytest.raises(EvalError):
        eval_source("theta(u)", ENV)


@pytest.fixture(scope="module")
def fock_env():
    model = FockModel(ModeTable.default(KGConfig()), 4)
    return Environment(model.table.space, model.sigma, model, {"sigma": model.sigma, "wick": model.wick})


def test_theta_delegates(fock_env):
    model = fock_env.model
    a = AlgebraElement.generator(model.table.space, "s0")
    b = AlgebraElement.generator(model.table.space, "cc1")
    got = eval_source("theta(s0 . cc1) ", fock_env)
    assert guarded_deviation(got, theta(sym_mul(a, b), model)) == 0
    got = eval_source("thetaW(s0)", fock_env)
    assert guarded_deviation(got, theta_wick(a, model)) == 0


def test_operator_products(fock_env):
    prod = eval_source("theta(s0) * theta(c0)", fock_env)
    model = fock_env.model
    a = AlgebraElement.generator(model.table.space, "s0")
    b = AlgebraElement.generator(model.table.space, "c0")
    assert guarded_deviation(prod, theta(a, model) @ theta(b, model)) == 0
    assert not eval_source("comm(theta(s0), theta(c0))", fock_env).is_zero()


def test_kind_mismatch(fock_env):
    for src in ("theta(s0) + s0", "theta(s0) * c0", "theta(s0) . theta(c0)",
                "poisson(theta(s0), c0)", "theta(theta(s0))", "theta(s0)^2"):
        with pytest.raises(EvalError):
            eval_source(src, fock_env)


def test_evaluation_is_repeatable():
    s = RandomStream(9)
    for _ in range(50):
        tree = random_ast(s, ("u", "v", "w"), 4)
        try:
            first = eval_source(to_source(tree), ENV)
        except EvalError:
            continue
        assert eval_source(to_source(tree), ENV) == first
