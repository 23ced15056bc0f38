"""A small expression language over named modes.

Grammar, lowest precedence first::

    sum     := star (('+' | '-') star)*
    star    := symmul ('*' symmul)*
    symmul  := unary ('.' unary)*
    unary   := '-' unary | postfix
    postfix := atom ('^' INT)*
    atom    := LABEL | INT ['/' INT] | 'hbar' | '(' sum ')'
             | ('poisson' | 'comm') '(' sum ',' sum ')'
             | ('theta' | 'thetaW' | 'pi0') '(' sum ')'

``*`` is the star product for the form bound in the environment and ``.`` is
the symmetric product.  ``.`` binds tighter, so ``a * b . c`` is
``a * (b . c)``.  Binary ``a - b`` is sugar for ``Add(a, Neg(b))``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Union

from gmpy2 import mpq

from .fock import FockModel, FockOperator, commutator as op_commutator, theta, theta_wick
from .symalg import (AlgebraElement, ModeSpace, PairingForm, commutator, poisson,
                     project_pi, star, sym_mul)

FUNCTIONS_2 = ("poisson", "comm")
FUNCTIONS_1 = ("theta", "thetaW", "pi0")


# -- AST -----------------------------------------------------------------------

@dataclass(frozen=True)
class ModeRef:
    label: str


@dataclass(frozen=True)
class Num:
    value: mpq

    def __post_init__(self):
        v = mpq(self.value)
        if v < 0:
            raise ValueError("Num holds a nonnegative rational; negate with Neg")
        object.__setattr__(self, "value", v)


@dataclass(frozen=True)
class Hbar:
    pass


@dataclass(frozen=True)
class Add:
    left: "Ast"
    right: "Ast"


@dataclass(frozen=True)
class Neg:
    operand: "Ast"


@dataclass(frozen=True)
class SymMul:
    left: "Ast"
    right: "Ast"


@dataclass(frozen=True)
class Star:
    left: "Ast"
    right: "Ast"
    form_name: Optional[str] = None


@dataclass(frozen=True)
class Pow:
    base: "Ast"
    exponent: int


@dataclass(frozen=True)
class Poisson:
    left: "Ast"
    right: "Ast"


@dataclass(frozen=True)
class Commutator:
    left: "Ast"
    right: "Ast"


@dataclass(frozen=True)
class Theta:
    operand: "Ast"


@dataclass(frozen=True)
class ThetaW:
    operand: "Ast"


@dataclass(frozen=True)
class Pi0:
    operand: "Ast"


Ast = Union[ModeRef, Num, Hbar, Add, Neg, SymMul, Star, Pow, Poisson, Commutator, Theta, ThetaW, Pi0]

_CALL_NODES = {"poisson": Poisson, "comm": Commutator, "theta": Theta, "thetaW": ThetaW, "pi0": Pi0}
_CALL_NAMES = {v: k for k, v in _CALL_NODES.items()}


# -- tokenizer -------------------------------------------------------------------

class ParseError(ValueError):
    """Syntax error at a byte offset of the UTF-8 source."""

    def __init__(self, message: str, offset: int, expected: FrozenSet[str] = frozenset()):
        self.offset = offset
        self.expected = frozenset(expected)
        detail = f" (expected one of: {', '.join(sorted(self.expected))})" if self.expected else ""
        super().__init__(f"{message} at offset {offset}{detail}")


@dataclass(frozen=True)
class Token:
    kind: str       # IDENT, INT, an operator character, or EOF
    text: str
    offset: int     # byte offset


_TOKEN_RE = re.compile(r"\s*(?:(?P<IDENT>[A-Za-z_][A-Za-z0-9_]*)|(?P<INT>\d+)|(?P<OP>[-+*.^/(),]))")


def tokenize(src: str) -> List[Token]:
    tokens = []
    pos = 0
    raw = src.encode("utf-8")

    def byte_offset(i):
        return len(src[:i].encode("utf-8"))

    while True:
        m = _TOKEN_RE.match(src, pos)
        if m is None:
            rest = src[pos:]
            stripped = rest.lstrip()
            at = pos + len(rest) - len(stripped)
            if not stripped:
                tokens.append(Token("EOF", "", len(raw)))
                return tokens
            raise ParseError(f"unexpected character {stripped[0]!r}", byte_offset(at))
        kind = m.lastgroup
        text = m.group(kind)
        tok_kind = text if kind == "OP" else kind
        tokens.append(Token(tok_kind, text, byte_offset(m.start(kind))))
        pos = m.end()


# -- parser ------------------------------------------------------------------------

_ATOM_START = frozenset({"label", "number", "hbar", "(", "-"} | set(_CALL_NODES))


class _Parser:
    def __init__(self, src: str):
        self.tokens = tokenize(src)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def advance(self) -> Token:
        t = self.tokens[self.i]
        self.i += 1
        return t

    def expect(self, kind: str) -> Token:
        if self.tok.kind != kind:
            self.fail({kind})
        return self.advance()

    def fail(self, expected):
        t = self.tok
        what = "end of input" if t.kind == "EOF" else repr(t.text)
        raise ParseError(f"unexpected {what}", t.offset, frozenset(expected))

    def parse(self) -> Ast:
        node = self.sum()
        if self.tok.kind != "EOF":
            self.fail({"+", "-", "*", ".", "^", "end of input"})
        return node

    def sum(self) -> Ast:
        node = self.star()
        while self.tok.kind in ("+", "-"):
            op = self.advance().kind
            rhs = self.star()
            node = Add(node, rhs if op == "+" else Neg(rhs))
        return node

    def star(self) -> Ast:
        node = self.symmul()
        while self.tok.kind == "*":
            self.advance()
            node = Star(node, self.symmul())
        return node

    def symmul(self) -> Ast:
        node = self.unary()
        while self.tok.kind == ".":
            self.advance()
            node = SymMul(node, self.unary())
        return node

    def unary(self) -> Ast:
        if self.tok.kind == "-":
            self.advance()
            return Neg(self.unary())
        return self.postfix()

    def postfix(self) -> Ast:
        node = self.atom()
        while self.tok.kind == "^":
            self.advance()
            node = Pow(node, int(self.expect("INT").text))
        return node

    def atom(self) -> Ast:
        t = self.tok
        if t.kind == "INT":
            self.advance()
            num = int(t.text)
            if self.tok.kind == "/":
                self.advance()
                den = self.expect("INT")
                if int(den.text) == 0:
                    raise ParseError("zero denominator", den.offset)
                return Num(mpq(num, int(den.text)))
            return Num(mpq(num))
        if t.kind == "(":
            self.advance()
            node = self.sum()
            self.expect(")")
            return node
        if t.kind == "IDENT":
            self.advance()
            if t.text == "hbar":
                return Hbar()
            if t.text in _CALL_NODES:
                self.expect("(")
                first = self.sum()
                if t.text in FUNCTIONS_2:
                    self.expect(",")
                    second = self.sum()
                    self.expect(")")
                    return _CALL_NODES[t.text](first, second)
                self.expect(")")
                return _CALL_NODES[t.text](first)
            if self.tok.kind == "(":
                raise ParseError(f"unknown function {t.text!r}", t.offset,
                                 frozenset(FUNCTIONS_1 + FUNCTIONS_2))
            return ModeRef(t.text)
        self.fail(_ATOM_START)


def parse(src: str) -> Ast:
    return _Parser(src).parse()


# -- printer -------------------------------------------------------------------------

# binding strength of each node when printed
_LEVEL = {Add: 1, Star: 2, SymMul: 3, Neg: 4, Pow: 5}
_ATOM_LEVEL = 6


def _level(node: Ast) -> int:
    if isinstance(node, Num) and node.value.denominator != 1:
        return 5    # "1/2^2" would read oddly; parenthesize fractions under ^
    return _LEVEL.get(type(node), _ATOM_LEVEL)


def to_source(node: Ast) -> str:
    """Print with the fewest parentheses that parse back to the same tree."""

    def wrap(child, min_level):
        s = to_source(child)
        return f"({s})" if _level(child) < min_level else s

    if isinstance(node, ModeRef):
        return node.label
    if isinstance(node, Num):
        return str(node.value)
    if isinstance(node, Hbar):
        return "hbar"
    if isinstance(node, Add):
        if isinstance(node.right, Neg):
            return f"{wrap(node.left, 1)} - {wrap(node.right.operand, 2)}"
        return f"{wrap(node.left, 1)} + {wrap(node.right, 2)}"
    if isinstance(node, Star):
        return f"{wrap(node.left, 2)} * {wrap(node.right, 3)}"
    if isinstance(node, SymMul):
        return f"{wrap(node.left, 3)} . {wrap(node.right, 4)}"
    if isinstance(node, Neg):
        return f"-{wrap(node.operand, 4)}"
    if isinstance(node, Pow):
        return f"{wrap(node.base, 6)}^{node.exponent}"
    name = _CALL_NAMES[type(node)]
    if isinstance(node, (Poisson, Commutator)):
        return f"{name}({to_source(node.left)}, {to_source(node.right)})"
    return f"{name}({to_source(node.operand)})"


# -- evaluation ------------------------------------------------------------------------

class EvalError(ValueError):
    """Unbound label or an operation applied to the wrong kind of value."""


@dataclass
class Environment:
    """Bindings for evaluation.

    ``form`` is used for ``*`` (and its commutator and bracket); ``forms`` holds
    named alternatives for ``Star`` nodes that carry a ``form_name``.  ``model``
    is needed only for ``theta`` and ``thetaW``.
    """

    space: ModeSpace
    form: PairingForm
    model: Optional[FockModel] = None
    forms: Dict[str, PairingForm] = field(default_factory=dict)


Value = Union[AlgebraElement, FockOperator]


def _need_element(v, what):
    if not isinstance(v, AlgebraElement):
        raise EvalError(f"{what} needs an algebra element, got an operator")
    return v


def _same_kind(a, b, what):
    if type(a) is not type(b):
        raise EvalError(f"{what} mixes an algebra element with an operator")


def evaluate(node: Ast, env: Environment) -> Value:
    ev = lambda n: evaluate(n, env)  # noqa: E731
    if isinstance(node, ModeRef):
        if node.label not in env.space:
            raise EvalError(f"unbound label {node.label!r}")
        return AlgebraElement.generator(env.space, node.label)
    if isinstance(node, Num):
        return AlgebraElement.constant(env.space, node.value)
    if isinstance(node, Hbar):
        return AlgebraElement.hbar(env.space)
    if isinstance(node, Add):
        a, b = ev(node.left), ev(node.right)
        _same_kind(a, b, "+")
        return a + b
    if isinstance(node, Neg):
        return -ev(node.operand)
    if isinstance(node, SymMul):
        return sym_mul(_need_element(ev(node.left), "."), _need_element(ev(node.right), "."))
    if isinstance(node, Pow):
        return _need_element(ev(node.base), "^") ** node.exponent
    if isinstance(node, Star):
        a, b = ev(node.left), ev(node.right)
        _same_kind(a, b, "*")
        if isinstance(a, FockOperator):
            return a @ b
        return star(_form(node.form_name, env), a, b)
    if isinstance(node, Commutator):
        a, b = ev(node.left), ev(node.right)
        _same_kind(a, b, "comm")
        if isinstance(a, FockOperator):
            return op_commutator(a, b)
        return commutator(env.form, a, b)
    if isinstance(node, Poisson):
        return poisson(env.form, _need_element(ev(node.left), "poisson"),
                       _need_element(ev(node.right), "poisson"))
    if isinstance(node, Pi0):
        return project_pi(_need_element(ev(node.operand), "pi0"))
    if isinstance(node, (Theta, ThetaW)):
        if env.model is None:
            raise EvalError("theta needs a Fock model in the environment")
        a = _need_element(ev(node.operand), "theta")
        return (theta if isinstance(node, Theta) else theta_wick)(a, env.model)
    raise EvalError(f"unknown node {type(node).__name__}")


def _form(name, env: Environment) -> PairingForm:
    if name is None:
        return env.form
    try:
        return env.forms[name]
    except KeyError:
        raise EvalError(f"unbound pairing form {name!r}") from None


def eval_source(src: str, env: Environment) -> Value:
    return evaluate(parse(src), env)
