"""A tiny arithmetic language for candidate functions.

Grammar (EBNF, see ``docs/grammar.md``)::

    expr    = term { ("+" | "-") term } ;
    term    = unary { ("*" | "/") unary } ;
    unary   = "-" unary | power ;
    power   = primary [ "^" unary ] ;          (* right associative *)
    primary = number | name | name "(" expr ")" | "(" expr ")" ;

Binding strength is ``^`` > unary minus > ``* /`` > ``+ -``, so ``-2^2``
is ``-(2^2)`` and ``2^-1`` is ``2^(-1)``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Callable, Dict, FrozenSet, Iterator, List, Mapping, Sequence, Union

FUNCTIONS: Dict[str, Callable[[float], float]] = {
    "sqrt": math.sqrt,
    "abs": abs,
    "exp": math.exp,
    "log": math.log,
    "sin": math.sin,
    "cos": math.cos,
}
CONSTANTS = {"pi": math.pi}


class ExprSyntaxError(ValueError):
    def __init__(self, message: str, pos: int, src: str = ""):
        self.pos = pos
        self.src = src
        super().__init__(f"{message} at position {pos}")


class ExprEvalError(ValueError):
    """Domain errors and missing variables during evaluation."""


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Expr"


Expr = Union[Num, Var, Const, Neg, BinOp, Call]


_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()]))"
)


@dataclass
class _Tok:
    kind: str
    text: str
    pos: int


def _tokenize(src: str) -> Iterator[_Tok]:
    pos = 0
    while True:
        while pos < len(src) and src[pos].isspace():
            pos += 1
        if pos == len(src):
            yield _Tok("end", "", pos)
            return
        m = _TOKEN.match(src, pos)
        if m is None or m.end() == pos:
            raise ExprSyntaxError(f"unexpected character {src[pos]!r}", pos, src)
        kind = m.lastgroup
        yield _Tok(kind, m.group(kind), m.start(kind))
        pos = m.end()


class _Parser:
    def __init__(self, src: str):
        self.src = src
        self.toks = list(_tokenize(src))
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def advance(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, text: str):
        if self.tok.text != text:
            self.fail(f"expected {text!r}")
        return self.advance()

    def fail(self, msg: str):
        t = self.tok
        got = "end of input" if t.kind == "end" else repr(t.text)
        raise ExprSyntaxError(f"{msg}, got {got}", t.pos, self.src)

    def parse(self) -> Expr:
        e = self.expr()
        if self.tok.kind != "end":
            self.fail("unexpected token")
        return e

    def expr(self) -> Expr:
        left = self.term()
        while self.tok.text in ("+", "-") and self.tok.kind == "op":
            op = self.advance().text
            left = BinOp(op, left, self.term())
        return left

    def term(self) -> Expr:
        left = self.unary()
        while self.tok.text in ("*", "/") and self.tok.kind == "op":
            op = self.advance().text
            left = BinOp(op, left, self.unary())
        return left

    def unary(self) -> Expr:
        if self.tok.kind == "op" and self.tok.text == "-":
            self.advance()
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.primary()
        if self.tok.kind == "op" and self.tok.text == "^":
            self.advance()
            return BinOp("^", base, self.unary())
        return base

    def primary(self) -> Expr:
        t = self.tok
        if t.kind == "num":
            self.advance()
            return Num(float(t.text))
        if t.kind == "name":
            self.advance()
            if self.tok.text == "(" and self.tok.kind == "op":
                if t.text not in FUNCTIONS:
                    raise ExprSyntaxError(f"unknown function {t.text!r}", t.pos, self.src)
                self.advance()
                arg = self.expr()
                self.expect(")")
                return Call(t.text, arg)
            if t.text in FUNCTIONS:
                raise ExprSyntaxError(
                    f"function {t.text!r} needs an argument list", t.pos, self.src
                )
            if t.text in CONSTANTS:
                return Const(t.text)
            return Var(t.text)
        if t.kind == "op" and t.text == "(":
            self.advance()
            e = self.expr()
            self.expect(")")
            return e
        self.fail("expected a number, name or '('")


def parse_expr(src: str) -> Expr:
    """Parse ``src`` into an AST; raises :class:`ExprSyntaxError`."""
    return _Parser(src).parse()


def variables(e: Expr) -> FrozenSet[str]:
    if isinstance(e, Var):
        return frozenset([e.name])
    if isinstance(e, Neg):
        return variables(e.operand)
    if isinstance(e, BinOp):
        return variables(e.left) | variables(e.right)
    if isinstance(e, Call):
        return variables(e.arg)
    return frozenset()


def format_expr(e: Expr) -> str:
    """Render ``e`` fully parenthesised so it reparses to the same tree."""
    if isinstance(e, Num):
        return repr(e.value)
    if isinstance(e, (Var, Const)):
        return e.name
    if isinstance(e, Neg):
        return f"(-{format_expr(e.operand)})"
    if isinstance(e, BinOp):
        return f"({format_expr(e.left)} {e.op} {format_expr(e.right)})"
    if isinstance(e, Call):
        return f"{e.func}({format_expr(e.arg)})"
    raise TypeError(f"not an expression node: {e!r}")


def _power(x: float, y: float) -> float:
    if x > 0:
        return math.pow(x, y)
    if x == 0:
        if y < 0:
            raise ExprEvalError("0 raised to a negative power")
        return 1.0 if y == 0 else 0.0
    if float(y).is_integer():
        return math.pow(x, y)
    raise ExprEvalError(f"negative base {x!r} with non-integer exponent {y!r}")


def eval_expr(e: Expr, env: Mapping[str, float]) -> float:
    """Evaluate ``e`` with variable values from ``env``."""
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Const):
        return CONSTANTS[e.name]
    if isinstance(e, Var):
        try:
            return float(env[e.name])
        except KeyError:
            raise ExprEvalError(f"no value for variable {e.name!r}") from None
    if isinstance(e, Neg):
        return -eval_expr(e.operand, env)
    if isinstance(e, Call):
        x = eval_expr(e.arg, env)
        if e.func == "sqrt" and x < 0:
            raise ExprEvalError(f"sqrt of negative number {x!r}")
        if e.func == "log" and x <= 0:
            raise ExprEvalError(f"log of nonpositive number {x!r}")
        try:
            return float(FUNCTIONS[e.func](x))
        except OverflowError as exc:
            raise ExprEvalError(f"{e.func}({x!r}) overflows") from exc
    if isinstance(e, BinOp):
        a = eval_expr(e.left, env)
        b = eval_expr(e.right, env)
        if e.op == "+":
            return a + b
        if e.op == "-":
            return a - b
        if e.op == "*":
            return a * b
        if e.op == "/":
            if b == 0:
                raise ExprEvalError("division by zero")
            return a / b
        try:
            return _power(a, b)
        except OverflowError as exc:
            raise ExprEvalError(f"{a!r}^{b!r} overflows") from exc
    raise TypeError(f"not an expression node: {e!r}")


def compile_expr(
    e: Union[Expr, str], names: Sequence[str]
) -> Callable[[Sequence[float]], float]:
    """Bind ``e`` to positional arguments ordered like ``names``.

    Unknown identifiers are reported here rather than at parse time.
    """
    if isinstance(e, str):
        e = parse_expr(e)
    names = list(names)
    unknown = sorted(variables(e) - set(names))
    if unknown:
        raise ExprEvalError(f"unknown identifier(s): {', '.join(unknown)}")

    def f(v: Sequence[float]) -> float:
        if len(v) != len(names):
            raise ExprEvalError(f"expected {len(names)} arguments, got {len(v)}")
        return eval_expr(e, dict(zip(names, (float(x) for x in v))))

    f.expr = e
    f.names = tuple(names)
    return f


__all__: List[str] = [
    "Expr",
    "Num",
    "Var",
    "Const",
    "Neg",
    "BinOp",
    "Call",
    "ExprSyntaxError",
    "ExprEvalError",
    "parse_expr",
    "format_expr",
    "eval_expr",
    "compile_expr",
    "variables",
]
