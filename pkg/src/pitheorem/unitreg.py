"""SI unit registry and unit-expression parser.

The registry is loaded from ``data/units.json`` (SI base units, the named
derived units, the SI prefixes and a handful of common non-SI units).

Unit expressions::

    expr     = factor { ("." | "·" | "*" | "/") factor } ;
    factor   = atom [ "^" exponent ] ;
    atom     = number | symbol | "(" expr ")" ;
    exponent = rational | "(" rational ")" ;
    rational = [ "+" | "-" ] digits [ "/" digits ] ;

``/`` is left associative, so ``J/kg/s`` is ``J/(kg.s)``.  A symbol is
first looked up as a whole (``min`` is the minute, ``Pa`` the pascal),
and only then split into prefix + unit, trying the longest prefix first.
The empty string and ``"1"`` are dimensionless.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .dimcore import SI_BASIS, Dimension, DimensionError, Quantity


class UnitError(ValueError):
    """Unknown symbols and malformed unit expressions."""

    def __init__(self, message: str, pos: Optional[int] = None):
        self.pos = pos
        if pos is not None:
            message = f"{message} at position {pos}"
        super().__init__(message)


@dataclass(frozen=True)
class UnitDef:
    symbol: str
    name: str
    dimension: Dimension
    si_factor: float
    definition: str = ""

    def __post_init__(self):
        if not self.si_factor > 0:
            raise ValueError(f"unit {self.symbol!r} has nonpositive factor")


@dataclass(frozen=True)
class PrefixDef:
    symbol: str
    name: str
    exponent: int

    @property
    def factor(self) -> float:
        return 10.0**self.exponent


@dataclass(frozen=True)
class ParsedUnit:
    dimension: Dimension
    factor: float

    def __mul__(self, other: "ParsedUnit") -> "ParsedUnit":
        return ParsedUnit(self.dimension + other.dimension, self.factor * other.factor)

    def __truediv__(self, other: "ParsedUnit") -> "ParsedUnit":
        return ParsedUnit(self.dimension - other.dimension, self.factor / other.factor)

    def __pow__(self, k: Fraction) -> "ParsedUnit":
        return ParsedUnit(self.dimension.scaled(k), self.factor ** float(k))


_PRODUCT_OPS = (".", "·", "*")


class _UnitParser:
    def __init__(self, registry: "Registry", src: str):
        self.reg = registry
        self.src = src
        self.pos = 0

    def peek(self) -> str:
        while self.pos < len(self.src) and self.src[self.pos].isspace():
            self.pos += 1
        return self.src[self.pos] if self.pos < len(self.src) else ""

    def parse(self) -> ParsedUnit:
        if self.peek() == "":
            return self.reg.dimensionless()
        result = self.expr()
        if self.peek() != "":
            raise UnitError(f"unexpected {self.peek()!r}", self.pos)
        return result

    def expr(self) -> ParsedUnit:
        acc = self.factor()
        while True:
            c = self.peek()
            if c and c in _PRODUCT_OPS:
                self.pos += 1
                acc = acc * self.factor()
            elif c == "/":
                self.pos += 1
                acc = acc / self.factor()
            else:
                return acc

    def factor(self) -> ParsedUnit:
        base = self.atom()
        if self.peek() == "^":
            self.pos += 1
            base = base ** self.exponent()
        return base

    def atom(self) -> ParsedUnit:
        c = self.peek()
        start = self.pos
        if c == "(":
            self.pos += 1
            inner = self.expr()
            if self.peek() != ")":
                raise UnitError("expected ')'", self.pos)
            self.pos += 1
            return inner
        if c.isdigit():
            return self.number()
        if c.isalpha():
            while self.pos < len(self.src) and self.src[self.pos].isalpha():
                self.pos += 1
            return self.reg.resolve(self.src[start : self.pos], start)
        if c == "":
            raise UnitError("unexpected end of expression", self.pos)
        raise UnitError(f"unexpected {c!r}", self.pos)

    def _digits(self) -> str:
        start = self.pos
        while self.pos < len(self.src) and self.src[self.pos].isdigit():
            self.pos += 1
        return self.src[start : self.pos]

    def number(self) -> ParsedUnit:
        start = self.pos
        self._digits()
        s = self.src
        if self.pos + 1 < len(s) and s[self.pos] == "." and s[self.pos + 1].isdigit():
            self.pos += 1
            self._digits()
        if self.pos < len(s) and s[self.pos] in "eE":
            save = self.pos
            self.pos += 1
            if self.pos < len(s) and s[self.pos] in "+-":
                self.pos += 1
            if not self._digits():
                self.pos = save
        value = float(s[start : self.pos])
        if not value > 0:
            raise UnitError("numeric factors must be positive", start)
        return ParsedUnit(self.reg.dimensionless().dimension, value)

    def _rational(self) -> Fraction:
        sign = 1
        if self.pos < len(self.src) and self.src[self.pos] in "+-":
            sign = -1 if self.src[self.pos] == "-" else 1
            self.pos += 1
        num = self._digits()
        if not num:
            raise UnitError("malformed exponent", self.pos)
        den = "1"
        s = self.src
        if self.pos + 1 < len(s) and s[self.pos] == "." and s[self.pos + 1].isdigit():
            raise UnitError("exponents must be integers or ratios of integers", self.pos)
        if self.pos + 1 < len(s) and s[self.pos] == "/" and s[self.pos + 1].isdigit():
            self.pos += 1
            den = self._digits()
        if int(den) == 0:
            raise UnitError("zero denominator in exponent", self.pos)
        return sign * Fraction(int(num), int(den))

    def exponent(self) -> Fraction:
        if self.peek() == "(":
            self.pos += 1
            self.peek()
            k = self._rational()
            if self.peek() != ")":
                raise UnitError("expected ')' after exponent", self.pos)
            self.pos += 1
            return k
        self.peek()
        return self._rational()


class Registry:
    """Immutable table of units and prefixes."""

    def __init__(
        self,
        units: Sequence[UnitDef],
        prefixes: Sequence[PrefixDef],
        aliases: Mapping[str, str] = (),
        basis: Sequence[str] = SI_BASIS,
    ):
        self.basis = tuple(basis)
        self._units: Dict[str, UnitDef] = {}
        for u in units:
            if u.symbol in self._units:
                raise ValueError(f"duplicate unit symbol {u.symbol!r}")
            if u.dimension.basis != self.basis:
                raise DimensionError(f"unit {u.symbol!r} uses a different basis")
            self._units[u.symbol] = u
        self._prefixes = sorted(prefixes, key=lambda p: -len(p.symbol))
        self._prefix_map = {p.symbol: p for p in prefixes}
        self._aliases = dict(aliases)

    @classmethod
    def from_json(cls, doc: Mapping) -> "Registry":
        basis = tuple(doc["basis"])
        units = [
            UnitDef(
                symbol=u["symbol"],
                name=u["name"],
                dimension=Dimension(tuple(u["exponents"]), basis),
                si_factor=float(u["factor"]),
                definition=u.get("definition", ""),
            )
            for u in doc["units"]
        ]
        prefixes = [PrefixDef(p["symbol"], p["name"], int(p["exponent"])) for p in doc["prefixes"]]
        return cls(units, prefixes, doc.get("aliases", {}), basis)

    def __contains__(self, symbol: str) -> bool:
        return self._alias(symbol) in self._units

    def units(self) -> List[UnitDef]:
        return list(self._units.values())

    def prefixes(self) -> List[PrefixDef]:
        return sorted(self._prefix_map.values(), key=lambda p: -p.exponent)

    def prefix(self, symbol: str) -> PrefixDef:
        try:
            return self._prefix_map[self._aliases.get(symbol, symbol)]
        except KeyError:
            raise UnitError(f"unknown prefix {symbol!r}") from None

    def _alias(self, symbol: str) -> str:
        return self._aliases.get(symbol, symbol)

    def dimensionless(self) -> ParsedUnit:
        return ParsedUnit(Dimension.zero(self.basis), 1.0)

    def lookup(self, symbol: str) -> UnitDef:
        try:
            return self._units[self._alias(symbol)]
        except KeyError:
            raise UnitError(f"unknown unit {symbol!r}") from None

    def resolve(self, symbol: str, pos: Optional[int] = None) -> ParsedUnit:
        """Resolve a bare symbol, possibly carrying a prefix."""
        sym = self._alias(symbol)
        if sym in self._units:
            u = self._units[sym]
            return ParsedUnit(u.dimension, u.si_factor)
        for p in self._prefixes:
            for ps in (p.symbol, *(a for a, t in self._aliases.items() if t == p.symbol)):
                if symbol.startswith(ps) and len(symbol) > len(ps):
                    rest = self._alias(symbol[len(ps) :])
                    # the kilogram already carries a prefix
                    if rest in self._units and rest != "kg":
                        u = self._units[rest]
                        return ParsedUnit(u.dimension, p.factor * u.si_factor)
        raise UnitError(f"unknown unit symbol {symbol!r}", pos)

    def parse(self, expr: str) -> ParsedUnit:
        if not isinstance(expr, str):
            raise TypeError("unit expression must be a string")
        return _UnitParser(self, expr).parse()

    def quantity_of(self, value: float, expr: str) -> Quantity:
        pu = self.parse(expr)
        return Quantity(value * pu.factor, pu.dimension)


def _format_exponent(k: Fraction) -> str:
    if k.denominator == 1:
        return str(k.numerator)
    return f"({k.numerator}/{k.denominator})"


def format_dimension(dim: Dimension, sep: str = ".") -> str:
    """Base-unit product such as ``m^2.kg.s^-2``; ``1`` if dimensionless."""
    parts = []
    for sym, k in zip(dim.basis, dim.exponents):
        if k == 0:
            continue
        parts.append(sym if k == 1 else f"{sym}^{_format_exponent(k)}")
    return sep.join(parts) if parts else "1"


def format_unit(pu: ParsedUnit) -> str:
    """Canonical text for a parsed unit; reparses to the same value."""
    dims = format_dimension(pu.dimension, sep="*")
    if pu.factor == 1.0:
        return dims
    if dims == "1":
        return repr(pu.factor)
    return f"{pu.factor!r}*{dims}"


def restrict(dim: Dimension, basis: Sequence[str]) -> Dimension:
    """Re-express ``dim`` over a subset of its basis symbols.

    Fails if ``dim`` has a nonzero exponent on a dropped base unit.
    """
    basis = tuple(basis)
    if basis == dim.basis:
        return dim
    index = {b: i for i, b in enumerate(dim.basis)}
    missing = [b for b in basis if b not in index]
    if missing:
        raise DimensionError(f"base units {missing} are not in {dim.basis}")
    dropped = [b for b, k in zip(dim.basis, dim.exponents) if k and b not in basis]
    if dropped:
        raise DimensionError(
            f"dimension {format_dimension(dim)} involves {dropped}, outside basis {basis}"
        )
    return Dimension(tuple(dim.exponents[index[b]] for b in basis), basis)


@lru_cache(maxsize=None)
def default_registry() -> Registry:
    text = resources.files("pitheorem").joinpath("data/units.json").read_text("utf-8")
    return Registry.from_json(json.loads(text))


def parse_unit(expr: str) -> ParsedUnit:
    return default_registry().parse(expr)


def lookup(symbol: str) -> UnitDef:
    return default_registry().lookup(symbol)


def quantity_of(value: float, expr: str) -> Quantity:
    return default_registry().quantity_of(value, expr)

