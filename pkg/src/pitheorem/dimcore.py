"""Unit-free physical quantities.

A quantity is an equivalence class ``[x, c, alpha]`` where ``x`` is a
number, ``c`` a vector of positive base-unit scale factors and ``alpha``
the dimension (a vector of rational exponents over an ordered basis).
Two triples are equivalent when the dimensions agree and
``x * c**alpha == y * d**alpha``.

Every :class:`Quantity` is stored by its canonical coordinate, i.e. the
value at the unit scale ``c = (1, ..., 1)``.
"""

from __future__ import annotations

import math
import numbers
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence, Tuple, Union

SI_BASIS: Tuple[str, ...] = ("m", "kg", "s", "A", "K", "mol", "cd")
MKS_BASIS: Tuple[str, ...] = ("m", "kg", "s")

# exp() overflows just above 709; keep some headroom
MAX_LOG_SCALE = 700.0

RTOL = 1e-12

Rational = Union[int, Fraction, str]


class DimensionError(ValueError):
    """Raised for basis or dimension mismatches."""


def to_fraction(x: Rational) -> Fraction:
    """Convert an int, Fraction or ``"p/q"`` string to a Fraction.

    Floats are refused: exponents must be exact.
    """
    if isinstance(x, bool):
        raise TypeError("booleans are not exponents")
    if isinstance(x, Fraction):
        return x
    if isinstance(x, numbers.Rational):
        return Fraction(int(x.numerator), int(x.denominator))
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a rational number: {x!r}") from exc
    raise TypeError(f"exponent must be rational, got {type(x).__name__}")


@dataclass(frozen=True)
class Dimension:
    exponents: Tuple[Fraction, ...]
    basis: Tuple[str, ...] = SI_BASIS

    def __post_init__(self):
        exps = tuple(to_fraction(e) for e in self.exponents)
        basis = tuple(self.basis)
        if len(exps) != len(basis):
            raise DimensionError(
                f"{len(exps)} exponents for a basis of size {len(basis)}"
            )
        object.__setattr__(self, "exponents", exps)
        object.__setattr__(self, "basis", basis)

    @classmethod
    def zero(cls, basis: Sequence[str] = SI_BASIS) -> "Dimension":
        return cls((0,) * len(basis), tuple(basis))

    @classmethod
    def base(cls, symbol: str, basis: Sequence[str] = SI_BASIS) -> "Dimension":
        basis = tuple(basis)
        return cls(tuple(int(b == symbol) for b in basis), basis)

    @property
    def size(self) -> int:
        return len(self.basis)

    @property
    def is_dimensionless(self) -> bool:
        return not any(self.exponents)

    def _check(self, other: "Dimension"):
        if not isinstance(other, Dimension):
            raise TypeError(f"expected Dimension, got {type(other).__name__}")
        if other.basis != self.basis:
            raise DimensionError(f"basis mismatch: {self.basis} vs {other.basis}")

    def __add__(self, other: "Dimension") -> "Dimension":
        self._check(other)
        return Dimension(
            tuple(a + b for a, b in zip(self.exponents, other.exponents)), self.basis
        )

    def __sub__(self, other: "Dimension") -> "Dimension":
        return self + (-other)

    def __neg__(self) -> "Dimension":
        return Dimension(tuple(-a for a in self.exponents), self.basis)

    def scaled(self, k: Rational) -> "Dimension":
        k = to_fraction(k)
        return Dimension(tuple(k * a for a in self.exponents), self.basis)

    def __iter__(self):
        return iter(self.exponents)

    def __len__(self):
        return len(self.exponents)

    def __getitem__(self, i):
        return self.exponents[i]

    def __str__(self) -> str:
        return "(" + ", ".join(str(e) for e in self.exponents) + ")"


@dataclass(frozen=True)
class ScaleVector:
    factors: Tuple[float, ...]
    basis: Tuple[str, ...] = SI_BASIS

    def __post_init__(self):
        factors = tuple(float(f) for f in self.factors)
        basis = tuple(self.basis)
        if len(factors) != len(basis):
            raise DimensionError(
                f"{len(factors)} scale factors for a basis of size {len(basis)}"
            )
        for f in factors:
            if not (f > 0 and math.isfinite(f)):
                raise ValueError(f"scale factors must be finite and positive, got {f}")
        object.__setattr__(self, "factors", factors)
        object.__setattr__(self, "basis", basis)

    @classmethod
    def ones(cls, basis: Sequence[str] = SI_BASIS) -> "ScaleVector":
        return cls((1.0,) * len(basis), tuple(basis))

    def power(self, dim: Dimension) -> float:
        """Return ``c**alpha = prod_i c_i**alpha_i``."""
        if dim.basis != self.basis:
            raise DimensionError(f"basis mismatch: {self.basis} vs {dim.basis}")
        log = math.fsum(
            float(a) * math.log(c) for a, c in zip(dim.exponents, self.factors) if a
        )
        if abs(log) > MAX_LOG_SCALE:
            raise OverflowError(f"scale power out of range (log = {log:.6g})")
        return math.exp(log)


class Quantity:
    """A physical quantity in canonical form (scale ``1``)."""

    __slots__ = ("value", "dimension")

    def __init__(self, value: float, dimension: Dimension):
        if not isinstance(dimension, Dimension):
            raise TypeError("dimension must be a Dimension")
        object.__setattr__(self, "value", float(value))
        object.__setattr__(self, "dimension", dimension)

    def __setattr__(self, name, value):
        raise AttributeError("Quantity is immutable")

    def __repr__(self) -> str:
        return f"Quantity({self.value!r}, {self.dimension})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, Quantity):
            return NotImplemented
        return self.dimension == other.dimension and math.isclose(
            self.value, other.value, rel_tol=RTOL, abs_tol=0.0
        )

    __hash__ = None  # equality is tolerance based

    @property
    def is_positive(self) -> bool:
        return self.value > 0

    @property
    def is_dimensionless(self) -> bool:
        return self.dimension.is_dimensionless

    def __mul__(self, other: "Quantity") -> "Quantity":
        return qty_mul(self, other)

    def __truediv__(self, other: "Quantity") -> "Quantity":
        return qty_mul(self, qty_inv(other))

    def __add__(self, other: "Quantity") -> "Quantity":
        return qty_add(self, other)

    def __neg__(self) -> "Quantity":
        return Quantity(-self.value, self.dimension)

    def __sub__(self, other: "Quantity") -> "Quantity":
        return qty_add(self, -other)


def neutral(basis: Sequence[str] = SI_BASIS) -> Quantity:
    """The multiplicative identity ``[1, 1, 0]``."""
    return Quantity(1.0, Dimension.zero(basis))


def quantity_from(value: float, scale: ScaleVector, dim: Dimension) -> Quantity:
    """Build ``[value, scale, dim]``, normalised to the unit scale."""
    return Quantity(value * scale.power(dim), dim)


def coordinate_in(p: Quantity, scale: ScaleVector) -> float:
    """Numerical value ``[p]_scale`` of ``p`` when base units are scaled by ``scale``."""
    return p.value / scale.power(p.dimension)


def qty_mul(p1: Quantity, p2: Quantity) -> Quantity:
    return Quantity(p1.value * p2.value, p1.dimension + p2.dimension)


def qty_inv(p: Quantity) -> Quantity:
    if p.value == 0:
        raise ZeroDivisionError("a quantity with value 0 is not invertible")
    return Quantity(1.0 / p.value, -p.dimension)


def qty_add(p1: Quantity, p2: Quantity) -> Quantity:
    p1.dimension._check(p2.dimension)
    if p1.dimension != p2.dimension:
        raise DimensionError(
            f"cannot add quantities of dimension {p1.dimension} and {p2.dimension}"
        )
    return Quantity(p1.value + p2.value, p1.dimension)


Triple = Tuple[float, ScaleVector, Dimension]


def equivalent(t1: Triple, t2: Triple) -> bool:
    """Decide ``(x, c, alpha) ~ (y, d, beta)``."""
    x, c, alpha = t1
    y, d, beta = t2
    for s, dim in ((c, alpha), (d, beta)):
        if s.basis != dim.basis:
            raise DimensionError(f"basis mismatch: {s.basis} vs {dim.basis}")
    alpha._check(beta)
    if alpha != beta:
        return False
    return math.isclose(x * c.power(alpha), y * d.power(alpha), rel_tol=RTOL, abs_tol=0.0)


def lift(
    func: Callable[[Sequence[float]], float],
    target: Dimension,
    args: Iterable[Quantity],
    scale: ScaleVector | None = None,
) -> Quantity:
    """Evaluate ``func`` on the coordinates of ``args`` at ``scale``.

    The result is packaged as ``[func([p_1]_c, ...), c, target]``.  For a
    function with exact scaling behaviour the result does not depend on
    ``scale``.
    """
    args = list(args)
    if scale is None:
        scale = ScaleVector.ones(target.basis)
    coords = [coordinate_in(p, scale) for p in args]
    return quantity_from(func(coords), scale, target)
