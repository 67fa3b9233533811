import math
from fractions import Fraction

import pytest
from hypothesis import assume, given, strategies as st

from pitheorem.dimcore import MKS_BASIS, Dimension, DimensionError
from pitheorem.unitreg import (
    UnitError,
    default_registry,
    format_unit,
    lookup,
    parse_unit,
    quantity_of,
    restrict,
)


def si(*e):
    return Dimension(e + (0,) * (7 - len(e)))


def rel(a, b, tol=1e-12):
    return math.isclose(a, b, rel_tol=tol, abs_tol=0.0)


class TestParse:
    def test_newton(self):
        pu = parse_unit("N")
        assert pu.dimension == si(1, 1, -2) and pu.factor == 1

    def test_cubic_centimetre(self):
        pu = parse_unit("cm^3")
        assert pu.dimension == si(3)
        assert rel(pu.factor, 1e-6)

    def test_kilowatt_hour(self):
        pu = parse_unit("kW.h")
        assert pu.dimension == si(2, 1, -2)
        assert rel(pu.factor, 3.6e6)

    @pytest.mark.parametrize("expr", ["1", "", "  "])
    def test_dimensionless(self, expr):
        pu = parse_unit(expr)
        assert pu.dimension.is_dimensionless and pu.factor == 1

    @pytest.mark.parametrize("op", [".", "·", "*"])
    def test_product_operators(self, op):
        assert parse_unit(f"m{op}kg{op}s^-2") == parse_unit("N")

    def test_quotient_left_assoc(self):
        assert parse_unit("J/kg/s").dimension == si(2, 0, -3)

    def test_parentheses(self):
        assert parse_unit("(m/s)^2").dimension == si(2, 0, -2)
        assert parse_unit("kg/(m.s^2)").dimension == parse_unit("Pa").dimension

    def test_rational_exponent(self):
        assert parse_unit("m^3/2").dimension == si(Fraction(3, 2))
        assert parse_unit("m^(-1/2)").dimension == si(Fraction(-1, 2))
        assert parse_unit("m^2/s").dimension == si(2, 0, -1)

    def test_rational_exponent_factor(self):
        assert rel(parse_unit("km^1/2").factor, math.sqrt(1000))

    @pytest.mark.parametrize("expr", ["m^", "m^x", "m^1/0", "m^(1/2", "(m", "m)", "m..s", "m/", "2l?"])
    def test_malformed(self, expr):
        with pytest.raises(UnitError):
            parse_unit(expr)

    def test_unknown_symbol(self):
        with pytest.raises(UnitError, match="foo"):
            parse_unit("foo")

    def test_irrational_exponent_rejected(self):
        with pytest.raises(UnitError):
            parse_unit("m^0.5")


class TestSymbolResolution:
    @pytest.mark.parametrize(
        "expr, dim, factor",
        [
            ("min", si(0, 0, 1), 60),
            ("mm", si(1), 1e-3),
            ("cd", si(0, 0, 0, 0, 0, 0, 1), 1),
            ("Pa", si(-1, 1, -2), 1),
            ("ha", si(2), 1e4),
            ("au", si(1), 1.49598e11),
            ("dam", si(1), 10),
            ("mg", si(0, 1), 1e-6),
            ("µs", si(0, 0, 1), 1e-6),
            ("μs", si(0, 0, 1), 1e-6),
            ("kΩ", si(2, 1, -3, -2), 1e3),
            ("keV", si(2, 1, -2), 1.60218e-16),
            ("T", si(0, 1, -2, -1), 1),
            ("kat", si(0, 0, -1, 0, 0, 1), 1),
            ("cd", si(0, 0, 0, 0, 0, 0, 1), 1),
            ("ma", si(0, 0, 1), 365.25 * 86400e-3),
            ("dau", si(0, 1), 1.66054e-26),
        ],
    )
    def test_resolution(self, expr, dim, factor):
        pu = parse_unit(expr)
        assert pu.dimension == dim
        assert rel(pu.factor, factor)

    def test_no_prefix_on_kilogram(self):
        with pytest.raises(UnitError):
            parse_unit("mkg")


class TestLookup:
    def test_light_year(self):
        u = lookup("ly")
        assert u.si_factor == 9.46073e15 and u.dimension == si(1)

    def test_metre(self):
        u = lookup("m")
        assert u.si_factor == 1 and u.dimension == si(1)

    def test_electronvolt(self):
        u = lookup("eV")
        assert u.si_factor == 1.60218e-19 and u.dimension == si(2, 1, -2)

    def test_unknown(self):
        with pytest.raises(UnitError):
            lookup("furlong")

    def test_base_units_one_hot(self):
        reg = default_registry()
        for sym in reg.basis:
            u = reg.lookup(sym)
            assert u.si_factor == 1
            assert sorted(u.dimension.exponents) == [0] * 6 + [1]

    def test_julian_year(self):
        assert lookup("a").si_factor == 365.25 * 86400


class TestQuantityOf:
    def test_minutes(self):
        q = quantity_of(2, "min")
        assert q.value == 120 and q.dimension == si(0, 0, 1)

    def test_metre(self):
        assert quantity_of(1, "m").value == 1

    def test_atmosphere(self):
        q = quantity_of(1, "atm")
        assert q.value == 101325 and q.dimension == si(-1, 1, -2)

    def test_error_propagates(self):
        with pytest.raises(UnitError):
            quantity_of(1, "m^")


class TestProperties:
    def test_table2_definitions(self):
        reg = default_registry()
        for u in reg.units():
            if u.definition and u.si_factor == 1:
                pu = parse_unit(u.definition)
                assert pu.dimension == u.dimension and pu.factor == 1, u.symbol

    @given(
        st.sampled_from([u.symbol for u in default_registry().units() if u.symbol != "kg"]),
        st.sampled_from([p.symbol for p in default_registry().prefixes()]),
        st.integers(-3, 3),
    )
    def test_prefix_algebra(self, unit, prefix, k):
        reg = default_registry()
        # symbols such as "cd" or "min" resolve whole, never as prefix + unit
        symbol = f"{prefix}{unit}"
        assume(symbol not in reg)
        # a longer prefix wins when it also leaves a valid unit ("dau" is da + u)
        assume(
            not any(
                len(p.symbol) > len(prefix) and symbol.startswith(p.symbol) and symbol[len(p.symbol):] in reg
                for p in reg.prefixes()
            )
        )
        pu = parse_unit(f"({prefix}{unit})^{k}")
        expected = (reg.prefix(prefix).factor * reg.lookup(unit).si_factor) ** k
        assert rel(pu.factor, expected)
        assert pu.dimension == reg.lookup(unit).dimension.scaled(k)

    atoms = st.sampled_from(["m", "kg", "s", "N", "J", "W", "kW", "h", "min", "cm", "eV", "atm", "ly", "µA", "mol", "K"])
    exps = st.fractions(min_value=-3, max_value=3, max_denominator=3).filter(lambda f: f != 0)

    @given(st.lists(st.tuples(atoms, exps), min_size=1, max_size=4))
    def test_format_roundtrip(self, parts):
        expr = ".".join(f"{a}^({k})" for a, k in parts)
        pu = parse_unit(expr)
        again = parse_unit(format_unit(pu))
        assert again.dimension == pu.dimension
        assert rel(again.factor, pu.factor)


class TestRestrict:
    def test_subset(self):
        d = restrict(parse_unit("m/s^2").dimension, MKS_BASIS)
        assert d == Dimension((1, 0, -2), MKS_BASIS)

    def test_outside_subset(self):
        with pytest.raises(DimensionError):
            restrict(parse_unit("A").dimension, MKS_BASIS)
