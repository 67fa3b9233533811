import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import atwood_G, mks
from pitheorem.bounds import estimate_epsilon, random_problem
from pitheorem.dimcore import DimensionError, MKS_BASIS, SI_BASIS, Dimension
from pitheorem.pengine import (
    DimensionProblem,
    PiGroup,
    Variable,
    build_matrix,
    compose,
    decompose,
    dimensionless_check,
    perturb_exponents,
    psi,
    reconstruct_G,
)
from pitheorem.ratlinalg import RatMatrix

F_ = Fraction


def smooth_H(w):
    return 1.0 + 0.5 * math.tanh(float(np.sum(np.log(w)))) + 0.1 * len(w)


class TestProblem:
    def test_needs_variables(self):
        with pytest.raises(ValueError):
            DimensionProblem((), Variable("q", mks(0, 0, 1)))

    def test_duplicate_names(self):
        with pytest.raises(ValueError):
            DimensionProblem((Variable("a", mks(1, 0, 0)), Variable("a", mks(0, 1, 0))), Variable("q", mks(0, 0, 1)))

    def test_mixed_basis(self):
        with pytest.raises(DimensionError):
            DimensionProblem(
                (Variable("a", Dimension((1,) + (0,) * 6, SI_BASIS)),), Variable("q", mks(0, 0, 1))
            )

    def test_build_matrix(self, pendulum):
        A = build_matrix(pendulum)
        assert A == RatMatrix([[0, 1, 1], [1, 0, 0], [0, 0, -2]])


class TestPendulum:
    def test_decomposition(self, pendulum):
        dec = decompose(pendulum)
        assert (dec.r, dec.k) == (3, 0)
        assert dec.y == (F_(0), F_(1, 2), F_(-1, 2))
        assert all(isinstance(v, Fraction) for v in dec.y)
        assert dec.delta == 0 and dec.exact
        assert dec.template == "T = C * l^(1/2) * g^(-1/2)"
        assert dec.C == pytest.approx(2 * math.pi, rel=1e-12)
        assert dec.X == () and dec.pi_groups == ()

    def test_psi_undefined(self, pendulum):
        dec = decompose(pendulum)
        with pytest.raises(ValueError):
            psi(dec, [1.0])
        with pytest.raises(ValueError):
            reconstruct_G(dec, pendulum.candidate)

    def test_scale_invariant(self, pendulum):
        dec = decompose(pendulum)
        est = estimate_epsilon(pendulum.candidate, dec.A, dec.beta, samples=500)
        assert est.eps_hat <= 1e-12


class TestAtwood:
    def test_decomposition(self, atwood):
        dec = decompose(atwood)
        assert dec.k == 1
        assert dec.X == ((F_(1), F_(-1), F_(0), F_(0)),)
        assert str(dec.pi_groups[0]) == "m1/m2"
        assert dec.y == (0, 0, F_(1, 2), F_(1, 2)) and dec.delta == 0
        assert dec.template == "v = G(m1/m2) * h^(1/2) * g^(1/2)"
        assert dec.M == 1
        assert dec.D_norm == pytest.approx(1.0, rel=1e-15)

    def test_psi(self, atwood):
        dec = decompose(atwood)
        assert psi(dec, [4.0]) == pytest.approx([2.0, 0.5, 1.0, 1.0], rel=1e-15)
        with pytest.raises(ValueError):
            psi(dec, [0.0])
        with pytest.raises(ValueError):
            psi(dec, [1.0, 2.0])

    @pytest.mark.parametrize("w", [0.25, 0.5, 2.0, 3.0, 4.0])
    def test_reconstruct(self, atwood, w):
        G = reconstruct_G(decompose(atwood), atwood.candidate)
        assert G([w]) == pytest.approx(atwood_G(w), rel=1e-9)

    def test_reconstruct_at_one(self, atwood):
        G = reconstruct_G(decompose(atwood), atwood.candidate)
        assert abs(G([1.0])) <= 1e-9


class TestDimensionless:
    def test_all_zero_matrix(self):
        z = mks(0, 0, 0)
        prob = DimensionProblem((Variable("Re", z), Variable("Ma", z)), Variable("Cd", z))
        dec = decompose(prob)
        assert (dec.r, dec.k) == (0, 2)
        assert dec.y == (0, 0) and dec.delta == 0
        assert dec.X == ((1, 0), (0, 1))
        assert dec.template == "Cd = G(Re, Ma)"
        G = reconstruct_G(dec, lambda v: 1 + v[1] / v[0])
        assert G([2.0, 3.0]) == pytest.approx(2.5)


class TestOverride:
    def test_inconsistent_target(self):
        prob = DimensionProblem((Variable("l", mks(1, 0, 0)),), Variable("t", mks(0, 0, 1)))
        dec = decompose(prob)
        assert dec.y == (0,) and dec.delta == 1 and not dec.exact

    def test_float_override(self, pendulum):
        dec = decompose(pendulum, y=[0.0, 0.5, -0.49])
        assert isinstance(dec.delta, float)
        assert dec.delta == pytest.approx(0.02)

    def test_wrong_length(self, pendulum):
        with pytest.raises(ValueError):
            decompose(pendulum, y=[0, 1])

    @pytest.mark.parametrize("delta", [F_(1, 100), 0.05, F_(0)])
    def test_perturb_exact_delta(self, atwood, delta):
        dec = decompose(atwood)
        y = perturb_exponents(dec, delta)
        assert decompose(atwood, y=y).delta == F_(str(delta))

    def test_perturb_ones_orthogonal_to_range(self):
        prob = DimensionProblem((Variable("a", mks(1, -1, 0)),), Variable("q", mks(1, -1, 0)))
        y = perturb_exponents(decompose(prob), F_(1, 10))
        assert decompose(prob, y=y).delta == F_(1, 10)

    def test_perturb_negative(self, atwood):
        with pytest.raises(ValueError):
            perturb_exponents(decompose(atwood), -1)


class TestPiGroup:
    @pytest.mark.parametrize(
        "x, text",
        [((1, -1, 0), "a/b"), ((0, 0, -1), "1/c"), ((1, -1, -1), "a/(b*c)"), ((2, F_(-1, 2), 0), "a^2/b^(1/2)")],
    )
    def test_str(self, x, text):
        assert str(PiGroup(tuple(F_(v) for v in x), ("a", "b", "c"))) == text

    def test_call(self):
        assert PiGroup((F_(1), F_(-2)), ("a", "b"))([8.0, 2.0]) == pytest.approx(2.0)


problems = st.builds(
    lambda seed, m, n: random_problem(np.random.default_rng(seed), m, n)[0],
    st.integers(0, 2**32 - 1),
    st.integers(1, 4),
    st.integers(1, 6),
)


class TestProperties:
    @settings(max_examples=60, deadline=None)
    @given(problems)
    def test_groups_dimensionless(self, prob):
        dec = decompose(prob)
        assert all(dimensionless_check(dec))
        assert len(dec.X) == dec.n - dec.r
        assert dec.exact

    @settings(max_examples=30, deadline=None)
    @given(problems, st.integers(0, 1000))
    def test_buckingham_identity(self, prob, seed):
        dec = decompose(prob)
        F = compose(dec, smooth_H)
        V = np.exp(np.log(3) * np.random.default_rng(seed).uniform(-1, 1, (20, dec.n)))
        if dec.k == 0:
            C = F(np.ones(dec.n))
            approx = [C * dec.monomial(v) for v in V]
        else:
            G = reconstruct_G(dec, F)
            approx = [G(dec.pi(v)) * dec.monomial(v) for v in V]
        for v, a in zip(V, approx):
            assert a == pytest.approx(F(v), rel=1e-8)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.integers(1, 3), st.integers(2, 6))
    def test_uniqueness(self, seed, m, n):
        rng = np.random.default_rng(seed)
        prob, _ = random_problem(rng, m, n, deficient=True)
        dec = decompose(prob)
        G = reconstruct_G(dec, compose(dec, smooth_H))
        for w in np.exp(rng.uniform(-1, 1, (10, dec.k))):
            assert G(w) == pytest.approx(smooth_H(w), rel=1e-9)

    @settings(max_examples=30, deadline=None)
    @given(problems, st.integers(0, 1000))
    def test_composed_function_scales_exactly(self, prob, seed):
        dec = decompose(prob)
        est = estimate_epsilon(compose(dec, smooth_H), dec.A, dec.beta, samples=50, seed=seed)
        assert est.eps_hat <= 1e-10
