"""Buckingham decomposition of a dimensional problem.

Given input variables ``p_1..p_n`` with dimensions ``alpha_j`` and a target
of dimension ``beta``, find exponents ``y`` with ``A y = beta`` (or the
closest fit), a kernel basis ``X`` of the dimension matrix ``A`` and the
dimensionless groups ``pi_s(u) = u**x_s``.  The unknown function of the
groups is recovered from a candidate ``F`` as
``G(w) = F(psi(w)) / psi(w)**y`` with ``psi(w) = exp(X+ log w)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .dimcore import Dimension, DimensionError, to_fraction
from .ratlinalg import RatMatrix, inf_norm, kernel_basis, min_norm_solve, pinv_exact, rank

Number = Union[Fraction, float]
ScalarFunction = Callable[[Sequence[float]], float]


class EvaluationError(RuntimeError):
    """The candidate function failed at a sample point."""

    def __init__(self, point: Sequence[float], cause: BaseException):
        self.point = tuple(float(x) for x in point)
        self.cause = cause
        super().__init__(f"evaluation failed at v={list(self.point)}: {cause}")


@dataclass(frozen=True)
class Variable:
    name: str
    dimension: Dimension


@dataclass(frozen=True)
class DimensionProblem:
    variables: Tuple[Variable, ...]
    target: Variable
    candidate: Optional[ScalarFunction] = field(default=None, compare=False)

    def __post_init__(self):
        variables = tuple(self.variables)
        object.__setattr__(self, "variables", variables)
        if not variables:
            raise ValueError("a problem needs at least one input variable")
        names = [v.name for v in variables]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate variable names in {names}")
        basis = self.target.dimension.basis
        for v in variables:
            if v.dimension.basis != basis:
                raise DimensionError(
                    f"variable {v.name!r} uses basis {v.dimension.basis}, target uses {basis}"
                )

    @property
    def names(self) -> Tuple[str, ...]:
        return tuple(v.name for v in self.variables)

    @property
    def basis(self) -> Tuple[str, ...]:
        return self.target.dimension.basis

    @property
    def beta(self) -> Tuple[Fraction, ...]:
        return self.target.dimension.exponents


def build_matrix(prob: DimensionProblem) -> RatMatrix:
    """Dimension matrix whose ``j``-th column is the dimension of variable ``j``."""
    return RatMatrix.from_columns([v.dimension.exponents for v in prob.variables])


def format_exponent(k: Number) -> str:
    if isinstance(k, Fraction):
        if k.denominator == 1 and k > 0:
            return str(k.numerator)
        return f"({k})"
    return f"({k:.12g})"


def _power_term(name: str, k: Number) -> str:
    return name if k == 1 else f"{name}^{format_exponent(k)}"


@dataclass(frozen=True)
class PiGroup:
    """The monomial ``prod_j p_j**x_j`` for a kernel vector ``x``."""

    exponents: Tuple[Fraction, ...]
    names: Tuple[str, ...]

    def __call__(self, v: Sequence[float]) -> float:
        return math.exp(sum(float(x) * math.log(vj) for x, vj in zip(self.exponents, v) if x))

    def __str__(self) -> str:
        num = [_power_term(n, x) for n, x in zip(self.names, self.exponents) if x > 0]
        den = [_power_term(n, -x) for n, x in zip(self.names, self.exponents) if x < 0]
        top = "*".join(num) if num else "1"
        if not den:
            return top
        bottom = den[0] if len(den) == 1 else "(" + "*".join(den) + ")"
        return f"{top}/{bottom}"


@dataclass(frozen=True)
class PiDecomposition:
    A: RatMatrix
    beta: Tuple[Fraction, ...]
    names: Tuple[str, ...]
    target_name: str
    r: int
    y: Tuple[Number, ...]
    delta: Number
    X: Tuple[Tuple[Fraction, ...], ...]
    M: Fraction
    D: np.ndarray = field(repr=False, compare=False)
    D_norm: float
    Xdag: Optional[np.ndarray] = field(repr=False, compare=False)
    Xdag_norm: float
    pi_groups: Tuple[PiGroup, ...]
    template: str
    C: Optional[float] = None

    @property
    def m(self) -> int:
        return self.A.rows

    @property
    def n(self) -> int:
        return self.A.cols

    @property
    def k(self) -> int:
        return self.n - self.r

    @property
    def exact(self) -> bool:
        """True when ``y`` is rational and ``A y = beta`` holds exactly."""
        return isinstance(self.delta, Fraction) and self.delta == 0

    @property
    def y_float(self) -> np.ndarray:
        return np.array([float(v) for v in self.y])

    def monomial(self, v: Sequence[float]) -> float:
        """``v**y``."""
        return float(np.exp(self.y_float @ np.log(np.asarray(v, dtype=float))))

    def pi(self, v: Sequence[float]) -> np.ndarray:
        """``(pi_1(v), ..., pi_k(v))``."""
        if self.k == 0:
            return np.zeros(0)
        X = np.array([[float(x) for x in row] for row in self.X])
        return np.exp(X @ np.log(np.asarray(v, dtype=float)))


def _render_template(target: str, names: Sequence[str], y, pis, k: int) -> str:
    head = "C" if k == 0 else "G(" + ", ".join(str(p) for p in pis) + ")"
    terms = [_power_term(n, e) for n, e in zip(names, y) if e != 0]
    return " * ".join([f"{target} = {head}", *terms])


def _residual(A: RatMatrix, y, beta) -> Number:
    if all(isinstance(v, Fraction) for v in y):
        return max(abs(a - b) for a, b in zip(A @ y, beta))
    r = A.to_numpy() @ np.array([float(v) for v in y]) - np.array([float(b) for b in beta])
    return float(np.max(np.abs(r)))


def _as_exponents(y) -> Tuple[Number, ...]:
    out = []
    for v in y:
        if isinstance(v, float):
            out.append(v)
        elif isinstance(v, np.floating):
            out.append(float(v))
        else:
            out.append(to_fraction(v))
    return tuple(out)


def decompose(prob: DimensionProblem, y: Optional[Sequence] = None) -> PiDecomposition:
    """Assemble the full decomposition of ``prob``.

    ``y`` overrides the minimum-norm exponents (used to study ``delta > 0``).
    The decomposition is produced even when the target is not in the range
    of ``A``; ``delta`` then reports the misfit.
    """
    A = build_matrix(prob)
    beta = prob.beta
    r = rank(A)
    if y is None:
        y, delta = min_norm_solve(A, beta)
    else:
        y = _as_exponents(y)
        if len(y) != A.cols:
            raise ValueError(f"exponent override has {len(y)} entries, expected {A.cols}")
        delta = _residual(A, y, beta)
    X = tuple(kernel_basis(A))
    M = max((abs(x) for row in X for x in row), default=Fraction(0))
    D = pinv_exact(A.T).to_numpy()
    if X:
        Xmat = RatMatrix(X)
        Xdag = pinv_exact(Xmat).to_numpy()
        Xdag_norm = inf_norm(Xdag)
    else:
        Xdag, Xdag_norm = None, 0.0
    pis = tuple(PiGroup(x, prob.names) for x in X)
    k = A.cols - r
    template = _render_template(prob.target.name, prob.names, y, pis, k)
    C = None
    if prob.candidate is not None and k == 0:
        ones = [1.0] * A.cols
        try:
            C = float(prob.candidate(ones))
        except Exception as exc:
            raise EvaluationError(ones, exc) from exc
    return PiDecomposition(
        A=A,
        beta=beta,
        names=prob.names,
        target_name=prob.target.name,
        r=r,
        y=tuple(y),
        delta=delta,
        X=X,
        M=M,
        D=D,
        D_norm=inf_norm(D),
        Xdag=Xdag,
        Xdag_norm=Xdag_norm,
        pi_groups=pis,
        template=template,
        C=C,
    )


def psi(dec: PiDecomposition, w: Sequence[float]) -> np.ndarray:
    """A point ``u`` with ``pi(u) = w``: ``u = exp(X+ log w)``."""
    if dec.k == 0:
        raise ValueError("psi is only defined when the kernel is nontrivial")
    w = np.asarray(w, dtype=float).reshape(-1)
    if w.shape != (dec.k,):
        raise ValueError(f"expected {dec.k} group values, got {w.size}")
    if not np.all(w > 0):
        raise ValueError("group values must be positive")
    return np.exp(dec.Xdag @ np.log(w))


def reconstruct_G(dec: PiDecomposition, F: ScalarFunction) -> Callable[[Sequence[float]], float]:
    """Return ``w -> F(psi(w)) / psi(w)**y``."""
    if dec.k == 0:
        raise ValueError("G only exists for a rank-deficient dimension matrix")

    def G(w: Sequence[float]) -> float:
        u = psi(dec, w)
        return F(u) / dec.monomial(u)

    return G


def compose(dec: PiDecomposition, H: Callable[[np.ndarray], float]) -> ScalarFunction:
    """Build ``F(v) = H(pi(v)) * v**y``; for ``k = 0``, ``H`` gets an empty array."""

    def F(v: Sequence[float]) -> float:
        return H(dec.pi(v)) * dec.monomial(v)

    return F


def perturb_exponents(dec: PiDecomposition, delta: Number) -> Tuple[Fraction, ...]:
    """Shift ``y`` along ``A+ 1`` so that ``||A y' - A y||_inf == delta``.

    If ``A+ 1`` is zero, the first unit vector ``e_i`` with ``A+ e_i != 0``
    takes the place of ``1``.

    When ``A y = beta`` the new residual is exactly ``delta``.
    """
    delta = Fraction(str(delta)) if isinstance(delta, float) else to_fraction(delta)
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    if delta == 0:
        return tuple(dec.y)
    if not all(isinstance(v, Fraction) for v in dec.y):
        raise ValueError("perturbation needs exact exponents")
    Ap = pinv_exact(dec.A)
    ones = [Fraction(1)] * dec.m
    units = [[Fraction(int(i == j)) for i in range(dec.m)] for j in range(dec.m)]
    # 1 may be orthogonal to the range of A; then use a unit vector instead
    for target in [ones, *units]:
        direction = Ap @ target
        size = max(abs(x) for x in dec.A @ direction)
        if size:
            break
    else:
        raise ValueError("the dimension matrix is zero; y cannot be perturbed")
    s = delta / size
    return tuple(v + s * d for v, d in zip(dec.y, direction))


def dimensionless_check(dec: PiDecomposition) -> List[bool]:
    """For each group, whether ``A x_s = 0`` holds exactly."""
    return [all(v == 0 for v in dec.A @ x) for x in dec.X]
