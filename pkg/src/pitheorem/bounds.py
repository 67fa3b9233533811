"""Approximate scale invariance: estimation, error bounds and test functions.

A function ``F`` on the positive orthant scales with defect ``eps`` if

    |F(v * c**A) - F(v) c**beta| <= eps |F(v)| c**beta

for all ``v`` and all positive ``c``.  :func:`estimate_epsilon` reports the
largest defect seen on random samples, which is only a lower bound on the
true ``eps``.  :func:`verify_bound` checks the error estimate for the
decomposition ``F(v) ~ C v**y`` (full column rank) or
``F(v) ~ G(pi(v)) v**y`` (rank deficient) on random points of the box
``[1/K, K]**n``.
"""

from __future__ import annotations

import hashlib
import math
import struct
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence, Tuple, Union

import numpy as np

from .dimcore import Dimension
from .pengine import (
    DimensionProblem,
    EvaluationError,
    PiDecomposition,
    ScalarFunction,
    Variable,
    decompose,
    reconstruct_G,
)
from .ratlinalg import RatMatrix, rank

# floating-point slack when checking a strictly positive bound
BOUND_RTOL = 1e-12
# stands in for the bound when the theory gives exactly 0
ZERO_BOUND_TOL = 1e-9


@dataclass(frozen=True)
class EpsilonEstimate:
    eps_hat: float
    samples: int
    K_v: float
    L_c: float
    worst_case: Optional[Tuple[Tuple[float, ...], Tuple[float, ...]]]


@dataclass(frozen=True)
class BoundReport:
    eps: float
    delta: float
    K: float
    m: int
    n: int
    D_norm: float
    M: float
    Xdag_norm: float
    bound: float
    theorem: int


@dataclass(frozen=True)
class VerifyReport:
    bound: BoundReport
    trials: int
    violations: int
    max_ratio: float
    max_residual: float
    worst_v: Tuple[float, ...]
    eps_hat: Optional[float] = None

    @property
    def ok(self) -> bool:
        return self.violations == 0


def _call(F: ScalarFunction, v: np.ndarray) -> float:
    try:
        out = float(F(v))
    except Exception as exc:
        raise EvaluationError(v, exc) from exc
    if math.isnan(out):
        raise EvaluationError(v, ValueError("result is NaN"))
    return out


def _check_box(name: str, K: float):
    if not K > 1:
        raise ValueError(f"{name} must be greater than 1, got {K}")


def sample_boxes(
    n: int, m: int, K_v: float, L_c: float, samples: int, seed: int, anchor: bool = True
) -> Tuple[np.ndarray, np.ndarray]:
    """Log-uniform samples ``v`` in ``[1/K_v, K_v]**n`` and ``c`` in ``[1/L_c, L_c]**m``.

    ``v`` and ``c`` come from independent streams, so the first ``N`` rows
    do not depend on ``samples``.  With ``anchor`` the first ``v`` is the
    all-ones point.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    _check_box("K_v", K_v)
    _check_box("L_c", L_c)
    v_seq, c_seq = np.random.SeedSequence(seed).spawn(2)
    lv = np.log(K_v) * np.random.default_rng(v_seq).uniform(-1.0, 1.0, size=(samples, n))
    lc = np.log(L_c) * np.random.default_rng(c_seq).uniform(-1.0, 1.0, size=(samples, m))
    V = np.exp(lv)
    if anchor:
        V[0] = 1.0
    return V, np.exp(lc)


def sample_points(n: int, K: float, samples: int, seed: int) -> np.ndarray:
    """Log-uniform points of ``[1/K, K]**n``."""
    _check_box("K", K)
    u = np.random.default_rng(seed).uniform(-1.0, 1.0, size=(samples, n))
    return np.exp(np.log(K) * u)


def _float_matrix(A) -> np.ndarray:
    if isinstance(A, RatMatrix):
        return A.to_numpy()
    return np.array([[float(x) for x in row] for row in A], dtype=float)


def estimate_epsilon(
    F: ScalarFunction,
    A,
    beta: Union[Dimension, Sequence],
    K_v: float = 2.0,
    L_c: float = 2.0,
    samples: int = 1000,
    seed: int = 0,
    anchor: bool = True,
) -> EpsilonEstimate:
    """Largest sampled scaling defect of ``F`` (a lower bound on ``eps``)."""
    Af = _float_matrix(A)
    b = np.array([float(x) for x in beta])
    m, n = Af.shape
    if b.shape != (m,):
        raise ValueError(f"beta has {b.size} entries, the matrix has {m} rows")
    V, Cs = sample_boxes(n, m, K_v, L_c, samples, seed, anchor)
    best, worst = 0.0, None
    for v, c in zip(V, Cs):
        logc = np.log(c)
        cA = np.exp(logc @ Af)
        cb = math.exp(float(logc @ b))
        fv = _call(F, v)
        fvc = _call(F, v * cA)
        if fv == 0:
            ratio = 0.0 if fvc == 0 else math.inf
        else:
            ratio = abs(fvc - fv * cb) / (abs(fv) * cb)
        if worst is None or ratio > best:
            best, worst = ratio, (tuple(v.tolist()), tuple(c.tolist()))
    return EpsilonEstimate(best, samples, K_v, L_c, worst)


def _check_common(eps: float, delta: float, K: float):
    if eps < 0 or delta < 0:
        raise ValueError("eps and delta must be nonnegative")
    _check_box("K", K)


def bound_theorem1(eps: float, delta: float, K: float, m: int, D_norm: float) -> float:
    """``(1 + eps) K**(m delta ||D||) - 1`` for a full-column-rank matrix."""
    _check_common(eps, delta, K)
    return (1.0 + eps) * K ** (m * float(delta) * D_norm) - 1.0


def bound_theorem2(
    eps: float,
    delta: float,
    K: float,
    m: int,
    n: int,
    D_norm: float,
    M: float,
    Xdag_norm: float,
) -> float:
    """``(1 + eps) K**(m delta ||D|| (n M ||X+|| + 1)) - 1`` for a rank-deficient matrix."""
    _check_common(eps, delta, K)
    growth = n * float(M) * Xdag_norm + 1.0
    return (1.0 + eps) * K ** (m * float(delta) * D_norm * growth) - 1.0


def bound_report(dec: PiDecomposition, eps: float, K: float) -> BoundReport:
    """Evaluate whichever bound applies to ``dec``."""
    delta = float(dec.delta)
    if dec.k == 0:
        value = bound_theorem1(eps, delta, K, dec.m, dec.D_norm)
    else:
        value = bound_theorem2(eps, delta, K, dec.m, dec.n, dec.D_norm, dec.M, dec.Xdag_norm)
    return BoundReport(
        eps=float(eps),
        delta=delta,
        K=float(K),
        m=dec.m,
        n=dec.n,
        D_norm=dec.D_norm,
        M=float(dec.M),
        Xdag_norm=dec.Xdag_norm,
        bound=value,
        theorem=1 if dec.k == 0 else 2,
    )


def tau_epsilon(tau: float) -> float:
    """Scaling defect guaranteed for ``H(v) v**y`` with ``H`` valued in ``[1-tau, 1+tau]``."""
    return (1.0 + tau) / (1.0 - tau) - 1.0


def _quantize(v: Sequence[float]) -> bytes:
    return ",".join(f"{float(x):.5e}" for x in v).encode()


def hash_field(tau: float, seed: int) -> Callable[[Sequence[float]], float]:
    """Deterministic pseudo-random ``H`` valued in ``[1 - tau, 1 + tau]``.

    ``v`` is rounded to 6 significant digits before hashing, so equal
    inputs always give equal outputs.
    """
    key = struct.pack("<q", seed)

    def H(v: Sequence[float]) -> float:
        digest = hashlib.blake2b(_quantize(v), digest_size=8, key=key).digest()
        u = int.from_bytes(digest, "little") / 2.0**64
        return 1.0 - tau + 2.0 * tau * u

    return H


def two_valued_field(tau: float) -> Callable[[Sequence[float]], float]:
    """``H(1, ..., 1) = 1 - tau`` and ``H = 1 + tau`` everywhere else."""

    def H(v: Sequence[float]) -> float:
        return 1.0 - tau if all(float(x) == 1.0 for x in v) else 1.0 + tau

    return H


def _check_tau(tau: float):
    if not 0 <= tau < 1:
        raise ValueError(f"tau must lie in [0, 1), got {tau}")


def make_perturbed(
    y: Sequence, tau: float, seed: int = 0, H: Optional[Callable] = None
) -> ScalarFunction:
    """``F(v) = H(v) v**y`` with ``H`` a pseudo-random field in ``[1-tau, 1+tau]``.

    If ``A y = beta`` then ``F`` scales with defect at most
    ``(1+tau)/(1-tau) - 1``, yet for ``tau > 0`` it is generally not exactly
    scale invariant.
    """
    _check_tau(tau)
    yf = np.array([float(x) for x in y])
    if H is None:
        H = hash_field(tau, seed) if tau > 0 else (lambda v: 1.0)

    def F(v: Sequence[float]) -> float:
        v = np.asarray(v, dtype=float)
        return H(v) * float(np.exp(yf @ np.log(v)))

    F.H = H
    F.tau = tau
    return F


def verify_bound(
    prob: Union[DimensionProblem, PiDecomposition],
    F: ScalarFunction,
    K: float = 2.0,
    eps: Optional[float] = None,
    trials: int = 1000,
    seed: int = 0,
    y: Optional[Sequence] = None,
) -> VerifyReport:
    """Check ``|F(v) - approx(v)| <= |F(v)| * bound`` at random ``v`` in ``[1/K, K]**n``.

    ``approx`` is ``C v**y`` with ``C = F(1, ..., 1)`` when the dimension
    matrix has full column rank, and ``G(pi(v)) v**y`` with ``G`` rebuilt
    from ``F`` otherwise.  When ``eps`` is omitted it is estimated from the
    same number of samples (which may under-estimate it).
    """
    _check_box("K", K)
    dec = prob if isinstance(prob, PiDecomposition) else decompose(prob, y=y)
    eps_hat = None
    if eps is None:
        est = estimate_epsilon(F, dec.A, dec.beta, K_v=K, L_c=K, samples=trials, seed=seed)
        eps_hat = eps = est.eps_hat
    report = bound_report(dec, eps, K)
    b = report.bound

    if dec.k == 0:
        C = _call(F, np.ones(dec.n))

        def approx(v):
            return C * dec.monomial(v)

    else:
        G = reconstruct_G(dec, F)

        def approx(v):
            w = dec.pi(v)
            try:
                g = G(w)
            except Exception as exc:
                raise EvaluationError(v, exc) from exc
            return g * dec.monomial(v)

    V = sample_points(dec.n, K, trials, seed)
    violations = 0
    max_ratio = max_residual = 0.0
    worst_v = tuple(V[0].tolist())
    for v in V:
        fv = _call(F, v)
        lhs = abs(fv - approx(v))
        scale = abs(fv)
        allowed = scale * (b + BOUND_RTOL) if b > 0 else scale * ZERO_BOUND_TOL
        if lhs > allowed:
            violations += 1
        residual = lhs / scale if scale > 0 else (0.0 if lhs == 0 else math.inf)
        ratio = residual / b if b > 0 else residual / ZERO_BOUND_TOL
        if ratio > max_ratio:
            max_ratio, worst_v = ratio, tuple(v.tolist())
        max_residual = max(max_residual, residual)
    return VerifyReport(report, trials, violations, max_ratio, max_residual, worst_v, eps_hat)


def random_problem(
    rng: np.random.Generator,
    m: int,
    n: int,
    deficient: Optional[bool] = None,
    entries: int = 3,
) -> Tuple[DimensionProblem, Tuple[Fraction, ...]]:
    """A random problem with integer dimensions in ``[-entries, entries]``.

    The target is ``A y0`` for a random rational ``y0`` (returned alongside),
    so it always lies in the range of ``A``.  ``deficient=False`` forces full
    column rank (needs ``n <= m``), ``True`` forces ``rank(A) < n``.
    """
    if deficient is False and n > m:
        raise ValueError("full column rank needs n <= m")
    if deficient and n == 1:
        raise ValueError("a single nonzero column always has full rank")
    while True:
        A = rng.integers(-entries, entries + 1, size=(m, n))
        if deficient and n <= m and n > 1:
            # copy or negate an existing column to force a dependency
            j, i = rng.choice(n, size=2, replace=False)
            A[:, j] = A[:, i] * rng.choice([-1, 1])
        if not A.any():
            continue
        R = RatMatrix(A.tolist())
        r = rank(R)
        if deficient is False and r < n:
            continue
        if deficient and r == n:
            continue
        break
    y0 = tuple(Fraction(int(a), int(d)) for a, d in zip(rng.integers(-2, 3, n), rng.integers(1, 3, n)))
    basis = tuple(f"u{i + 1}" for i in range(m))
    beta = R @ y0
    variables = tuple(
        Variable(f"p{j + 1}", Dimension(R.column(j), basis)) for j in range(n)
    )
    return DimensionProblem(variables, Variable("q", Dimension(beta, basis))), y0
