"""Small dense linear algebra over the rationals, plus the float pieces.

Rank, kernel and row reduction are exact (``fractions.Fraction``).  The
Moore-Penrose pseudoinverse of a rational matrix is computed exactly from
a rank factorisation; real-valued input falls back to an SVD.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import reduce
from typing import List, Sequence, Tuple

import numpy as np

from .dimcore import Rational, to_fraction

DEFAULT_RTOL = 1e-12


class RatMatrix:
    """Immutable dense matrix of Fractions."""

    __slots__ = ("_rows", "rows", "cols")

    def __init__(self, data: Sequence[Sequence[Rational]]):
        rows = tuple(tuple(to_fraction(x) for x in row) for row in data)
        if not rows or not rows[0]:
            raise ValueError("a matrix needs at least one row and one column")
        if any(len(r) != len(rows[0]) for r in rows):
            raise ValueError("ragged matrix")
        object.__setattr__(self, "_rows", rows)
        object.__setattr__(self, "rows", len(rows))
        object.__setattr__(self, "cols", len(rows[0]))

    def __setattr__(self, name, value):
        raise AttributeError("RatMatrix is immutable")

    @classmethod
    def zeros(cls, m: int, n: int) -> "RatMatrix":
        return cls([[0] * n for _ in range(m)])

    @classmethod
    def identity(cls, n: int) -> "RatMatrix":
        return cls([[int(i == j) for j in range(n)] for i in range(n)])

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[Rational]]) -> "RatMatrix":
        return cls([list(r) for r in zip(*columns)])

    @property
    def shape(self) -> Tuple[int, int]:
        return self.rows, self.cols

    def __getitem__(self, ij):
        i, j = ij
        return self._rows[i][j]

    def row(self, i: int) -> Tuple[Fraction, ...]:
        return self._rows[i]

    def column(self, j: int) -> Tuple[Fraction, ...]:
        return tuple(r[j] for r in self._rows)

    def tolist(self) -> List[List[Fraction]]:
        return [list(r) for r in self._rows]

    @property
    def T(self) -> "RatMatrix":
        return RatMatrix(list(zip(*self._rows)))

    def __matmul__(self, other):
        if isinstance(other, RatMatrix):
            if self.cols != other.rows:
                raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
            cols = list(zip(*other._rows))
            return RatMatrix(
                [[sum(a * b for a, b in zip(r, c)) for c in cols] for r in self._rows]
            )
        vec = [to_fraction(x) if not isinstance(x, Fraction) else x for x in other]
        if len(vec) != self.cols:
            raise ValueError(f"shape mismatch {self.shape} @ vector of {len(vec)}")
        return tuple(sum(a * b for a, b in zip(r, vec)) for r in self._rows)

    def __eq__(self, other):
        if not isinstance(other, RatMatrix):
            return NotImplemented
        return self._rows == other._rows

    def __hash__(self):
        return hash(self._rows)

    def __repr__(self):
        body = "; ".join(" ".join(str(x) for x in r) for r in self._rows)
        return f"RatMatrix([{body}])"

    def to_numpy(self) -> np.ndarray:
        return np.array([[float(x) for x in r] for r in self._rows], dtype=float)


def _as_ratmatrix(A) -> RatMatrix:
    return A if isinstance(A, RatMatrix) else RatMatrix(A)


def rref(A) -> Tuple[RatMatrix, List[int]]:
    """Reduced row echelon form and the (0-based) pivot columns."""
    A = _as_ratmatrix(A)
    M = A.tolist()
    m, n = A.shape
    pivots = []
    r = 0
    for c in range(n):
        if r == m:
            break
        piv = next((i for i in range(r, m) if M[i][c] != 0), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        p = M[r][c]
        M[r] = [x / p for x in M[r]]
        for i in range(m):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
    return RatMatrix(M), pivots


def rank(A) -> int:
    return len(rref(A)[1])


def _integer_primitive(vec: Sequence[Fraction]) -> Tuple[Fraction, ...]:
    """Scale to coprime integers with the first nonzero entry positive."""
    den = reduce(math.lcm, (x.denominator for x in vec), 1)
    ints = [int(x * den) for x in vec]
    g = reduce(math.gcd, ints, 0)
    if g == 0:
        return tuple(Fraction(0) for _ in vec)
    lead = next(x for x in ints if x != 0)
    sign = 1 if lead > 0 else -1
    return tuple(Fraction(sign * x // g) for x in ints)


def kernel_basis(A) -> List[Tuple[Fraction, ...]]:
    """Canonical basis of ``ker A``.

    One vector per free column of the RREF, each scaled to integers with
    content 1 and a positive leading entry.
    """
    A = _as_ratmatrix(A)
    R, pivots = rref(A)
    n = A.cols
    free = [j for j in range(n) if j not in pivots]
    basis = []
    for f in free:
        x = [Fraction(0)] * n
        x[f] = Fraction(1)
        for i, p in enumerate(pivots):
            x[p] = -R[i, f]
        basis.append(_integer_primitive(x))
    return basis


def inverse(A) -> RatMatrix:
    """Exact inverse of a square nonsingular matrix."""
    A = _as_ratmatrix(A)
    n = A.rows
    if A.cols != n:
        raise ValueError("inverse needs a square matrix")
    aug = RatMatrix([list(A.row(i)) + [int(i == j) for j in range(n)] for i in range(n)])
    R, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("matrix is singular")
    return RatMatrix([list(R.row(i))[n:] for i in range(n)])


def pinv_exact(A) -> RatMatrix:
    """Exact Moore-Penrose pseudoinverse via a rank factorisation.

    With ``A = C F`` (``C`` the pivot columns, ``F`` the nonzero RREF rows),
    ``A+ = F^T (F F^T)^-1 (C^T C)^-1 C^T``.
    """
    A = _as_ratmatrix(A)
    R, pivots = rref(A)
    r = len(pivots)
    if r == 0:
        return RatMatrix.zeros(A.cols, A.rows)
    C = RatMatrix.from_columns([A.column(j) for j in pivots])
    F = RatMatrix([R.row(i) for i in range(r)])
    return F.T @ inverse(F @ F.T) @ inverse(C.T @ C) @ C.T


def _is_rational_input(B) -> bool:
    if isinstance(B, RatMatrix):
        return True
    if isinstance(B, np.ndarray):
        return B.dtype.kind in "iub" or (
            B.dtype == object and all(isinstance(x, (int, Fraction)) for x in B.flat)
        )
    try:
        return all(
            isinstance(x, (int, Fraction)) and not isinstance(x, bool)
            for row in B
            for x in row
        )
    except TypeError:
        return False


def pinv(B, tol: float | None = None) -> np.ndarray:
    """Moore-Penrose pseudoinverse as a float array.

    Rational input (``RatMatrix``, integer arrays, nested lists of
    ints/Fractions) goes through :func:`pinv_exact`.  Anything else uses an
    SVD with singular values below ``tol`` treated as zero; the default
    cutoff is ``1e-12 * max(m, n) * sigma_max``.
    """
    if _is_rational_input(B):
        rat = _as_ratmatrix(B.tolist() if isinstance(B, np.ndarray) else B)
        return pinv_exact(rat).to_numpy()
    B = np.asarray(B, dtype=float)
    if B.ndim != 2:
        raise ValueError("pinv expects a 2-d matrix")
    if not np.all(np.isfinite(B)):
        raise ValueError("pinv input has non-finite entries")
    if tol is not None and tol < 0:
        raise ValueError("tol must be nonnegative")
    m, n = B.shape
    if B.size == 0 or not np.any(B):
        return np.zeros((n, m))
    U, s, Vt = np.linalg.svd(B, full_matrices=False)
    if tol is None:
        tol = DEFAULT_RTOL * max(m, n) * s[0]
    keep = s > tol
    return (Vt[keep].T / s[keep]) @ U[:, keep].T


def inf_norm(B) -> float:
    """Operator norm induced by the max-norm: the largest absolute row sum."""
    if isinstance(B, RatMatrix):
        return float(max(sum(abs(x) for x in B.row(i)) for i in range(B.rows)))
    B = np.asarray(B, dtype=float)
    if B.size == 0:
        return 0.0
    return float(np.max(np.sum(np.abs(B), axis=1)))


def min_norm_solve(A, b: Sequence[Rational]) -> Tuple[Tuple[Fraction, ...], Fraction]:
    """Minimum-norm least-squares solution ``y = A+ b`` and ``||A y - b||_inf``.

    Everything is exact, so ``delta == 0`` precisely when ``b`` lies in the
    range of ``A``.
    """
    A = _as_ratmatrix(A)
    b = tuple(to_fraction(x) for x in b)
    if len(b) != A.rows:
        raise ValueError(f"right-hand side has {len(b)} entries, expected {A.rows}")
    y = pinv_exact(A) @ b
    residual = A @ y
    delta = max(abs(r - bi) for r, bi in zip(residual, b))
    return y, delta
