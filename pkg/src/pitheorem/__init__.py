"""Dimensional analysis with Buckingham pi decompositions and error bounds."""

from .bounds import (
    BoundReport,
    EpsilonEstimate,
    VerifyReport,
    bound_theorem1,
    bound_theorem2,
    estimate_epsilon,
    make_perturbed,
    verify_bound,
)
from .dimcore import (
    MKS_BASIS,
    SI_BASIS,
    Dimension,
    DimensionError,
    Quantity,
    ScaleVector,
    coordinate_in,
    equivalent,
    qty_add,
    qty_inv,
    qty_mul,
    quantity_from,
)
from .exprlang import compile_expr, eval_expr, parse_expr
from .pengine import (
    DimensionProblem,
    EvaluationError,
    PiDecomposition,
    Variable,
    build_matrix,
    decompose,
    psi,
    reconstruct_G,
)
from .ratlinalg import RatMatrix, inf_norm, kernel_basis, min_norm_solve, pinv, rank, rref
from .unitreg import lookup, parse_unit, quantity_of

__version__ = "0.1.0"
