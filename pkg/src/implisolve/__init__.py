"""Local implicit- and inverse-function solver on validated monotonicity boxes."""

from .config import SolverOptions
from .dini import SystemSolution, UniquenessReport, build_system, normalize
from .dual import Dual
from .errors import (
    BoxNotFound,
    DegenerateDerivative,
    DegenerateJacobian,
    DimensionMismatch,
    DomainError,
    ExprSyntaxError,
    ImpliSolveError,
    NoConvergence,
    NoSignChange,
    NotSquare,
    OutsideBox,
    RadiusUnderflow,
    SeedNotOnZeroSet,
    SingularMatrix,
    UnknownIdentifier,
)
from .expr import ExprFunction, parse
from .inverse import LocalInverse, build_inverse
from .linalg import (
    Matrix,
    Vector,
    det,
    hs_norm,
    identity,
    inverse,
    matmul,
    matvec,
    solve,
)
from .scalar_implicit import (
    ImplicitSolution,
    SolutionBox,
    SplitPoint,
    build_implicit,
    find_box,
)
from .verify import (
    check_chain_rule,
    check_operator_bound,
    injectivity_radius,
    mvt_witness,
)

__version__ = "0.1.0"

__all__ = [
    "SolverOptions",
    "SystemSolution",
    "UniquenessReport",
    "build_system",
    "normalize",
    "Dual",
    "ExprFunction",
    "parse",
    "LocalInverse",
    "build_inverse",
    "Matrix",
    "Vector",
    "det",
    "hs_norm",
    "identity",
    "inverse",
    "matmul",
    "matvec",
    "solve",
    "ImplicitSolution",
    "SolutionBox",
    "SplitPoint",
    "build_implicit",
    "find_box",
    "check_chain_rule",
    "check_operator_bound",
    "injectivity_radius",
    "mvt_witness",
    "ImpliSolveError",
    "ExprSyntaxError",
    "UnknownIdentifier",
    "DomainError",
    "DimensionMismatch",
    "NotSquare",
    "SingularMatrix",
    "SeedNotOnZeroSet",
    "DegenerateDerivative",
    "BoxNotFound",
    "OutsideBox",
    "NoConvergence",
    "NoSignChange",
    "DegenerateJacobian",
    "RadiusUnderflow",
]
