"""Toolkit for seminormed preordered vector spaces at desk scale.

Builds the order unitization E/N (+) R of a seminormed preordered space,
evaluates its order-unit norm in closed form, computes distances to convex
cones, extends positive linear maps, and runs randomized property suites.
"""

from ovs.core import (
    DEFAULT_TOL,
    DimensionMismatchError,
    IterationLimitError,
    LPProblem,
    LPResult,
    NotOrderUnitError,
    NotPolyhedralError,
    Subspace,
    TolerancePolicy,
    ToolkitError,
    UnsupportedDispatchError,
    orthonormalize,
    quotient_representative,
    solve_lp,
    solve_nnls,
    symmetric_eigh,
)

__all__ = [
    "DEFAULT_TOL",
    "DimensionMismatchError",
    "IterationLimitError",
    "LPProblem",
    "LPResult",
    "NotOrderUnitError",
    "NotPolyhedralError",
    "Subspace",
    "TolerancePolicy",
    "ToolkitError",
    "UnsupportedDispatchError",
    "orthonormalize",
    "quotient_representative",
    "solve_lp",
    "solve_nnls",
    "symmetric_eigh",
]
