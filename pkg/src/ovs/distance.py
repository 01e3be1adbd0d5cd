"""Distance from a point to a convex cone under a seminorm.

``dist_to_cone`` computes d(x, K) = inf over y in K of p(x - y), the single
quantity the order unitization is built from.  Distances are always
measured to the topological closure of the cone, which leaves the value
unchanged and makes non-closed cones computable.

Method dispatch:

=====================  ======================  =========================
cone                   seminorm                method
=====================  ======================  =========================
Zero / Full            any                     closed form (p(x) / 0)
Orthant                (weighted) l_q          closed form on x^-
PSD                    order-unit, unit = I    spectral: max(0, -lambda_min)
V-rep polyhedral       (weighted) l_2          NNLS
polyhedral             polyhedral ball         LP on the gauge epigraph
H-rep polyhedral       (weighted) l_2          convert to V-rep, then NNLS
polyhedral             polyhedral ball         bisection (explicit request)
=====================  ======================  =========================
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ovs.core import (
    DEFAULT_TOL,
    LPProblem,
    ToolkitError,
    UnsupportedDispatchError,
    as_vector,
    solve_lp,
    solve_nnls,
    symmetric_eigh,
    sym_to_vec,
    vec_to_sym,
)
from ovs.cones import (
    Cone,
    DeclaredClosureCone,
    FullCone,
    HPolyCone,
    Orthant,
    PSDCone,
    VPolyCone,
    ZeroCone,
    convert_representation,
)
from ovs.seminorms import LqNorm, OrderUnitSeminorm, Seminorm, WeightedLqNorm

METHODS = ("closed_form", "spectral", "nnls", "lp", "bisection")

_DISPATCH_TABLE = __doc__


def _is_lq(p):
    return isinstance(p, (LqNorm, WeightedLqNorm))


def _lq_weights(p):
    if isinstance(p, WeightedLqNorm):
        return p.weights
    return np.ones(p.ambient_dim)


def _spectral_applicable(cone, p):
    return (
        isinstance(cone, PSDCone)
        and isinstance(p, OrderUnitSeminorm)
        and isinstance(p.cone, PSDCone)
        and p.cone.side == cone.side
        and np.allclose(p.unit, sym_to_vec(np.eye(cone.side)), atol=1e-12)
    )


def _polyhedral_cone_data(cone, tol):
    """Return ("v", generators) or ("h", normals) for polyhedral cones, else None."""
    if isinstance(cone, (Orthant, VPolyCone)):
        return "v", cone.generators(tol)
    if isinstance(cone, ZeroCone):
        return "v", np.zeros((0, cone.dim))
    if isinstance(cone, HPolyCone):
        return "h", cone.normals_
    return None


def admissible_methods(cone, p, tol=DEFAULT_TOL):
    """Methods the dispatch table admits for this (cone, seminorm) pair."""
    cone = cone.closure()
    out = []
    if isinstance(cone, (ZeroCone, FullCone)):
        return ("closed_form",)
    if isinstance(cone, Orthant) and _is_lq(p):
        out.append("closed_form")
    if _spectral_applicable(cone, p):
        out.append("spectral")
    data = _polyhedral_cone_data(cone, tol)
    if data is not None and _is_lq(p) and p.q == 2.0:
        out.append("nnls")
    if data is not None and p.is_polyhedral:
        out.append("lp")
        out.append("bisection")
    return tuple(out)


def dist_to_cone(x, cone, p, tol=DEFAULT_TOL, method=None):
    """d(x, K) = inf over y in K of p(x - y); nonnegative, zero exactly on
    the closure of K (within tolerance)."""
    cone = cone.closure()
    x = as_vector(x, cone.dim)
    if p.ambient_dim != cone.dim:
        raise ToolkitError("seminorm and cone dimensions differ")
    methods = admissible_methods(cone, p, tol)
    if method is None:
        if not methods:
            raise UnsupportedDispatchError(
                "no admissible distance method for "
                f"({type(cone).__name__}, {type(p).__name__});\n{_DISPATCH_TABLE}"
            )
        method = methods[0]
    elif method not in methods:
        raise UnsupportedDispatchError(
            f"method {method!r} is not admissible for "
            f"({type(cone).__name__}, {type(p).__name__}); admissible: {methods}"
        )
    value, _ = _dispatch(x, cone, p, tol, method, want_witness=False)
    return value


def dist_witness(x, cone, p, tol=DEFAULT_TOL, method=None):
    """A minimizer y* in K with p(x - y*) = d(x, K), when the method yields one."""
    cone = cone.closure()
    x = as_vector(x, cone.dim)
    methods = admissible_methods(cone, p, tol)
    if method is None:
        witnessing = [m for m in methods if m != "bisection"]
        if not witnessing:
            raise UnsupportedDispatchError(
                "no witness-producing method for this pair (bisection cannot "
                "produce witnesses)"
            )
        method = witnessing[0]
    elif method == "bisection":
        raise UnsupportedDispatchError("bisection cannot produce witnesses")
    elif method not in methods:
        raise UnsupportedDispatchError(f"method {method!r} not admissible")
    _, witness = _dispatch(x, cone, p, tol, method, want_witness=True)
    return witness


def _dispatch(x, cone, p, tol, method, want_witness):
    if method == "closed_form":
        if isinstance(cone, ZeroCone):
            return float(p.evaluate(x)), np.zeros(cone.dim)
        if isinstance(cone, FullCone):
            return 0.0, x.copy()
        # orthant: coordinates decouple, the projection is the positive part
        y = np.maximum(x, 0.0)
        return float(p.evaluate(x - y)), y
    if method == "spectral":
        a = vec_to_sym(x, cone.side)
        vals, vecs = symmetric_eigh(a, tol)
        d = float(max(0.0, -vals[0]))
        if not want_witness:
            return d, None
        plus = vecs @ np.diag(np.maximum(vals, 0.0)) @ vecs.T
        return d, sym_to_vec(plus)
    if method == "nnls":
        kind, gens = _polyhedral_cone_data(cone, tol)
        if kind == "h":
            gens = convert_representation(cone, "vpoly", tol).rays
        w = _lq_weights(p)
        if gens.shape[0] == 0:
            return float(np.linalg.norm(w * x)), np.zeros(cone.dim)
        A = (w[:, None] * gens.T)
        c = solve_nnls(A, w * x, tol)
        y = gens.T @ c
        return float(np.linalg.norm(w * (x - y))), y
    if method == "lp":
        return _distance_lp(x, cone, p, tol)
    if method == "bisection":
        return _distance_bisection(x, cone, p, tol), None
    raise UnsupportedDispatchError(f"unknown method {method!r}")  # pragma: no cover


def _distance_lp(x, cone, p, tol):
    """min t s.t. x - y in t * ball, y in K, via the ball's H-rep gauge."""
    ball = p.unit_ball_hrep(tol)
    A, c = ball.normals, ball.offsets
    kind, data = _polyhedral_cone_data(cone, tol)
    n = cone.dim
    if kind == "v":
        gens = data
        k = gens.shape[0]
        if k == 0:
            return float(p.evaluate(x)), np.zeros(n)
        # vars (t, coeffs >= 0):  <a_j, x> - <a_j, G c> <= c_j t
        A_ub = np.hstack([-c[:, None], -(A @ gens.T)])
        b_ub = -(A @ x)
        obj = np.zeros(1 + k)
        obj[0] = 1.0
        res = solve_lp(LPProblem(objective=obj, A_ub=A_ub, b_ub=b_ub), tol)
        if res.status != "optimal":  # pragma: no cover - bounded below by 0
            raise ToolkitError(f"distance LP ended with status {res.status}")
        y = gens.T @ res.x[1:]
        return max(0.0, float(res.value)), y
    # H-rep cone: vars (t >= 0, y free)
    H = data
    m = H.shape[0]
    A_ub = np.zeros((A.shape[0] + m, 1 + n))
    A_ub[: A.shape[0], 0] = -c
    A_ub[: A.shape[0], 1:] = -A
    A_ub[A.shape[0]:, 1:] = -H
    b_ub = np.concatenate([-(A @ x), np.zeros(m)])
    obj = np.zeros(1 + n)
    obj[0] = 1.0
    bounds = [(0.0, None)] + [(None, None)] * n
    res = solve_lp(LPProblem(objective=obj, A_ub=A_ub, b_ub=b_ub, bounds=bounds), tol)
    if res.status != "optimal":  # pragma: no cover
        raise ToolkitError(f"distance LP ended with status {res.status}")
    return max(0.0, float(res.value)), res.x[1:]


def _distance_bisection(x, cone, p, tol):
    """Bracket lambda in [0, p(x)] (valid since 0 is in the cone) and test
    whether (x + lambda * ball) meets K by LP feasibility on the ball vertices."""
    ball_vertices = p.unit_ball_hrep(tol).to_vpolyhedron(tol)
    if ball_vertices.rays.shape[0]:
        # degenerate seminorm: translate the recession directions into the cone test
        raise UnsupportedDispatchError(
            "bisection requires a bounded unit ball (use the LP method instead)"
        )
    W = ball_vertices.vertices
    kind, data = _polyhedral_cone_data(cone, tol)

    def intersects(lam):
        nv = W.shape[0]
        if kind == "v":
            gens = data
            k = gens.shape[0]
            A_eq = np.vstack([
                np.hstack([lam * W.T, -gens.T if k else np.zeros((cone.dim, 0))]),
                np.concatenate([np.ones(nv), np.zeros(k)])[None, :],
            ])
            b_eq = np.concatenate([-x, [1.0]])
            res = solve_lp(LPProblem(objective=np.zeros(nv + k), A_eq=A_eq, b_eq=b_eq), tol)
            return res.status == "optimal"
        H = data
        A_ub = np.vstack([-lam * (H @ W.T), ])
        b_ub = H @ x
        A_eq = np.ones((1, nv))
        b_eq = np.array([1.0])
        res = solve_lp(
            LPProblem(objective=np.zeros(nv), A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq),
            tol,
        )
        return res.status == "optimal"

    hi = float(p.evaluate(x))
    if hi <= tol.abs_tol or intersects(0.0):
        return 0.0
    lo = 0.0
    while hi - lo > tol.bisection_tol * 0.25:
        mid = 0.5 * (lo + hi)
        if intersects(mid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class DistanceOracle:
    """A (cone, seminorm, method) triple packaged as a callable distance."""

    cone: Cone
    seminorm: Seminorm
    method: str | None = None

    def __post_init__(self):
        if self.method is not None:
            methods = admissible_methods(self.cone, self.seminorm)
            if self.method not in methods:
                raise UnsupportedDispatchError(
                    f"method {self.method!r} not admissible; admissible: {methods}"
                )

    def __call__(self, x, tol=DEFAULT_TOL):
        return dist_to_cone(x, self.cone, self.seminorm, tol, self.method)

    def witness(self, x, tol=DEFAULT_TOL):
        return dist_witness(x, self.cone, self.seminorm, tol, self.method)
