"""Evaluable seminorms and their unit-ball geometry.

Variants: plain and weighted l_q for q in {1, 2, inf}, Minkowski gauges of
symmetric polytopes, order-unit seminorms over a cone with designated unit,
and pullbacks through a linear map (the route to genuinely degenerate
seminorms with nontrivial kernel).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from ovs.core import (
    DEFAULT_TOL,
    DimensionMismatchError,
    NotOrderUnitError,
    NotPolyhedralError,
    Subspace,
    as_matrix,
    as_vector,
    sym_to_vec,
    symmetric_eigh,
    vec_to_sym,
)
from ovs.cones import HPolyCone, Orthant, PSDCone, ZeroCone
from ovs.polyhedra import HPolytope, null_space_basis

_ALLOWED_Q = (1, 2, np.inf)


def _check_q(q):
    q = float(q)
    if q not in (1.0, 2.0, np.inf):
        raise ValueError("q must be one of 1, 2, inf (these keep every solver path exact)")
    return q


class Seminorm:
    """Absolutely homogeneous, subadditive, nonnegative functional."""

    ambient_dim = None

    def evaluate(self, x):
        raise NotImplementedError

    def __call__(self, x):
        return self.evaluate(x)

    @property
    def is_polyhedral(self):
        return False

    def unit_ball_hrep(self, tol=DEFAULT_TOL):
        """Closed unit ball in H-rep; raises NotPolyhedralError otherwise.

        Open balls are never materialized; membership-time strictness flags
        on the returned polytope cover the open/closed distinction.
        """
        raise NotPolyhedralError(f"{type(self).__name__} is not polyhedral")

    def kernel_subspace(self, tol=DEFAULT_TOL):
        """The subspace where the seminorm vanishes."""
        return Subspace.zero(self.ambient_dim)


@dataclass(frozen=True)
class LqNorm(Seminorm):
    q: float
    dim: int

    def __post_init__(self):
        object.__setattr__(self, "q", _check_q(self.q))

    @property
    def ambient_dim(self):
        return self.dim

    def evaluate(self, x):
        x = as_vector(x, self.dim)
        if self.q == 1.0:
            return float(np.abs(x).sum())
        if self.q == 2.0:
            return float(np.linalg.norm(x))
        return float(np.abs(x).max(initial=0.0))

    @property
    def is_polyhedral(self):
        return self.q in (1.0, np.inf)

    def unit_ball_hrep(self, tol=DEFAULT_TOL):
        if self.q == 2.0:
            raise NotPolyhedralError("the l2 ball is not polyhedral")
        if self.q == np.inf:
            normals = np.vstack([np.eye(self.dim), -np.eye(self.dim)])
        else:
            normals = np.array(list(itertools.product((1.0, -1.0), repeat=self.dim)))
        return HPolytope(normals, np.ones(normals.shape[0]))


@dataclass(frozen=True)
class WeightedLqNorm(Seminorm):
    q: float
    weights: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "q", _check_q(self.q))
        w = as_vector(self.weights)
        if np.any(w <= 0):
            raise ValueError("weights must be strictly positive")
        object.__setattr__(self, "weights", w)

    @property
    def ambient_dim(self):
        return self.weights.shape[0]

    def evaluate(self, x):
        x = as_vector(x, self.ambient_dim)
        scaled = self.weights * x
        if self.q == 1.0:
            return float(np.abs(scaled).sum())
        if self.q == 2.0:
            return float(np.linalg.norm(scaled))
        return float(np.abs(scaled).max(initial=0.0))

    @property
    def is_polyhedral(self):
        return self.q in (1.0, np.inf)

    def unit_ball_hrep(self, tol=DEFAULT_TOL):
        if self.q == 2.0:
            raise NotPolyhedralError("the weighted l2 ball is not polyhedral")
        n = self.ambient_dim
        if self.q == np.inf:
            normals = np.vstack([np.diag(self.weights), -np.diag(self.weights)])
        else:
            signs = np.array(list(itertools.product((1.0, -1.0), repeat=n)))
            normals = signs * self.weights
        return HPolytope(normals, np.ones(normals.shape[0]))


@dataclass(frozen=True)
class PolytopeGauge(Seminorm):
    """Minkowski functional of a symmetric convex polytope with 0 interior."""

    ball: HPolytope

    def __post_init__(self):
        ball = self.ball
        if np.any(ball.offsets <= 0):
            raise ValueError("0 must be interior to the gauge body (offsets > 0)")
        # symmetry: the halfspace list must be closed under negation
        for h, c in zip(ball.normals, ball.offsets):
            ok = False
            for h2, c2 in zip(ball.normals, ball.offsets):
                if abs(c - c2) <= 1e-12 and np.allclose(h, -h2, atol=1e-12):
                    ok = True
                    break
            if not ok:
                raise ValueError("gauge body must be symmetric (H-rep closed under negation)")

    @property
    def ambient_dim(self):
        return self.ball.dim

    def evaluate(self, x):
        return self.ball.gauge(as_vector(x, self.ambient_dim))

    @property
    def is_polyhedral(self):
        return True

    def unit_ball_hrep(self, tol=DEFAULT_TOL):
        return self.ball

    def kernel_subspace(self, tol=DEFAULT_TOL):
        return Subspace(self.ambient_dim, null_space_basis(self.ball.normals))


def order_unit_alpha_omega(cone, u, x, tol=DEFAULT_TOL):
    """(alpha_u(x), omega_u(x)) for an H-rep cone: the largest alpha with
    alpha*u <= x and the smallest omega with x <= omega*u.

    Closed form: alpha = min_h <h,x>/<h,u>, omega = max_h <h,x>/<h,u>; the
    order-unit seminorm is max(-alpha, omega).
    """
    normals = cone.hrep_normals(tol) if hasattr(cone, "hrep_normals") else None
    if normals is None or normals.shape[0] == 0:
        raise NotOrderUnitError("alpha/omega closed form needs an H-rep cone")
    u = as_vector(u, cone.dim)
    x = as_vector(x, cone.dim)
    hu = normals @ u
    if np.any(hu <= tol.abs_tol):
        raise NotOrderUnitError("not an order unit for this representation")
    ratios = (normals @ x) / hu
    return float(ratios.min()), float(ratios.max())


@dataclass(frozen=True)
class OrderUnitSeminorm(Seminorm):
    """mu_u(x) = inf { lam > 0 : -lam*u <= x <= lam*u } for the cone order.

    Evaluated by the alpha/omega closed form when the cone has an H-rep, by
    the spectral norm for the PSD cone with identity unit, and by bisection
    against the cone membership oracle otherwise.
    """

    cone: object
    unit: np.ndarray

    def __post_init__(self):
        u = as_vector(self.unit, self.cone.dim)
        object.__setattr__(self, "unit", u)
        tol = DEFAULT_TOL
        if not self.cone.contains(u, tol):
            raise NotOrderUnitError("the designated unit is not in the cone")
        if self.cone.contains(-u, tol):
            raise NotOrderUnitError("degenerate unit: -u is also in the cone")

    @property
    def ambient_dim(self):
        return self.cone.dim

    def _is_spectral(self):
        if not isinstance(self.cone, PSDCone):
            return False
        return np.allclose(self.unit, sym_to_vec(np.eye(self.cone.side)), atol=1e-12)

    def evaluate(self, x, tol=DEFAULT_TOL):
        x = as_vector(x, self.ambient_dim)
        normals = self.cone.hrep_normals(tol) if not isinstance(self.cone, PSDCone) else None
        if normals is not None and normals.shape[0] > 0:
            alpha, omega = order_unit_alpha_omega(self.cone, self.unit, x, tol)
            return max(-alpha, omega)
        if self._is_spectral():
            vals, _ = symmetric_eigh(vec_to_sym(x, self.cone.side), tol)
            return float(np.abs(vals).max(initial=0.0))
        return self._evaluate_bisection(x, tol)

    def _evaluate_bisection(self, x, tol):
        def inside(lam):
            return self.cone.contains(lam * self.unit - x, tol) and self.cone.contains(
                lam * self.unit + x, tol
            )

        hi = 1.0
        for _ in range(80):
            if inside(hi):
                break
            hi *= 2.0
        else:
            raise NotOrderUnitError("the designated unit does not dominate this vector")
        lo = 0.0
        while hi - lo > tol.bisection_tol:
            mid = 0.5 * (lo + hi)
            if inside(mid):
                hi = mid
            else:
                lo = mid
        return 0.5 * (lo + hi)

    @property
    def is_polyhedral(self):
        if isinstance(self.cone, PSDCone):
            return False
        try:
            normals = self.cone.closure().hrep_normals(DEFAULT_TOL)
        except Exception:
            return False
        return normals is not None and normals.shape[0] > 0

    def unit_ball_hrep(self, tol=DEFAULT_TOL):
        """The closed unit ball is the order interval [-u, u].

        The interval is taken in the closure of the cone, which leaves the
        closed ball unchanged (the order-unit seminorms of a cone and of its
        closure coincide).
        """
        if not self.is_polyhedral:
            raise NotPolyhedralError("order-unit ball needs an H-rep cone")
        normals = self.cone.closure().hrep_normals(tol)
        hu = normals @ self.unit
        if np.any(hu <= tol.abs_tol):
            raise NotOrderUnitError("not an order unit for this representation")
        return HPolytope(np.vstack([normals, -normals]), np.concatenate([hu, hu]))

    def kernel_subspace(self, tol=DEFAULT_TOL):
        if self._is_spectral():
            return Subspace.zero(self.ambient_dim)
        cone = self.cone.closure()
        normals = cone.hrep_normals(tol) if hasattr(cone, "hrep_normals") else None
        if normals is None:
            return Subspace.zero(self.ambient_dim)
        return Subspace(self.ambient_dim, null_space_basis(normals))


@dataclass(frozen=True)
class PullbackSeminorm(Seminorm):
    """x -> inner(A x); degenerate whenever A has a nontrivial null space."""

    matrix: np.ndarray
    inner: Seminorm

    def __post_init__(self):
        A = as_matrix(self.matrix, rows=self.inner.ambient_dim)
        object.__setattr__(self, "matrix", A)

    @property
    def ambient_dim(self):
        return self.matrix.shape[1]

    def evaluate(self, x):
        return self.inner.evaluate(self.matrix @ as_vector(x, self.ambient_dim))

    @property
    def is_polyhedral(self):
        return self.inner.is_polyhedral

    def unit_ball_hrep(self, tol=DEFAULT_TOL):
        inner_ball = self.inner.unit_ball_hrep(tol)
        return HPolytope(inner_ball.normals @ self.matrix, inner_ball.offsets)

    def kernel_subspace(self, tol=DEFAULT_TOL):
        ker_inner = self.inner.kernel_subspace(tol)
        A = self.matrix
        if ker_inner.dim:
            A = A - ker_inner.basis.T @ (ker_inner.basis @ A)
        return Subspace(self.ambient_dim, null_space_basis(A))
