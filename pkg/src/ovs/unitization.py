"""The order unitization of a seminormed preordered vector space.

Given (E, E+, p), the unitized space is E/N (+) R where N is the lineality
space of the closure of E+ with respect to p, with cone

    {(x + N, lam) : lam >= d(x, E+)},        d(x, E+) = inf_y p(x - y),

and order unit (0 + N, 1).  Cosets are represented canonically by
orthogonal projection onto the complement of N, so the unitized space lives
in concrete coordinates (representative, lam) and all queries route through
the distance oracle; the cone is generally not polyhedral, so it is never
materialized.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ovs.core import (
    DEFAULT_TOL,
    NotOrderUnitError,
    Subspace,
    ToolkitError,
    UnsupportedDispatchError,
    as_vector,
    quotient_representative,
)
from ovs.cones import (
    Cone,
    FullCone,
    VPolyCone,
    ZeroCone,
    lineality_space,
    sample_cone_points,
)
from ovs.distance import admissible_methods, dist_to_cone
from ovs.polyhedra import HPolytope, null_space_basis
from ovs.seminorms import OrderUnitSeminorm, Seminorm
from ovs.cones import full_hull as cone_full_hull


@dataclass(frozen=True)
class SeminormedSpace:
    """(E, E+, p): a finite-dimensional preordered vector space with a seminorm."""

    dim: int
    cone: Cone
    seminorm: Seminorm

    def __post_init__(self):
        if self.cone.dim != self.dim or self.seminorm.ambient_dim != self.dim:
            raise ToolkitError("cone and seminorm must share the space dimension")

    def distance(self, x, tol=DEFAULT_TOL, method=None):
        return dist_to_cone(x, self.cone, self.seminorm, tol, method)


@dataclass(frozen=True)
class UnitizedElement:
    """(representative, lam) with the representative orthogonal to N."""

    rep: np.ndarray
    lam: float

    def __post_init__(self):
        object.__setattr__(self, "rep", as_vector(self.rep))
        object.__setattr__(self, "lam", float(self.lam))

    def __neg__(self):
        return UnitizedElement(-self.rep, -self.lam)

    def scale(self, a):
        return UnitizedElement(a * self.rep, a * self.lam)

    def add(self, other):
        return UnitizedElement(self.rep + other.rep, self.lam + other.lam)

    def coords(self):
        return np.concatenate([self.rep, [self.lam]])


@dataclass(frozen=True)
class UnitNormResult:
    value: float
    alpha: float
    omega: float

    def __float__(self):
        return self.value


def _kernel_extended_cone(closure, kernel, tol):
    """The p-closure of the cone: euclidean closure of E+ plus the seminorm kernel."""
    if kernel.dim == 0:
        return closure
    gens = closure.generators(tol)
    if gens is None:
        raise UnsupportedDispatchError(
            "degenerate seminorms need a polyhedral cone to locate the lineality space"
        )
    return VPolyCone(np.vstack([gens, kernel.basis, -kernel.basis]))


class UnitizedSpace:
    """E/N (+) R with its cone membership, order-unit norm, and unit (0+N, 1).

    Immutable after construction; build with :func:`build_unitization`.
    """

    def __init__(self, base, lineality, tol=DEFAULT_TOL):
        self.base = base
        self.N = lineality
        self.tol = tol
        self.quotient_dim = base.dim - lineality.dim
        self._closure = base.cone.closure()

    @property
    def dim(self):
        return self.quotient_dim + 1

    @property
    def unit(self):
        return UnitizedElement(np.zeros(self.base.dim), 1.0)

    def canonical_rep(self, x):
        return quotient_representative(x, self.N, self.tol)

    def element(self, x, lam):
        """Build (x + N, lam) with the canonical coset representative."""
        return UnitizedElement(self.canonical_rep(x), lam)

    def distance(self, x, method=None):
        """d(x, E+) for any ambient vector x (coset-invariant)."""
        return dist_to_cone(x, self._closure, self.base.seminorm, self.tol, method)

    def _check_rep(self, e):
        if not self.N.dim:
            return
        if float(np.linalg.norm(self.N.project(e.rep))) > self.tol.abs_tol * 100:
            raise ToolkitError("element representative is not orthogonal to N")

    def contains(self, e, method=None):
        """(x + N, lam) lies in the unitized cone iff lam >= d(x, E+)."""
        self._check_rep(e)
        return e.lam >= self.distance(e.rep, method) - self.tol.abs_tol

    def order_unit_norm(self, e, method=None):
        """max(d(x) - lam, d(-x) + lam), with (alpha, omega) = (lam - d(x), lam + d(-x))."""
        self._check_rep(e)
        d_plus = self.distance(e.rep, method)
        d_minus = self.distance(-e.rep, method)
        alpha = e.lam - d_plus
        omega = e.lam + d_minus
        return UnitNormResult(max(-alpha, omega), alpha, omega)

    def sample_cone(self, rng, count):
        """Cone samples (rep, lam >= d(rep)), mixing boundary and interior."""
        reps = rng.standard_normal((count, self.base.dim))
        out = []
        for i, r in enumerate(reps):
            rep = self.canonical_rep(r)
            d = self.distance(rep)
            pad = 0.0 if i % 3 == 0 else rng.exponential(1.0)
            out.append(UnitizedElement(rep, d + pad))
        return out


def build_unitization(E, tol=DEFAULT_TOL):
    """Construct the unitized space of (E, E+, p).

    N is the lineality space of the closure of E+ with respect to p; for a
    seminorm with nontrivial kernel the closure gains the kernel directions,
    which is what makes degenerate examples collapse.
    """
    closure = E.cone.closure()
    if not isinstance(closure, (ZeroCone, FullCone)) and not admissible_methods(
        closure, E.seminorm, tol
    ):
        raise UnsupportedDispatchError(
            f"no distance method for ({type(closure).__name__}, "
            f"{type(E.seminorm).__name__}); the unitization needs one"
        )
    kernel = E.seminorm.kernel_subspace(tol)
    extended = _kernel_extended_cone(closure, kernel, tol)
    N = lineality_space(extended, tol)
    return UnitizedSpace(E, N, tol)


def canonical_map(U, x):
    """phi : E -> unitization, x -> (x + N, 0); positive and contractive."""
    return U.element(x, 0.0)


class OneMaxSeminorm(Seminorm):
    """The 1-max-normalization p_u(x) = max(d(x, E+), d(-x, E+)).

    Evaluation always goes through the distance oracle.  When the base data
    is polyhedral the unit ball (the full hull of the base ball) is
    materialized on demand so LP-based distances under p_u are available.
    """

    def __init__(self, base, tol=DEFAULT_TOL):
        self.base = base
        self.tol = tol
        self._closure = base.cone.closure()
        self._ball = None

    @property
    def ambient_dim(self):
        return self.base.dim

    def evaluate(self, x):
        x = as_vector(x, self.ambient_dim)
        d_plus = dist_to_cone(x, self._closure, self.base.seminorm, self.tol)
        d_minus = dist_to_cone(-x, self._closure, self.base.seminorm, self.tol)
        return max(d_plus, d_minus)

    @property
    def is_polyhedral(self):
        if not self.base.seminorm.is_polyhedral:
            return False
        return self._closure.generators(self.tol) is not None

    def unit_ball_hrep(self, tol=DEFAULT_TOL):
        if self._ball is None:
            base_ball = self.base.seminorm.unit_ball_hrep(tol)
            self._ball = cone_full_hull(base_ball, self._closure, tol)
        return self._ball

    def kernel_subspace(self, tol=DEFAULT_TOL):
        # p_u vanishes exactly on N = lin.space of the p-closure of E+
        kernel = self.base.seminorm.kernel_subspace(tol)
        extended = _kernel_extended_cone(self._closure, kernel, tol)
        return lineality_space(extended, tol)


def one_max_normalization(E, tol=DEFAULT_TOL):
    """The seminorm x -> max(d(x, E+), d(-x, E+)); 1-max-normal, <= p pointwise."""
    return OneMaxSeminorm(E, tol)


@dataclass(frozen=True)
class Archimedeanization:
    """The quotient AOU space (E/N, pushed cone, u + N) in reduced coordinates,
    together with the isometric embedding into the unitization as (E/N) (+) {0}.
    """

    space: SeminormedSpace
    unit: np.ndarray
    basis: np.ndarray  # rows: orthonormal basis of the complement of N
    lineality: Subspace
    unitized: UnitizedSpace

    def to_ambient(self, y):
        return self.basis.T @ as_vector(y, self.space.dim)

    def from_ambient(self, x):
        return self.basis @ as_vector(x, self.basis.shape[1])

    def embed(self, y):
        """(E/N) ni y -> (y, 0) in the unitization."""
        return UnitizedElement(self.to_ambient(y), 0.0)

    def norm(self, y):
        return self.space.seminorm.evaluate(as_vector(y, self.space.dim))


def archimedeanization(E, tol=DEFAULT_TOL):
    """Quotient construction for an order unit space carrying its order-unit
    seminorm: divide out N and push the closed cone and the unit forward."""
    p = E.seminorm
    if not isinstance(p, OrderUnitSeminorm):
        raise NotOrderUnitError(
            "archimedeanization requires the order-unit seminorm of a designated unit"
        )
    U = build_unitization(E, tol)
    N = U.N
    Q = null_space_basis(N.basis) if N.dim else np.eye(E.dim)
    k = Q.shape[0]
    closure = E.cone.closure()
    gens = closure.generators(tol)
    if gens is None:
        raise UnsupportedDispatchError("archimedeanization needs a polyhedral cone")
    kernel = p.kernel_subspace(tol)
    if kernel.dim:
        gens = np.vstack([gens, kernel.basis, -kernel.basis])
    reduced = gens @ Q.T
    reduced = reduced[np.linalg.norm(reduced, axis=1) > tol.abs_tol]
    qcone = VPolyCone(reduced) if reduced.size else ZeroCone(k)
    unit_reduced = Q @ as_vector(p.unit, E.dim)
    qnorm = OrderUnitSeminorm(qcone, unit_reduced)
    space = SeminormedSpace(k, qcone, qnorm)
    return Archimedeanization(space, unit_reduced, Q, N, U)


def retract_projection(U, tol=DEFAULT_TOL):
    """The coordinate projection (x + N, lam) -> (x + N, 0) of the unitization
    onto the embedded Archimedeanization, as a linear map on (rep, lam) coords.

    Requires the base to be an order unit space carrying its order-unit
    seminorm.  Idempotence and the identity on the embedded subspace are
    exact; positivity on the whole unitized cone is an empirical report, see
    :func:`retract_positivity_report`.
    """
    if not isinstance(U.base.seminorm, OrderUnitSeminorm):
        raise NotOrderUnitError("base lacks an order unit seminorm")
    from ovs.maps import PositiveMap  # local import to keep module layering acyclic

    n = U.base.dim
    mat = np.zeros((n + 1, n + 1))
    mat[:n, :n] = np.eye(n)
    return PositiveMap(mat, domain=U, codomain=U)


def retract_positivity_report(U, samples=500, seed=0, tol=DEFAULT_TOL):
    """Empirical positivity of the retract projection on sampled cone elements.

    On the embedded slice (lam = 0) the projection is the identity, hence
    positive; on general cone samples the coordinate projection may leave
    the cone, which is reported (verdict ``indeterminate`` with a witness)
    rather than asserted either way.
    """
    from ovs.report import PropertyReport

    rng = np.random.default_rng(seed)
    proj = retract_projection(U, tol)
    witness = None
    closure = U.base.cone.closure()
    slice_pts = sample_cone_points(closure, rng, samples, tol)
    for x in slice_pts:
        e = U.element(x, 0.0)
        image = UnitizedElement(e.rep, 0.0)
        if U.contains(e) and not U.contains(image):
            # identity on the slice: this cannot happen
            return PropertyReport(
                "retract-projection-positivity", "fail", samples, tol.abs_tol,
                witness=tuple(e.coords()), seed=seed,
            )
    for e in U.sample_cone(rng, samples):
        image = proj.apply_element(e)
        if not U.contains(image):
            witness = tuple(float(v) for v in np.round(e.coords(), 12))
            break
    verdict = "pass" if witness is None else "indeterminate"
    return PropertyReport(
        "retract-projection-positivity", verdict, samples, tol.abs_tol,
        witness=witness, seed=seed,
    )


# ---------------------------------------------------------------------------
# Cross-sections of the unitized cone at lam = 1 (the paper's planar pictures).
# ---------------------------------------------------------------------------

def crosssection_boundary_points(E, directions=96, tol=DEFAULT_TOL):
    """Boundary points of the slice {x : d(x, E+) <= 1} along rays from 0.

    d is positively homogeneous, so the boundary along direction v sits at
    v / d(v) whenever d(v) > 0; directions with d(v) = 0 stay inside forever.
    """
    if E.dim != 2:
        raise ToolkitError("cross-sections are only defined for 2-d base spaces")
    closure = E.cone.closure()
    pts = []
    for k in range(directions):
        ang = 2.0 * np.pi * k / directions
        v = np.array([np.cos(ang), np.sin(ang)])
        d = dist_to_cone(v, closure, E.seminorm, tol)
        pts.append(v / d if d > 1e-6 else None)
    return pts


def reconstruct_slice_hrep(E, directions=96, corner_tol=1e-6, tol=DEFAULT_TOL):
    """Attempt an H-rep of the slice {d <= 1} from ray-traced boundary points.

    Returns (HPolytope, corner_count) when the boundary is piecewise linear
    with few corners, else (None, corner_count).
    """
    pts = crosssection_boundary_points(E, directions, tol)
    n = len(pts)
    corners = 0
    for k in range(n):
        trio = [pts[(k - 1) % n], pts[k], pts[(k + 1) % n]]
        if any(p is None for p in trio):
            continue
        a, b, c = trio
        u, v = b - a, c - b
        nu, nv = np.linalg.norm(u), np.linalg.norm(v)
        if nu < 1e-12 or nv < 1e-12:
            continue
        sin_turn = abs(u[0] * v[1] - u[1] * v[0]) / (nu * nv)
        if sin_turn > corner_tol:
            corners += 1
    if corners > 6:
        return None, corners
    # fit one halfspace per maximal collinear run of boundary points
    normals, offsets = [], []
    for k in range(n):
        a, b = pts[k], pts[(k + 1) % n]
        if a is None or b is None:
            continue
        edge = b - a
        if np.linalg.norm(edge) < 1e-12:
            continue
        h = np.array([edge[1], -edge[0]])
        h /= np.linalg.norm(h)
        c = h @ a
        if c < 0:
            h, c = -h, -c
        dup = False
        for h2, c2 in zip(normals, offsets):
            if np.linalg.norm(h - h2) < 1e-6 and abs(c - c2) < 1e-6:
                dup = True
                break
        if not dup:
            normals.append(h)
            offsets.append(c)
    if not normals:
        return None, corners
    return HPolytope(np.array(normals), np.array(offsets)), corners


def crosssection_polyhedral_decision(E, directions=96, grid=41, window=2.0,
                                     band=1e-6, tol=DEFAULT_TOL):
    """Decide whether the unitized cone is polyhedral by H-rep reconstruction
    of the lam = 1 slice plus an exactness check on a grid (off a boundary band)."""
    hrep, _ = reconstruct_slice_hrep(E, directions, tol=tol)
    if hrep is None:
        return False
    closure = E.cone.closure()
    axis = np.linspace(-window, window, grid)
    for x1 in axis:
        for x2 in axis:
            x = np.array([x1, x2])
            d = dist_to_cone(x, closure, E.seminorm, tol)
            if abs(d - 1.0) <= band:
                continue
            if (d <= 1.0) != hrep.contains(x, tol):
                return False
    return True


def unitized_cone_is_simplicial(E, directions=96, tol=DEFAULT_TOL):
    """Lattice-cone test in ambient dimension 3 (2-d base): the unitized cone
    is simplicial iff it has exactly 3 linearly independent extreme rays."""
    from ovs.polyhedra import extreme_rays_of_hcone

    if E.dim != 2:
        raise ToolkitError("simplicial test implemented for 2-d bases only")
    hrep, _ = reconstruct_slice_hrep(E, directions, tol=tol)
    if hrep is None:
        return False
    hom = np.hstack([-hrep.normals, hrep.offsets[:, None]])
    hom = np.vstack([hom, [[0.0, 0.0, 1.0]]])
    rays, lin = extreme_rays_of_hcone(hom, tol)
    if lin.shape[0] or rays.shape[0] != 3:
        return False
    return abs(np.linalg.det(rays)) > tol.abs_tol
