"""Positive linear maps, operator norms, and extension to the unitization.

The central construction: a positive continuous f : E -> F into an AOU
space (F, F+, w) extends to g_alpha : unitization(E) -> F given by
(x + N, lam) -> f(x) + alpha * lam * w, and g_alpha is positive exactly
when alpha >= ||f||.  With alpha = 1 and f contractive this is the unique
unital positive extension (the universal property of the unitization).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ovs.core import (
    DEFAULT_TOL,
    NotPolyhedralError,
    ToolkitError,
    UnsupportedDispatchError,
    as_matrix,
    as_vector,
)
from ovs.cones import Cone, Orthant, is_proper, sample_cone_points
from ovs.report import PropertyReport
from ovs.seminorms import LqNorm, OrderUnitSeminorm, Seminorm, WeightedLqNorm
from ovs.unitization import (
    SeminormedSpace,
    UnitizedElement,
    UnitizedSpace,
    build_unitization,
)


@dataclass(frozen=True)
class AOUSpace:
    """Archimedean order unit space: proper closed cone with designated unit."""

    dim: int
    cone: Cone
    unit: np.ndarray

    def __post_init__(self):
        u = as_vector(self.unit, self.dim)
        object.__setattr__(self, "unit", u)
        if self.cone.dim != self.dim:
            raise ToolkitError("cone dimension mismatch")
        if not self.cone.is_closed_variant:
            raise ToolkitError("an AOU space needs a closed cone")
        if not is_proper(self.cone):
            raise ToolkitError("an AOU space needs a proper cone")
        object.__setattr__(self, "norm", OrderUnitSeminorm(self.cone, u))

    def contains(self, y, tol=DEFAULT_TOL):
        return self.cone.contains(y, tol)

    def norm_of(self, y, tol=DEFAULT_TOL):
        return self.norm.evaluate(y, tol) if isinstance(self.norm, OrderUnitSeminorm) else self.norm.evaluate(y)

    def as_seminormed(self):
        return SeminormedSpace(self.dim, self.cone, self.norm)


def real_line():
    """(R, R+, 1): the scalar AOU space; its order-unit norm is |.|."""
    return AOUSpace(1, Orthant(1), np.array([1.0]))


def _coord_dim(space):
    if isinstance(space, UnitizedSpace):
        return space.base.dim + 1
    return space.dim


def _space_contains(space, y, tol):
    if isinstance(space, UnitizedSpace):
        return space.contains(space.element(y[:-1], y[-1]))
    return space.cone.contains(y, tol)


def _space_norm(space, y, tol):
    if isinstance(space, UnitizedSpace):
        return space.order_unit_norm(space.element(y[:-1], y[-1])).value
    if isinstance(space, AOUSpace):
        return space.norm.evaluate(y, tol)
    return space.seminorm.evaluate(y)


def _space_seminorm(space):
    if isinstance(space, UnitizedSpace):
        return None
    if isinstance(space, AOUSpace):
        return space.norm
    return space.seminorm


def _space_unit_coords(space):
    if isinstance(space, UnitizedSpace):
        return space.unit.coords()
    if isinstance(space, AOUSpace):
        return space.unit
    raise ToolkitError("space has no designated unit")


def _sample_domain_cone(space, rng, count, tol):
    if isinstance(space, UnitizedSpace):
        return np.array([e.coords() for e in space.sample_cone(rng, count)])
    return sample_cone_points(space.cone, rng, count, tol)


@dataclass(frozen=True)
class PositiveMap:
    """A linear map between ordered spaces, stored as a dense matrix on the
    concrete coordinates of domain and codomain ((rep, lam) for unitizations)."""

    matrix: np.ndarray
    domain: object
    codomain: object

    def __post_init__(self):
        m = as_matrix(self.matrix, rows=_coord_dim(self.codomain), cols=_coord_dim(self.domain))
        object.__setattr__(self, "matrix", m)

    def apply(self, x):
        return self.matrix @ as_vector(x, self.matrix.shape[1])

    def apply_element(self, e):
        """Apply to a UnitizedElement (domain must be a unitization)."""
        if not isinstance(self.domain, UnitizedSpace):
            raise ToolkitError("apply_element needs a unitized domain")
        y = self.apply(e.coords())
        if isinstance(self.codomain, UnitizedSpace):
            return self.codomain.element(y[:-1], y[-1])
        return y

    def compose(self, inner):
        if _coord_dim(inner.codomain) != _coord_dim(self.domain):
            raise ToolkitError("composition dimensions do not match")
        return PositiveMap(self.matrix @ inner.matrix, inner.domain, self.codomain)


def _positivity_candidates(space, tol):
    """Deterministic stress points of the domain cone (beyond random samples)."""
    if isinstance(space, UnitizedSpace):
        out = [space.unit.coords()]
        p = _space_seminorm(space.base)
        try:
            ball = space.base.seminorm.unit_ball_hrep(tol)
            verts = ball.to_vpolyhedron(tol).vertices
        except (NotPolyhedralError, ToolkitError):
            verts = np.zeros((0, space.base.dim))
        for v in verts:
            for s in (1.0, -1.0):
                rep = space.canonical_rep(s * v)
                d = space.distance(rep)
                out.append(np.concatenate([rep, [d]]))
                out.append(np.concatenate([rep, [1.0]]) if d <= 1.0 else np.concatenate([rep, [d]]))
        return out
    gens = space.cone.generators(tol)
    return [] if gens is None else list(gens)


def is_positive(f, tol=DEFAULT_TOL, samples=10_000, seed=0):
    """Does f map the domain cone into the codomain cone?

    Polyhedral domains are decided exactly on generators; otherwise the
    verdict is sampled, with an explicit witness on failure.
    """
    gens = None
    if not isinstance(f.domain, UnitizedSpace):
        gens = f.domain.cone.generators(tol)
    if gens is not None:
        for g in gens:
            if not _space_contains(f.codomain, f.apply(g), tol):
                return PropertyReport(
                    "map-positivity", "fail", len(gens), tol.abs_tol,
                    witness=tuple(float(v) for v in np.round(g, 12)), seed=None,
                )
        return PropertyReport("map-positivity", "pass", len(gens), tol.abs_tol, seed=None)
    rng = np.random.default_rng(seed)
    tested = 0
    for x in _positivity_candidates(f.domain, tol):
        tested += 1
        if _space_contains(f.domain, x, tol) and not _space_contains(f.codomain, f.apply(x), tol):
            return PropertyReport(
                "map-positivity", "fail", tested, tol.abs_tol,
                witness=tuple(float(v) for v in np.round(x, 12)), seed=seed,
            )
    for x in _sample_domain_cone(f.domain, rng, samples, tol):
        tested += 1
        if not _space_contains(f.codomain, f.apply(x), tol):
            return PropertyReport(
                "map-positivity", "fail", tested, tol.abs_tol,
                witness=tuple(float(v) for v in np.round(x, 12)), seed=seed,
            )
    return PropertyReport("map-positivity", "pass", tested, tol.abs_tol, seed=seed)


def _codomain_hrep_and_unit(codomain, tol):
    if isinstance(codomain, AOUSpace):
        normals = codomain.cone.hrep_normals(tol)
        if normals is not None and normals.shape[0]:
            return normals, codomain.unit
    return None, None


def operator_norm(f, tol=DEFAULT_TOL, certify_samples=200, seed=0):
    """sup of codomain norm over the domain unit ball.

    Supported: polyhedral domain balls (maximum over vertices), l2 domains
    into H-rep order-unit codomains (closed form max_h ||f^T h|| / <h, w>),
    and maps out of a unitization that are positive (norm of the unit's
    image).  The value is certified against sampled ball points.
    """
    value = None
    if isinstance(f.domain, UnitizedSpace):
        value = _space_norm(f.codomain, f.apply(_space_unit_coords(f.domain)), tol)
        rng = np.random.default_rng(seed)
        for e in f.domain.sample_cone(rng, certify_samples // 2):
            coords = e.coords()
            nrm = f.domain.order_unit_norm(e).value
            if nrm <= tol.abs_tol:
                continue
            img = _space_norm(f.codomain, f.apply(coords / nrm), tol)
            if img > value * (1 + 100 * tol.rel_tol) + 100 * tol.abs_tol:
                raise UnsupportedDispatchError(
                    "operator norm from a unitization requires a positive map "
                    f"(sampled value {img:.6g} exceeds |f(u)| = {value:.6g})"
                )
        return float(value)
    p = _space_seminorm(f.domain)
    if p.is_polyhedral:
        ball = p.unit_ball_hrep(tol)
        vpoly = ball.to_vpolyhedron(tol)
        for r in vpoly.rays:
            if np.linalg.norm(f.apply(r)) > tol.abs_tol:
                raise UnsupportedDispatchError(
                    "domain seminorm is degenerate in a direction the map does not kill: "
                    "the operator norm is infinite"
                )
        value = max(_space_norm(f.codomain, f.apply(v), tol) for v in vpoly.vertices)
    elif isinstance(p, (LqNorm, WeightedLqNorm)) and p.q == 2.0:
        normals, w = _codomain_hrep_and_unit(f.codomain, tol)
        if normals is None:
            raise UnsupportedDispatchError(
                "l2 domain needs an H-rep order-unit codomain (or R) for the closed form"
            )
        mat = f.matrix
        if isinstance(p, WeightedLqNorm):
            mat = mat / p.weights[None, :]
        hw = normals @ w
        value = float(max(np.linalg.norm(mat.T @ h) / d for h, d in zip(normals, hw)))
    else:
        raise UnsupportedDispatchError(
            "operator norm supported for: polyhedral domain balls; l2 domains into "
            "H-rep order-unit codomains or R; positive maps out of a unitization"
        )
    rng = np.random.default_rng(seed)
    for _ in range(certify_samples):
        x = rng.standard_normal(f.matrix.shape[1])
        px = p.evaluate(x)
        if px <= tol.abs_tol:
            continue
        img = _space_norm(f.codomain, f.apply(x / px), tol)
        if img > value * (1 + 100 * tol.rel_tol) + 100 * tol.abs_tol:  # pragma: no cover
            raise ToolkitError("operator norm certification failed")
    return float(value)


def _as_base_space(space):
    if isinstance(space, AOUSpace):
        return space.as_seminormed()
    if isinstance(space, SeminormedSpace):
        return space
    raise ToolkitError("extension requires a seminormed (or AOU) domain")


def extend_g_alpha(f, alpha, tol=DEFAULT_TOL):
    """g_alpha : unitization(E) -> F, (x + N, lam) -> f(x) + alpha * lam * w.

    Requires N inside ker(f) (automatic for positive continuous maps into an
    Archimedean cone; verified here and rejected as inconsistent otherwise).
    The result is positive iff alpha >= ||f||, with operator norm alpha when
    positive.
    """
    base = _as_base_space(f.domain)
    U = build_unitization(base, tol)
    if U.N.dim:
        for b in U.N.basis:
            if np.linalg.norm(f.apply(b)) > 100 * tol.abs_tol:
                raise ToolkitError(
                    "inconsistent input: the lineality space is not inside ker(f), "
                    "so f is not continuous-positive into an Archimedean cone"
                )
    w = _space_unit_coords(f.codomain)
    mat = np.hstack([f.matrix, float(alpha) * np.asarray(w, dtype=float)[:, None]])
    return PositiveMap(mat, domain=U, codomain=f.codomain)


def universal_extension(psi, tol=DEFAULT_TOL):
    """The unique unital positive extension of a contractive positive map.

    psi-tilde(x + N, lam) = psi(x) + lam * w; factorization through the
    canonical map and unitality are exact by construction, and uniqueness is
    re-checked by reconstructing the matrix from its values on the embedded
    base and the unit.
    """
    norm = operator_norm(psi, tol)
    if norm > 1.0 + 100 * tol.rel_tol:
        witness = _norm_witness(psi, tol)
        raise ToolkitError(
            f"not contractive: ||psi|| = {norm:.6g} > 1 (witness {witness})"
        )
    g = extend_g_alpha(psi, 1.0, tol)
    U = g.domain
    # uniqueness by reconstruction: values on phi(E) and u determine the map
    n = U.base.dim
    rebuilt = np.zeros_like(g.matrix)
    for j in range(n):
        e = np.zeros(n + 1)
        e[j] = 1.0
        rebuilt[:, j] = psi.apply(e[:n])  # phi(e_j) has coordinates (P e_j, 0)
    rebuilt[:, n] = g.apply(U.unit.coords())
    # phi kills N, so compare after projecting out N from the rep block
    proj = np.eye(n) - (U.N.basis.T @ U.N.basis if U.N.dim else np.zeros((n, n)))
    lhs = np.hstack([g.matrix[:, :n] @ proj, g.matrix[:, n:]])
    rhs = np.hstack([rebuilt[:, :n] @ proj, rebuilt[:, n:]])
    if not np.allclose(lhs, rhs, atol=100 * tol.abs_tol):  # pragma: no cover
        raise ToolkitError("uniqueness reconstruction failed")
    return g


def _norm_witness(f, tol):
    p = _space_seminorm(f.domain)
    if p is not None and p.is_polyhedral:
        verts = p.unit_ball_hrep(tol).to_vpolyhedron(tol).vertices
        best = max(verts, key=lambda v: _space_norm(f.codomain, f.apply(v), tol))
        return tuple(float(v) for v in np.round(best, 12))
    return None


def norm_preserving_extension(f, tol=DEFAULT_TOL):
    """The extension g_{||f||}: positive, same operator norm, maps the unit
    to ||f|| times the codomain unit; unique with that last property."""
    return extend_g_alpha(f, operator_norm(f, tol), tol)


def unitize_map(f, tol=DEFAULT_TOL):
    """Functorial extension between unitizations:
    (x + N, lam) -> (f(x) + M, lam * ||f||), of operator norm ||f||."""
    if not isinstance(f.domain, SeminormedSpace) or not isinstance(f.codomain, SeminormedSpace):
        raise ToolkitError("unitize_map extends maps between seminormed spaces")
    fnorm = operator_norm(f, tol)
    UE = build_unitization(f.domain, tol)
    UF = build_unitization(f.codomain, tol)
    m = f.codomain.dim
    proj = np.eye(m) - (UF.N.basis.T @ UF.N.basis if UF.N.dim else np.zeros((m, m)))
    mat = np.zeros((m + 1, f.domain.dim + 1))
    mat[:m, : f.domain.dim] = proj @ f.matrix
    mat[m, f.domain.dim] = fnorm
    return PositiveMap(mat, domain=UE, codomain=UF)
