"""Convex cone representations and structural queries.

Every cone variant answers membership; polyhedral variants additionally
expose V-rep generators and/or H-rep normals, which the structural queries
(lineality space, properness, duality, representation conversion, full
hulls) build on.  Non-closed cones are represented by
:class:`DeclaredClosureCone`, which carries its topological closure as
validated input.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ovs.core import (
    DEFAULT_TOL,
    DimensionMismatchError,
    Subspace,
    ToolkitError,
    as_vector,
    orthonormalize,
    solve_nnls,
    symmetric_eigh,
    sym_dim,
    vec_to_sym,
)
from ovs.polyhedra import (
    HPolytope,
    VPolyhedron,
    extreme_rays_of_hcone,
    full_hull as _polyhedral_full_hull,
    null_space_basis,
)


class Cone:
    """Base class; subclasses are immutable value objects."""

    dim = None

    def contains(self, x, tol=DEFAULT_TOL):
        raise NotImplementedError

    def generators(self, tol=DEFAULT_TOL):
        """V-rep generators (rows) when the cone is polyhedral, else None."""
        return None

    def hrep_normals(self, tol=DEFAULT_TOL):
        """H-rep normals (rows, meaning <h, x> >= 0) when available, else None."""
        return None

    @property
    def is_closed_variant(self):
        return True

    def closure(self):
        return self

    def __repr__(self):
        return f"{type(self).__name__}(dim={self.dim})"


@dataclass(frozen=True, repr=False)
class Orthant(Cone):
    dim: int

    def contains(self, x, tol=DEFAULT_TOL):
        x = as_vector(x, self.dim)
        return bool(np.all(x >= -tol.abs_tol))

    def generators(self, tol=DEFAULT_TOL):
        return np.eye(self.dim)

    def hrep_normals(self, tol=DEFAULT_TOL):
        return np.eye(self.dim)


@dataclass(frozen=True, repr=False)
class ZeroCone(Cone):
    dim: int

    def contains(self, x, tol=DEFAULT_TOL):
        x = as_vector(x, self.dim)
        return bool(np.all(np.abs(x) <= tol.abs_tol))

    def generators(self, tol=DEFAULT_TOL):
        return np.zeros((0, self.dim))

    def hrep_normals(self, tol=DEFAULT_TOL):
        return np.vstack([np.eye(self.dim), -np.eye(self.dim)])


@dataclass(frozen=True, repr=False)
class FullCone(Cone):
    dim: int

    def contains(self, x, tol=DEFAULT_TOL):
        as_vector(x, self.dim)
        return True

    def generators(self, tol=DEFAULT_TOL):
        return np.vstack([np.eye(self.dim), -np.eye(self.dim)])

    def hrep_normals(self, tol=DEFAULT_TOL):
        return np.zeros((0, self.dim))


@dataclass(frozen=True, repr=False)
class VPolyCone(Cone):
    """cone(rows of ``rays``): nonnegative combinations of finitely many generators."""

    rays: np.ndarray

    def __post_init__(self):
        rays = np.atleast_2d(np.asarray(self.rays, dtype=float))
        if rays.size == 0 or not np.all(np.isfinite(rays)):
            raise ValueError("generators must be a nonempty finite array")
        object.__setattr__(self, "rays", rays)

    @property
    def dim(self):
        return self.rays.shape[1]

    def contains(self, x, tol=DEFAULT_TOL):
        # membership <=> the projection onto the cone reproduces x
        x = as_vector(x, self.dim)
        c = solve_nnls(self.rays.T, x, tol)
        resid = float(np.linalg.norm(self.rays.T @ c - x))
        return resid <= tol.abs_tol * max(1.0, float(np.linalg.norm(x))) * 10

    def generators(self, tol=DEFAULT_TOL):
        return self.rays

    def hrep_normals(self, tol=DEFAULT_TOL):
        converted = convert_representation(self, "hpoly", tol)
        return converted.normals_


@dataclass(frozen=True, repr=False)
class HPolyCone(Cone):
    """{x : <h, x> >= 0 for every row h of ``normals_``}."""

    normals_: np.ndarray

    def __post_init__(self):
        normals = np.atleast_2d(np.asarray(self.normals_, dtype=float))
        if normals.size == 0 or not np.all(np.isfinite(normals)):
            raise ValueError("normals must be a nonempty finite array")
        object.__setattr__(self, "normals_", normals)

    @property
    def dim(self):
        return self.normals_.shape[1]

    def contains(self, x, tol=DEFAULT_TOL):
        x = as_vector(x, self.dim)
        scale = max(1.0, float(np.linalg.norm(x)))
        return bool(np.all(self.normals_ @ x >= -tol.abs_tol * scale))

    def generators(self, tol=DEFAULT_TOL):
        converted = convert_representation(self, "vpoly", tol)
        return converted.rays

    def hrep_normals(self, tol=DEFAULT_TOL):
        return self.normals_


@dataclass(frozen=True, repr=False)
class IceCreamCone(Cone):
    """{(x, lam) : p(x) <= lam} for an evaluable seminorm p."""

    seminorm: object

    @property
    def dim(self):
        return self.seminorm.ambient_dim + 1

    def contains(self, x, tol=DEFAULT_TOL):
        x = as_vector(x, self.dim)
        return float(self.seminorm.evaluate(x[:-1])) <= x[-1] + tol.abs_tol


@dataclass(frozen=True, repr=False)
class PSDCone(Cone):
    """Positive semidefinite matrices of side ``side``, coordinatized so the
    Euclidean norm on coordinates is the Frobenius norm (off-diagonal scaled
    by sqrt(2))."""

    side: int

    @property
    def dim(self):
        return sym_dim(self.side)

    def contains(self, x, tol=DEFAULT_TOL):
        a = vec_to_sym(as_vector(x, self.dim), self.side)
        vals, _ = symmetric_eigh(a, tol)
        scale = max(1.0, float(np.abs(vals).max(initial=0.0)))
        return bool(vals[0] >= -tol.abs_tol * scale)


@dataclass(frozen=True, repr=False)
class DeclaredClosureCone(Cone):
    """A possibly non-closed cone given by a membership predicate together
    with its declared topological closure.

    Consistency (predicate implies closure membership) is enforced by
    sampling at construction via :func:`validate_declared_closure`.
    """

    predicate: object  # callable vector -> bool
    declared_closure: Cone
    name: str = "declared"

    @property
    def dim(self):
        return self.declared_closure.dim

    @property
    def is_closed_variant(self):
        return False

    def closure(self):
        return self.declared_closure

    def contains(self, x, tol=DEFAULT_TOL):
        return bool(self.predicate(as_vector(x, self.dim)))


def open_halfplane_plus_ray():
    """The paper-style non-closed cone: open upper halfplane union the
    nonnegative x-axis, with closure the closed upper halfplane."""

    def predicate(x):
        return x[1] > 0 or (x[1] == 0 and x[0] >= 0)

    closure = HPolyCone(np.array([[0.0, 1.0]]))
    return DeclaredClosureCone(predicate, closure, name="open_halfplane_plus_ray")


def validate_declared_closure(cone, rng=None, samples=200, tol=DEFAULT_TOL):
    """Sampled consistency check: every predicate point lies in the closure."""
    if rng is None:
        rng = np.random.default_rng(0)
    pts = sample_cone_points(cone.declared_closure, rng, samples, tol)
    extra = rng.standard_normal((samples, cone.dim))
    for x in np.vstack([pts, extra]):
        if cone.contains(x, tol) and not cone.declared_closure.contains(x, tol):
            raise ToolkitError(
                f"declared closure of {cone.name} does not contain predicate point {x}"
            )
    return True


# ---------------------------------------------------------------------------
# Structural queries.
# ---------------------------------------------------------------------------

def lineality_space(cone, tol=DEFAULT_TOL):
    """Largest subspace contained in the cone, K intersect -K.

    For a DeclaredClosureCone this is computed on the declared closure,
    matching the role the lineality space plays for unitizations.
    """
    cone = cone.closure()
    if isinstance(cone, (Orthant, ZeroCone, PSDCone)):
        return Subspace.zero(cone.dim)
    if isinstance(cone, FullCone):
        return Subspace.full(cone.dim)
    if isinstance(cone, IceCreamCone):
        ker = cone.seminorm.kernel_subspace(tol)
        if ker.dim == 0:
            return Subspace.zero(cone.dim)
        basis = np.hstack([ker.basis, np.zeros((ker.dim, 1))])
        return Subspace(cone.dim, basis)
    if isinstance(cone, HPolyCone):
        return Subspace(cone.dim, null_space_basis(cone.normals_))
    if isinstance(cone, VPolyCone):
        kept = [g for g in cone.rays if cone.contains(-g, tol)]
        if not kept:
            return Subspace.zero(cone.dim)
        return orthonormalize(kept, tol)
    raise ToolkitError(f"lineality space unsupported for {type(cone).__name__}")


def is_proper(cone, tol=DEFAULT_TOL):
    """True iff the cone contains no line."""
    return lineality_space(cone, tol).dim == 0


@dataclass(frozen=True)
class ArchimedeanVerdict:
    value: bool
    witness: np.ndarray | None = None

    def __bool__(self):
        return self.value


def is_archimedean(cone, tol=DEFAULT_TOL, rng=None, samples=200):
    """Proper and algebraically closed.

    Closed variants reduce to properness.  A DeclaredClosureCone is reported
    non-Archimedean whenever a sampled point of its closure escapes the
    predicate set, with that point as witness.
    """
    if cone.is_closed_variant:
        return ArchimedeanVerdict(is_proper(cone, tol))
    closure = cone.closure()
    candidates = []
    gens = closure.generators(tol)
    if gens is not None:
        candidates.extend(list(gens))
        candidates.extend(list(-g for g in gens if closure.contains(-g, tol)))
    if rng is None:
        rng = np.random.default_rng(0)
    candidates.extend(list(sample_cone_points(closure, rng, samples, tol)))
    for x in candidates:
        if closure.contains(x, tol) and not cone.contains(x, tol):
            return ArchimedeanVerdict(False, np.asarray(x, dtype=float))
    return ArchimedeanVerdict(is_proper(closure, tol))


def dual_cone(cone, tol=DEFAULT_TOL):
    """{y : <y, x> >= 0 for all x in K}, for polyhedral variants."""
    if isinstance(cone, Orthant):
        return Orthant(cone.dim)
    if isinstance(cone, FullCone):
        return ZeroCone(cone.dim)
    if isinstance(cone, ZeroCone):
        return FullCone(cone.dim)
    if isinstance(cone, VPolyCone):
        return HPolyCone(cone.rays.copy())
    if isinstance(cone, HPolyCone):
        return VPolyCone(cone.normals_.copy())
    raise ToolkitError(f"dual cone unsupported for {type(cone).__name__}")


def convert_representation(cone, target, tol=DEFAULT_TOL):
    """Convert between V-rep and H-rep via the double description method.

    Guarded to dimension <= 6; round-trip membership agreement is a golden
    test obligation, not re-verified on every call.
    """
    if target not in ("vpoly", "hpoly"):
        raise ValueError("target must be 'vpoly' or 'hpoly'")
    if isinstance(cone, Orthant):
        return VPolyCone(np.eye(cone.dim)) if target == "vpoly" else HPolyCone(np.eye(cone.dim))
    if isinstance(cone, HPolyCone) and target == "vpoly":
        rays, lin = extreme_rays_of_hcone(cone.normals_, tol)
        gens = [rays] if rays.size else []
        if lin.size:
            gens.extend([lin, -lin])
        if not gens:
            return VPolyCone(np.zeros((1, cone.dim)))  # the zero cone
        return VPolyCone(np.vstack(gens))
    if isinstance(cone, VPolyCone) and target == "hpoly":
        # facet normals of cone(G) are the extreme rays of its dual {y : G y >= 0}
        rays, lin = extreme_rays_of_hcone(cone.rays, tol)
        normals = [rays] if rays.size else []
        if lin.size:
            normals.extend([lin, -lin])
        if not normals:
            # dual is {0}: the cone is the whole space
            return HPolyCone(np.zeros((1, cone.dim)))
        return HPolyCone(np.vstack(normals))
    if isinstance(cone, VPolyCone) and target == "vpoly":
        return cone
    if isinstance(cone, HPolyCone) and target == "hpoly":
        return cone
    if isinstance(cone, ZeroCone):
        return VPolyCone(np.zeros((1, cone.dim))) if target == "vpoly" else HPolyCone(
            np.vstack([np.eye(cone.dim), -np.eye(cone.dim)])
        )
    if isinstance(cone, FullCone):
        return (
            VPolyCone(np.vstack([np.eye(cone.dim), -np.eye(cone.dim)]))
            if target == "vpoly"
            else HPolyCone(np.zeros((1, cone.dim)))
        )
    raise ToolkitError(f"representation conversion unsupported for {type(cone).__name__}")


def full_hull(body, cone, tol=DEFAULT_TOL):
    """Smallest full (order-convex) superset of ``body`` for the order of ``cone``,
    computed as (body + K) intersect (body - K)."""
    if isinstance(cone, ZeroCone):
        gens = np.zeros((0, cone.dim))
    else:
        gens = cone.generators(tol)
        if gens is None:
            raise ToolkitError("full hull requires a polyhedral order cone")
    return _polyhedral_full_hull(body, gens, tol)


def sample_cone_points(cone, rng, count, tol=DEFAULT_TOL):
    """Draw ``count`` cone points: nonnegative exponential combinations of
    generators for polyhedral cones, variant-specific constructions otherwise."""
    if isinstance(cone, DeclaredClosureCone):
        pool = sample_cone_points(cone.declared_closure, rng, 3 * count, tol)
        kept = [x for x in pool if cone.contains(x, tol)]
        while len(kept) < count:
            kept.append(np.zeros(cone.dim))
        return np.array(kept[:count])
    if isinstance(cone, ZeroCone):
        return np.zeros((count, cone.dim))
    if isinstance(cone, FullCone):
        return rng.standard_normal((count, cone.dim))
    if isinstance(cone, IceCreamCone):
        inner = rng.standard_normal((count, cone.dim - 1))
        lam = np.array([cone.seminorm.evaluate(x) for x in inner])
        lam = lam + rng.exponential(1.0, count)
        return np.hstack([inner, lam[:, None]])
    if isinstance(cone, PSDCone):
        n = cone.side
        out = np.empty((count, cone.dim))
        bs = rng.standard_normal((count, n, n)) / np.sqrt(n)
        for i in range(count):
            s = bs[i] @ bs[i].T
            iu = np.triu_indices(n)
            scale = np.where(iu[0] == iu[1], 1.0, np.sqrt(2.0))
            out[i] = s[iu] * scale
        return out
    gens = cone.generators(tol)
    if gens is None:
        raise ToolkitError(f"sampling unsupported for {type(cone).__name__}")
    if gens.shape[0] == 0:
        return np.zeros((count, cone.dim))
    weights = rng.exponential(1.0, (count, gens.shape[0]))
    # zero out a random subset of weights so boundary faces are exercised
    mask = rng.random((count, gens.shape[0])) < 0.3
    weights = np.where(mask, 0.0, weights)
    return weights @ gens
