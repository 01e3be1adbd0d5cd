"""Polyhedral computation: double description, vertex/facet enumeration, full hulls.

Representations follow the usual conventions:

* an H-cone is ``{x : <h, x> >= 0 for every normal h}``;
* an :class:`HPolytope` is ``{x : <h, x> <= c}`` per halfspace ``(h, c)``;
* a :class:`VPolyhedron` is ``conv(vertices) + cone(rays)``.

Everything is floating point with tolerance-based adjacency, guarded to
dimension <= 6 where the double description method is invoked.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ovs.core import (
    DEFAULT_TOL,
    DimensionMismatchError,
    LPProblem,
    ToolkitError,
    as_matrix,
    as_vector,
    solve_lp,
)

DD_MAX_DIM = 6


def _dd_guard(dim):
    if dim > DD_MAX_DIM:
        raise ToolkitError(
            f"double description is guarded to dimension <= {DD_MAX_DIM}, got {dim}"
        )


def _unit_rows(mat, tol):
    """Normalize rows to unit length, dropping near-zero rows."""
    mat = np.atleast_2d(np.asarray(mat, dtype=float))
    if mat.size == 0:
        return mat.reshape(0, mat.shape[1] if mat.ndim == 2 else 0)
    norms = np.linalg.norm(mat, axis=1)
    keep = norms > tol
    return mat[keep] / norms[keep, None]


def _independent_rows(mat, tol):
    """Indices of a maximal linearly independent subset of rows (greedy, stable)."""
    chosen = []
    basis = []
    for i, row in enumerate(mat):
        u = row.copy()
        for q in basis:
            u -= (q @ u) * q
        norm = np.linalg.norm(u)
        if norm > tol:
            basis.append(u / norm)
            chosen.append(i)
    return chosen


def null_space_basis(mat, tol=1e-10):
    """Orthonormal basis (rows) of the null space of ``mat``."""
    mat = np.atleast_2d(np.asarray(mat, dtype=float))
    n = mat.shape[1]
    if mat.shape[0] == 0:
        return np.eye(n)
    _, s, vh = np.linalg.svd(mat)
    rank = int(np.sum(s > tol * max(1.0, s[0] if s.size else 0.0)))
    return vh[rank:]


def extreme_rays_of_hcone(normals, tol=DEFAULT_TOL):
    """Extreme rays and lineality basis of the cone {x : normals @ x >= 0}.

    Incremental double description on the pointed part (the cone projected
    onto the orthogonal complement of its lineality space), with the
    combinatorial adjacency test.  Rays are returned unit-normalized; the
    cone equals cone(rays) + span(lineality).
    """
    H = np.atleast_2d(np.asarray(normals, dtype=float))
    if H.size == 0:
        n = H.shape[1] if H.ndim == 2 and H.shape[1] else 0
        return np.zeros((0, n)), np.eye(n)
    n = H.shape[1]
    _dd_guard(n)
    atol = max(tol.abs_tol * 100.0, 1e-9)
    H = _unit_rows(H, atol)
    lin = null_space_basis(H)
    if H.shape[0] == 0:
        return np.zeros((0, n)), lin
    Q = null_space_basis(lin) if lin.shape[0] else np.eye(n)
    Hp = H @ Q.T  # constraints on the pointed part, full column rank
    k = Q.shape[0]
    if k == 0:
        return np.zeros((0, n)), lin

    first = _independent_rows(Hp, atol)
    if len(first) < k:  # pragma: no cover - rank was defined by construction
        raise ToolkitError("projected constraint matrix lost rank")
    B = Hp[first]
    rays = np.linalg.solve(B, np.eye(k)).T  # rows are rays, B @ ray_i = e_i
    rays = _unit_rows(rays, atol)
    processed = list(first)
    order = [i for i in range(Hp.shape[0]) if i not in first]

    for idx in order:
        h = Hp[idx]
        if rays.shape[0] == 0:
            processed.append(idx)
            continue
        vals = rays @ h
        pos = vals > atol
        neg = vals < -atol
        zero = ~(pos | neg)
        if not neg.any():
            processed.append(idx)
            continue
        new_rays = []
        if pos.any():
            act = np.abs(rays @ Hp[processed].T) <= atol  # activity on processed rows
            pos_idx = np.flatnonzero(pos)
            neg_idx = np.flatnonzero(neg)
            for ip in pos_idx:
                for im in neg_idx:
                    common = act[ip] & act[im]
                    # adjacency: no third ray is active on all common constraints
                    others = np.ones(rays.shape[0], dtype=bool)
                    others[[ip, im]] = False
                    if np.any((act[others] | ~common).all(axis=1)):
                        continue
                    w = vals[ip] * rays[im] - vals[im] * rays[ip]
                    norm = np.linalg.norm(w)
                    if norm > atol:
                        new_rays.append(w / norm)
        keep = rays[pos | zero]
        if new_rays:
            rays = np.vstack([keep, np.array(new_rays)])
        else:
            rays = keep
        processed.append(idx)
        if rays.shape[0] > 1:
            # deduplicate nearly parallel rays (keep first occurrence)
            gram = rays @ rays.T
            dup = np.zeros(rays.shape[0], dtype=bool)
            for i in range(rays.shape[0]):
                if dup[i]:
                    continue
                dup[i + 1:] |= gram[i, i + 1:] > 1.0 - atol
            rays = rays[~dup]
    return rays @ Q, lin


@dataclass(frozen=True)
class HPolytope:
    """Intersection of halfspaces <h, x> <= c (rows of ``normals`` with ``offsets``)."""

    normals: np.ndarray
    offsets: np.ndarray

    def __post_init__(self):
        normals = np.atleast_2d(np.asarray(self.normals, dtype=float))
        offsets = np.atleast_1d(np.asarray(self.offsets, dtype=float))
        if normals.shape[0] != offsets.shape[0]:
            raise DimensionMismatchError("one offset per halfspace required")
        object.__setattr__(self, "normals", normals)
        object.__setattr__(self, "offsets", offsets)

    @property
    def dim(self):
        return self.normals.shape[1]

    @property
    def num_halfspaces(self):
        return self.normals.shape[0]

    def contains(self, x, tol=DEFAULT_TOL, strict=False):
        x = as_vector(x, self.dim)
        slack = self.offsets - self.normals @ x
        if strict:
            return bool(np.all(slack > tol.abs_tol))
        return bool(np.all(slack >= -tol.abs_tol))

    def gauge(self, x):
        """Minkowski functional, valid when 0 is interior (all offsets > 0)."""
        x = as_vector(x, self.dim)
        ratios = (self.normals @ x) / self.offsets
        return float(max(0.0, ratios.max(initial=0.0)))

    def intersect(self, other):
        if other.dim != self.dim:
            raise DimensionMismatchError("polytopes live in different dimensions")
        return HPolytope(
            np.vstack([self.normals, other.normals]),
            np.concatenate([self.offsets, other.offsets]),
        )

    def is_bounded(self, tol=DEFAULT_TOL):
        """LP certificate: every +-coordinate direction has a finite optimum."""
        for i in range(self.dim):
            for sign in (1.0, -1.0):
                c = np.zeros(self.dim)
                c[i] = sign
                res = solve_lp(
                    LPProblem(
                        objective=c,
                        A_ub=self.normals,
                        b_ub=self.offsets,
                        bounds=tuple((None, None) for _ in range(self.dim)),
                        sense="max",
                    ),
                    tol,
                )
                if res.status == "unbounded":
                    return False
                if res.status == "infeasible":
                    return True  # empty set is bounded
        return True

    def to_vpolyhedron(self, tol=DEFAULT_TOL):
        """Enumerate vertices and recession rays via the homogenization cone."""
        _dd_guard(self.dim)
        n = self.dim
        hom = np.hstack([-self.normals, self.offsets[:, None]])
        hom = np.vstack([hom, np.zeros((1, n + 1))])
        hom[-1, -1] = 1.0  # t >= 0
        rays, lin = extreme_rays_of_hcone(hom, tol)
        verts = []
        rec = []
        atol = max(tol.abs_tol * 100.0, 1e-9)
        for r in rays:
            if r[-1] > atol:
                verts.append(r[:-1] / r[-1])
            else:
                rec.append(r[:-1])
        for l in lin:
            # a line in the homogenization with t-component is impossible
            # (t >= 0 forbids it), so lineality projects to lines of the set
            rec.append(l[:-1])
            rec.append(-l[:-1])
        vertices = np.array(verts) if verts else np.zeros((0, n))
        recession = np.array(rec) if rec else np.zeros((0, n))
        return VPolyhedron(vertices, recession)


@dataclass(frozen=True)
class VPolyhedron:
    """conv(vertices) + cone(rays)."""

    vertices: np.ndarray
    rays: np.ndarray = field(default=None)

    def __post_init__(self):
        verts = np.atleast_2d(np.asarray(self.vertices, dtype=float))
        if verts.size == 0:
            raise ValueError("a VPolyhedron needs at least one vertex")
        rays = self.rays
        if rays is None:
            rays = np.zeros((0, verts.shape[1]))
        rays = np.atleast_2d(np.asarray(rays, dtype=float))
        if rays.size == 0:
            rays = np.zeros((0, verts.shape[1]))
        if rays.shape[1] != verts.shape[1]:
            raise DimensionMismatchError("rays and vertices have mixed dimensions")
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "rays", rays)

    @property
    def dim(self):
        return self.vertices.shape[1]

    def contains(self, x, tol=DEFAULT_TOL):
        """Feasibility LP: x = V' mu + R' nu with mu a convex combination."""
        x = as_vector(x, self.dim)
        nv, nr = self.vertices.shape[0], self.rays.shape[0]
        A_eq = np.vstack([
            np.hstack([self.vertices.T, self.rays.T]),
            np.concatenate([np.ones(nv), np.zeros(nr)])[None, :],
        ])
        b_eq = np.concatenate([x, [1.0]])
        res = solve_lp(
            LPProblem(objective=np.zeros(nv + nr), A_eq=A_eq, b_eq=b_eq),
            tol,
        )
        return res.status == "optimal"

    def translate(self, d):
        return VPolyhedron(self.vertices + as_vector(d, self.dim), self.rays)

    def add_rays(self, more):
        more = np.atleast_2d(np.asarray(more, dtype=float))
        if more.size == 0:
            return self
        return VPolyhedron(self.vertices, np.vstack([self.rays, more]))

    def to_hpolytope(self, tol=DEFAULT_TOL):
        """Facet enumeration via extreme rays of the cone of valid inequalities."""
        _dd_guard(self.dim)
        n = self.dim
        rows = [np.hstack([-self.vertices, np.ones((self.vertices.shape[0], 1))])]
        if self.rays.shape[0]:
            rows.append(np.hstack([-self.rays, np.zeros((self.rays.shape[0], 1))]))
        validity = np.vstack(rows)
        rays, lin = extreme_rays_of_hcone(validity, tol)
        atol = max(tol.abs_tol * 100.0, 1e-9)
        normals, offsets = [], []
        for hc in rays:
            h, c = hc[:-1], hc[-1]
            if np.linalg.norm(h) > atol:
                normals.append(h)
                offsets.append(c)
        for hc in lin:
            h, c = hc[:-1], hc[-1]
            if np.linalg.norm(h) > atol:
                normals.append(h)
                offsets.append(c)
                normals.append(-h)
                offsets.append(-c)
        if not normals:
            raise ToolkitError("facet enumeration produced no halfspaces (full space?)")
        return HPolytope(np.array(normals), np.array(offsets))


def canonical_vertex_set(points, tol=DEFAULT_TOL):
    """Sort points lexicographically and merge duplicates, for golden comparisons."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[0] == 0:
        return pts
    out = []
    for p in sorted(map(tuple, np.round(pts, 12) + 0.0)):
        if not out or np.linalg.norm(np.array(p) - np.array(out[-1])) > tol.abs_tol * 100:
            out.append(p)
    return np.array(out)


def full_hull(body, cone_generators, tol=DEFAULT_TOL):
    """Smallest order-convex superset of ``body``: (body + K) intersect (body - K).

    ``body`` may be an HPolytope or VPolyhedron; ``cone_generators`` are
    V-rep generators of the order cone K (an empty array means the trivial
    order, for which the full hull is the body itself).
    """
    gens = np.atleast_2d(np.asarray(cone_generators, dtype=float))
    if isinstance(body, HPolytope):
        if gens.size == 0:
            return body
        vbody = body.to_vpolyhedron(tol)
    else:
        vbody = body
        if gens.size == 0:
            return body.to_hpolytope(tol)
    plus = vbody.add_rays(gens).to_hpolytope(tol)
    minus = vbody.add_rays(-gens).to_hpolytope(tol)
    return plus.intersect(minus)
