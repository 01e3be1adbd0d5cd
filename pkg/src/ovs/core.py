"""Dense real linear algebra and the two optimization kernels (LP, NNLS).

Everything in this module is a pure function of its inputs.  Comparisons go
through an explicit :class:`TolerancePolicy`; there is no global mutable
state, so concurrent use is safe.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class ToolkitError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatchError(ToolkitError):
    pass


class IterationLimitError(ToolkitError):
    """An iterative kernel hit its iteration cap without converging."""


class UnsupportedDispatchError(ToolkitError):
    """No admissible method exists for the requested (cone, seminorm) pair."""


class NotPolyhedralError(ToolkitError):
    pass


class NotOrderUnitError(ToolkitError):
    pass


@dataclass(frozen=True)
class TolerancePolicy:
    abs_tol: float = 1e-9
    rel_tol: float = 1e-9
    bisection_tol: float = 1e-7
    max_iter: int = 10_000

    def __post_init__(self):
        if self.abs_tol <= 0 or self.rel_tol <= 0 or self.bisection_tol <= 0:
            raise ValueError("tolerances must be strictly positive")
        if self.max_iter <= 0:
            raise ValueError("max_iter must be a positive integer")

    def close(self, a, b):
        return abs(a - b) <= max(self.abs_tol, self.rel_tol * max(abs(a), abs(b)))


DEFAULT_TOL = TolerancePolicy()


def as_vector(x, dim=None):
    """Validate and return ``x`` as a finite 1-d float array."""
    v = np.asarray(x, dtype=float)
    if v.ndim != 1:
        raise DimensionMismatchError(f"expected a vector, got shape {v.shape}")
    if dim is not None and v.shape[0] != dim:
        raise DimensionMismatchError(f"expected dimension {dim}, got {v.shape[0]}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector entries must be finite")
    return v


def as_matrix(a, rows=None, cols=None):
    """Validate and return ``a`` as a finite 2-d float array."""
    m = np.asarray(a, dtype=float)
    if m.ndim != 2:
        raise DimensionMismatchError(f"expected a matrix, got shape {m.shape}")
    if rows is not None and m.shape[0] != rows:
        raise DimensionMismatchError(f"expected {rows} rows, got {m.shape[0]}")
    if cols is not None and m.shape[1] != cols:
        raise DimensionMismatchError(f"expected {cols} columns, got {m.shape[1]}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix entries must be finite")
    return m


@dataclass(frozen=True)
class Subspace:
    """A linear subspace given by an orthonormal basis (rows of ``basis``)."""

    ambient_dim: int
    basis: np.ndarray  # shape (dim, ambient_dim), orthonormal rows

    def __post_init__(self):
        b = np.atleast_2d(np.asarray(self.basis, dtype=float))
        if b.size == 0:
            b = np.zeros((0, self.ambient_dim))
        if b.shape[1] != self.ambient_dim:
            raise DimensionMismatchError("basis vectors do not match ambient dimension")
        object.__setattr__(self, "basis", b)

    @property
    def dim(self):
        return self.basis.shape[0]

    def project(self, x):
        x = as_vector(x, self.ambient_dim)
        if self.dim == 0:
            return np.zeros(self.ambient_dim)
        return self.basis.T @ (self.basis @ x)

    def complement_project(self, x):
        return as_vector(x, self.ambient_dim) - self.project(x)

    def contains(self, x, tol=DEFAULT_TOL):
        return float(np.linalg.norm(self.complement_project(x))) <= tol.abs_tol

    @staticmethod
    def zero(ambient_dim):
        return Subspace(ambient_dim, np.zeros((0, ambient_dim)))

    @staticmethod
    def full(ambient_dim):
        return Subspace(ambient_dim, np.eye(ambient_dim))


def orthonormalize(vectors, tol=DEFAULT_TOL):
    """Orthonormal basis of span(vectors) via modified Gram-Schmidt.

    Near-zero residuals (below ``abs_tol`` relative to the input scale) are
    dropped, so collinear inputs collapse to a single basis vector.
    """
    vecs = [as_vector(v) for v in vectors]
    if not vecs:
        raise ValueError("need at least one vector to determine the ambient dimension")
    n = vecs[0].shape[0]
    for v in vecs:
        if v.shape[0] != n:
            raise DimensionMismatchError("vectors have mixed ambient dimensions")
    scale = max(1.0, max(float(np.linalg.norm(v)) for v in vecs))
    basis = []
    for v in vecs:
        u = v.copy()
        for _ in range(2):  # second pass restores orthogonality lost to cancellation
            for q in basis:
                u -= (q @ u) * q
        norm = float(np.linalg.norm(u))
        if norm > tol.abs_tol * scale:
            basis.append(u / norm)
    if basis:
        return Subspace(n, np.vstack(basis))
    return Subspace.zero(n)


def quotient_representative(x, subspace, tol=DEFAULT_TOL):
    """Canonical coset representative of ``x`` modulo ``subspace``.

    Cosets are represented by orthogonal projection onto the complement, so
    equality of cosets is plain vector comparison and the map is linear and
    idempotent.
    """
    x = as_vector(x, subspace.ambient_dim)
    return subspace.complement_project(x)


# ---------------------------------------------------------------------------
# Linear programming: dense two-phase simplex with Bland's rule.
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LPProblem:
    """min/max objective @ x subject to A_ub x <= b_ub, A_eq x = b_eq.

    ``bounds`` is a per-variable sequence of (lo, hi) pairs where ``None``
    means unbounded; the default is (0, None) for every variable.
    """

    objective: np.ndarray
    A_ub: np.ndarray | None = None
    b_ub: np.ndarray | None = None
    A_eq: np.ndarray | None = None
    b_eq: np.ndarray | None = None
    bounds: tuple | None = None
    sense: str = "min"

    def __post_init__(self):
        c = as_vector(self.objective)
        object.__setattr__(self, "objective", c)
        n = c.shape[0]
        if self.A_ub is not None:
            A = as_matrix(self.A_ub, cols=n)
            b = as_vector(self.b_ub, A.shape[0])
            object.__setattr__(self, "A_ub", A)
            object.__setattr__(self, "b_ub", b)
        if self.A_eq is not None:
            A = as_matrix(self.A_eq, cols=n)
            b = as_vector(self.b_eq, A.shape[0])
            object.__setattr__(self, "A_eq", A)
            object.__setattr__(self, "b_eq", b)
        if self.sense not in ("min", "max"):
            raise ValueError("sense must be 'min' or 'max'")
        if self.bounds is not None:
            bounds = tuple(tuple(b) for b in self.bounds)
            if len(bounds) != n:
                raise DimensionMismatchError("bounds length must match objective")
            object.__setattr__(self, "bounds", bounds)

    @property
    def num_vars(self):
        return self.objective.shape[0]


@dataclass(frozen=True)
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    value: float | None
    x: np.ndarray | None
    iterations: int
    certificate: np.ndarray | None = None  # unbounded: a feasible ray in original vars


def _standard_form(problem):
    """Rewrite as min c@z, A z = b, z >= 0; return recovery map z -> x."""
    n = problem.num_vars
    bounds = problem.bounds or tuple((0.0, None) for _ in range(n))
    cols = []  # per original variable: ("pos", j, shift) or ("split", j_plus, j_minus)
    col_count = 0
    extra_ub = []  # upper bounds become inequality rows
    for i, (lo, hi) in enumerate(bounds):
        if lo is None:
            cols.append(("split", col_count, col_count + 1))
            col_count += 2
        else:
            cols.append(("pos", col_count, float(lo)))
            col_count += 1
        if hi is not None:
            row = np.zeros(n)
            row[i] = 1.0
            extra_ub.append((row, float(hi)))

    A_ub_list, b_ub_list = [], []
    if problem.A_ub is not None:
        A_ub_list.append(problem.A_ub)
        b_ub_list.append(problem.b_ub)
    if extra_ub:
        A_ub_list.append(np.vstack([r for r, _ in extra_ub]))
        b_ub_list.append(np.array([h for _, h in extra_ub]))
    A_ub = np.vstack(A_ub_list) if A_ub_list else np.zeros((0, n))
    b_ub = np.concatenate(b_ub_list) if b_ub_list else np.zeros(0)
    A_eq = problem.A_eq if problem.A_eq is not None else np.zeros((0, n))
    b_eq = problem.b_eq if problem.b_eq is not None else np.zeros(0)

    m_ub, m_eq = A_ub.shape[0], A_eq.shape[0]
    num_z = col_count + m_ub  # structural columns + slacks
    T_A = np.zeros((m_ub + m_eq, num_z))
    T_b = np.concatenate([b_ub, b_eq]).astype(float).copy()
    c = problem.objective if problem.sense == "min" else -problem.objective
    z_cost = np.zeros(num_z)
    shift_cost = 0.0

    def scatter(row_block, target_rows):
        for i, spec in enumerate(cols):
            col = row_block[:, i]
            if spec[0] == "pos":
                T_A[target_rows, spec[1]] += col
            else:
                T_A[target_rows, spec[1]] += col
                T_A[target_rows, spec[2]] -= col

    rows_ub = np.arange(m_ub)
    rows_eq = np.arange(m_ub, m_ub + m_eq)
    if m_ub:
        scatter(A_ub, rows_ub)
    if m_eq:
        scatter(A_eq, rows_eq)
    # shifts x = z + lo move constants to the right-hand side
    for i, spec in enumerate(cols):
        if spec[0] == "pos" and spec[2] != 0.0:
            if m_ub:
                T_b[rows_ub] -= A_ub[:, i] * spec[2]
            if m_eq:
                T_b[rows_eq] -= A_eq[:, i] * spec[2]
            shift_cost += c[i] * spec[2]
    for i, spec in enumerate(cols):
        if spec[0] == "pos":
            z_cost[spec[1]] += c[i]
        else:
            z_cost[spec[1]] += c[i]
            z_cost[spec[2]] -= c[i]
    for k in range(m_ub):
        T_A[k, col_count + k] = 1.0  # slack

    def recover(z):
        x = np.zeros(n)
        for i, spec in enumerate(cols):
            if spec[0] == "pos":
                x[i] = z[spec[1]] + spec[2]
            else:
                x[i] = z[spec[1]] - z[spec[2]]
        return x

    return T_A, T_b, z_cost, shift_cost, recover


def _pivot(T, basis, row, col):
    T[row] /= T[row, col]
    piv_row = T[row]
    for r in range(T.shape[0]):
        if r != row and T[r, col] != 0.0:
            T[r] -= T[r, col] * piv_row
    basis[row] = col


def _simplex_phase(T, basis, ncols, tol, iter_budget):
    """Run Bland-rule pivoting on tableau T (last row = reduced costs).

    Returns ("optimal", iters) or ("unbounded", iters) with the entering
    column index stored on the tableau row for certificate extraction.
    """
    m = T.shape[0] - 1
    ptol = tol.abs_tol
    iters = 0
    while True:
        # Bland: smallest-index column with negative reduced cost
        enter = -1
        for j in range(ncols):
            if T[-1, j] < -ptol:
                enter = j
                break
        if enter < 0:
            return "optimal", iters, -1
        ratios_best = None
        leave = -1
        for i in range(m):
            a = T[i, enter]
            if a > ptol:
                r = T[i, -1] / a
                if ratios_best is None or r < ratios_best - ptol or (
                    abs(r - ratios_best) <= ptol and basis[i] < basis[leave]
                ):
                    ratios_best = r
                    leave = i
        if leave < 0:
            return "unbounded", iters, enter
        _pivot(T, basis, leave, enter)
        iters += 1
        if iters > iter_budget:
            raise IterationLimitError("simplex exceeded the iteration limit")


def solve_lp(problem, tol=DEFAULT_TOL):
    """Two-phase dense simplex with Bland's rule (deterministic, anti-cycling).

    Optimality is certified internally: at a reported optimum all reduced
    costs are nonnegative within ``abs_tol``, which is exactly dual
    feasibility of the simplex multipliers.
    """
    A, b, c, shift_cost, recover = _standard_form(problem)
    m, nz = A.shape
    # normalize rhs signs so artificial start is feasible
    A = A.copy()
    b = b.copy()
    neg = b < 0
    A[neg] *= -1.0
    b[neg] *= -1.0

    total = nz + m  # structural+slack columns, then artificials
    T = np.zeros((m + 1, total + 1))
    T[:m, :nz] = A
    T[:m, nz:total] = np.eye(m)
    T[:m, -1] = b
    basis = list(range(nz, total))
    # phase-1 objective: sum of artificials, expressed in reduced form
    T[-1, :nz] = -A.sum(axis=0)
    T[-1, -1] = -b.sum()

    status, it1, _ = _simplex_phase(T, basis, total, tol, tol.max_iter)
    phase1_value = -T[-1, -1]
    if phase1_value > max(tol.abs_tol, tol.rel_tol * (1.0 + abs(b).max(initial=0.0))) * 10:
        return LPResult("infeasible", None, None, it1)

    # drive artificial variables out of the basis where possible
    for i in range(m):
        if basis[i] >= nz:
            piv = -1
            for j in range(nz):
                if abs(T[i, j]) > tol.abs_tol:
                    piv = j
                    break
            if piv >= 0:
                _pivot(T, basis, i, piv)
    # no new feasible point was created, so rebuild the cost row for phase 2
    T2 = np.zeros((m + 1, nz + 1))
    T2[:m, :nz] = T[:m, :nz]
    T2[:m, -1] = T[:m, -1]
    T2[-1, :nz] = c
    for i in range(m):
        if basis[i] < nz and abs(T2[-1, basis[i]]) > 0.0:
            T2[-1] -= T2[-1, basis[i]] * T2[i]

    status, it2, enter = _simplex_phase(T2, basis, nz, tol, tol.max_iter)
    iters = it1 + it2
    if status == "unbounded":
        ray_z = np.zeros(nz)
        ray_z[enter] = 1.0
        for i in range(m):
            if basis[i] < nz:
                ray_z[basis[i]] = -T2[i, enter]
        ray = recover(ray_z) - recover(np.zeros(nz))
        sense_sign = 1.0 if problem.sense == "min" else 1.0
        return LPResult("unbounded", None, None, iters, certificate=sense_sign * ray)

    z = np.zeros(nz)
    for i in range(m):
        if basis[i] < nz:
            z[basis[i]] = T2[i, -1]
    value = float(c @ z + shift_cost)
    if problem.sense == "max":
        value = -value
    x = recover(z)
    if np.any(T2[-1, :nz] < -10 * tol.abs_tol):  # pragma: no cover - internal guard
        raise ToolkitError("simplex returned without a dual feasibility certificate")
    return LPResult("optimal", value, x, iters)


# ---------------------------------------------------------------------------
# Non-negative least squares: Lawson-Hanson active set method.
# ---------------------------------------------------------------------------

def solve_nnls(A, b, tol=DEFAULT_TOL):
    """Solve min ||A c - b||_2 subject to c >= 0 (Lawson-Hanson).

    Returns the coefficient vector; the KKT conditions hold at the result:
    the gradient is <= abs_tol on the passive set and the complementarity
    residual vanishes within tolerance.
    """
    A = as_matrix(A)
    b = as_vector(b, A.shape[0])
    m, n = A.shape
    x = np.zeros(n)
    passive = np.zeros(n, dtype=bool)
    w = A.T @ (b - A @ x)
    wtol = max(tol.abs_tol, 10 * np.finfo(float).eps * max(m, n) * max(1.0, float(np.abs(b).max(initial=0.0))))
    outer = 0
    while True:
        candidates = ~passive
        if not candidates.any() or w[candidates].max(initial=-np.inf) <= wtol:
            return x
        j = int(np.argmax(np.where(candidates, w, -np.inf)))
        passive[j] = True
        while True:
            outer += 1
            if outer > tol.max_iter:
                raise IterationLimitError("nnls exceeded the iteration limit")
            sub = np.flatnonzero(passive)
            s_sub, *_ = np.linalg.lstsq(A[:, sub], b, rcond=None)
            if s_sub.min(initial=np.inf) > 0.0:
                x = np.zeros(n)
                x[sub] = s_sub
                break
            s = np.zeros(n)
            s[sub] = s_sub
            mask = passive & (s <= 0.0)
            with np.errstate(divide="ignore", invalid="ignore"):
                alphas = x[mask] / (x[mask] - s[mask])
            alpha = float(np.min(alphas))
            x = x + alpha * (s - x)
            passive &= x > wtol
            x[~passive] = 0.0
        w = A.T @ (b - A @ x)


# ---------------------------------------------------------------------------
# Symmetric eigendecomposition: batched cyclic Jacobi sweeps.
# ---------------------------------------------------------------------------

def _tournament_rounds(n):
    """Round-robin pivot schedule: each round is a set of disjoint (p, q) pairs.

    Over the n-1 (or n) rounds every off-diagonal pair appears exactly once,
    so one pass over the rounds is one full cyclic Jacobi sweep.
    """
    m = n if n % 2 == 0 else n + 1
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        pairs = []
        for i in range(m // 2):
            a, b = players[i], players[m - 1 - i]
            if a < n and b < n:
                pairs.append((min(a, b), max(a, b)))
        if pairs:
            rounds.append((np.array([p for p, _ in pairs]), np.array([q for _, q in pairs])))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def symmetric_eigh_batch(mats, tol=DEFAULT_TOL, max_sweeps=60):
    """Eigendecompose a stack of symmetric matrices by cyclic Jacobi sweeps.

    Each sweep visits every off-diagonal pair once, grouped into rounds of
    disjoint rotations that are applied as a single orthogonal similarity.
    All matrices in the stack share the pivot schedule; converged entries
    receive identity rotations.  Returns (eigenvalues sorted ascending,
    eigenvector columns) per matrix.
    """
    A = np.array(mats, dtype=float)
    single = A.ndim == 2
    if single:
        A = A[None]
    B, n, n2 = A.shape
    if n != n2:
        raise DimensionMismatchError("matrices must be square")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix entries must be finite")
    V = np.broadcast_to(np.eye(n), (B, n, n)).copy()
    if n == 1:
        vals = A[:, 0, :].copy()
        return (vals[0], V[0]) if single else (vals, V)
    scale = np.maximum(np.abs(A).max(axis=(1, 2)), 1.0)
    thresh = tol.abs_tol * 1e-3 * scale
    rounds = _tournament_rounds(n)
    eye = np.eye(n)
    off_mask = ~np.eye(n, dtype=bool)
    converged = False
    for _ in range(max_sweeps):
        if np.all(np.abs(A[:, off_mask]).max(axis=1) <= thresh):
            converged = True
            break
        for ps, qs in rounds:
            apq = A[:, ps, qs]
            app = A[:, ps, ps]
            aqq = A[:, qs, qs]
            live = np.abs(apq) > 1e-4 * thresh[:, None]
            denom = np.where(live, 2.0 * apq, 1.0)
            theta = np.where(live, (aqq - app) / denom, 0.0)
            t = np.sign(theta) / (np.abs(theta) + np.sqrt(theta * theta + 1.0))
            t = np.where(theta == 0.0, 1.0, t)
            t = np.where(live, t, 0.0)
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c
            J = np.broadcast_to(eye, (B, n, n)).copy()
            J[:, ps, ps] = c
            J[:, qs, qs] = c
            J[:, ps, qs] = s
            J[:, qs, ps] = -s
            A = np.swapaxes(J, 1, 2) @ A @ J
            V = V @ J
    if not converged and not np.all(np.abs(A[:, off_mask]).max(axis=1) <= thresh):
        raise IterationLimitError("jacobi sweeps exceeded the limit without converging")
    vals = np.einsum("bii->bi", A).copy()
    order = np.argsort(vals, axis=1, kind="stable")
    vals = np.take_along_axis(vals, order, axis=1)
    V = np.take_along_axis(V, order[:, None, :], axis=2)
    if single:
        return vals[0], V[0]
    return vals, V


def symmetric_eigh(mat, tol=DEFAULT_TOL):
    """Eigenvalues (ascending) and eigenvector columns of one symmetric matrix."""
    return symmetric_eigh_batch(mat, tol=tol)


# ---------------------------------------------------------------------------
# Coordinates for the space of symmetric matrices.
# ---------------------------------------------------------------------------

def sym_dim(n):
    return n * (n + 1) // 2


def side_from_sym_dim(d):
    n = int((np.sqrt(8 * d + 1) - 1) / 2 + 0.5)
    if sym_dim(n) != d:
        raise DimensionMismatchError(f"{d} is not n(n+1)/2 for any integer n")
    return n


def sym_to_vec(a):
    """Coordinatize a symmetric matrix so the 2-norm equals the Frobenius norm.

    Off-diagonal entries are scaled by sqrt(2); the upper triangle is read
    row-major.
    """
    a = as_matrix(a)
    n = a.shape[0]
    if a.shape[1] != n:
        raise DimensionMismatchError("matrix must be square")
    iu = np.triu_indices(n)
    scale = np.where(iu[0] == iu[1], 1.0, np.sqrt(2.0))
    return a[iu] * scale


def vec_to_sym(v, n=None):
    v = as_vector(v)
    if n is None:
        n = side_from_sym_dim(v.shape[0])
    if sym_dim(n) != v.shape[0]:
        raise DimensionMismatchError("vector length is not a triangular number for this side")
    out = np.zeros((n, n))
    iu = np.triu_indices(n)
    scale = np.where(iu[0] == iu[1], 1.0, 1.0 / np.sqrt(2.0))
    out[iu] = v * scale
    out = out + out.T - np.diag(np.diag(out))
    return out
