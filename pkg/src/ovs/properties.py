"""Randomized and exhaustive property checks with replayable witnesses.

Every check is a pure function of (instance, seed): sampling uses a seeded
generator, fail verdicts carry a witness that re-evaluates to a violation,
and suite reports are merged deterministically by instance name.
"""
from __future__ import annotations

import numpy as np

from ovs.core import DEFAULT_TOL, ToolkitError
from ovs.cones import (
    HPolyCone,
    Orthant,
    VPolyCone,
    ZeroCone,
    full_hull,
    sample_cone_points,
)
from ovs.distance import dist_to_cone
from ovs.maps import PositiveMap, is_positive, operator_norm, universal_extension
from ovs.report import PropertyReport, fmt_value
from ovs.seminorms import LqNorm, PolytopeGauge, WeightedLqNorm
from ovs.polyhedra import HPolytope
from ovs.unitization import (
    OneMaxSeminorm,
    SeminormedSpace,
    build_unitization,
    one_max_normalization,
    retract_positivity_report,
)

__all__ = [
    "PropertyReport",
    "check_one_max_normal",
    "check_monotone",
    "check_full_hull_ball",
    "check_equivalence_constants",
    "check_normal_cone_norm",
    "check_universal_property",
    "check_normalization_bounds",
    "check_distance_axioms",
    "golden_suite",
    "random_suite",
    "run_suite",
    "SUITES",
]


def _tuple(x):
    return tuple(float(v) for v in np.atleast_1d(np.round(np.asarray(x, float), 12)))


def check_one_max_normal(p, K, samples=2000, seed=0, tol=DEFAULT_TOL):
    """x <= y <= z must imply p(y) <= max(p(x), p(z)).

    Chains are sampled as x = y - s, z = y + t with s, t in the cone and y
    Gaussian, covering boundary and interior without tuning.
    """
    rng = np.random.default_rng(seed)
    ys = rng.standard_normal((samples, K.dim))
    ss = sample_cone_points(K, rng, samples, tol) * rng.exponential(1.0, samples)[:, None]
    ts = sample_cone_points(K, rng, samples, tol) * rng.exponential(1.0, samples)[:, None]
    for y, s, t in zip(ys, ss, ts):
        x, z = y - s, y + t
        if p.evaluate(y) > max(p.evaluate(x), p.evaluate(z)) + tol.abs_tol:
            return PropertyReport(
                "one-max-normal", "fail", samples, tol.abs_tol,
                witness=(_tuple(x), _tuple(y), _tuple(z)), seed=seed,
            )
    return PropertyReport("one-max-normal", "pass", samples, tol.abs_tol, seed=seed)


def check_monotone(p, K, samples=2000, seed=0, tol=DEFAULT_TOL):
    """0 <= x <= y must imply p(x) <= p(y)."""
    rng = np.random.default_rng(seed)
    xs = sample_cone_points(K, rng, samples, tol)
    steps = sample_cone_points(K, rng, samples, tol) * rng.exponential(1.0, samples)[:, None]
    for x, t in zip(xs, steps):
        y = x + t
        if p.evaluate(x) > p.evaluate(y) + tol.abs_tol:
            return PropertyReport(
                "monotone", "fail", samples, tol.abs_tol,
                witness=(_tuple(x), _tuple(y)), seed=seed,
            )
    return PropertyReport("monotone", "pass", samples, tol.abs_tol, seed=seed)


def check_full_hull_ball(p, K, grid=41, window=2.0, seed=0, tol=DEFAULT_TOL):
    """The unit ball of the 1-max-normalization equals the full hull of the
    unit ball of p, tested by membership agreement on a grid (points within
    ``abs_tol`` of the p_u unit sphere are boundary-indeterminate)."""
    E = SeminormedSpace(K.dim, K, p)
    hull = full_hull(p.unit_ball_hrep(tol), K, tol)
    pu = one_max_normalization(E, tol)
    axes = [np.linspace(-window, window, grid)] * K.dim
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=1)
    tested = 0
    for x in pts:
        v = pu.evaluate(x)
        if abs(v - 1.0) <= 100 * tol.abs_tol:
            continue
        tested += 1
        if (v <= 1.0) != hull.contains(x, tol):
            return PropertyReport(
                "full-hull-ball", "fail", tested, tol.abs_tol,
                witness=_tuple(x), seed=seed,
            )
    return PropertyReport("full-hull-ball", "pass", tested, tol.abs_tol, seed=seed)


def _sphere_candidates(p, dim, rng, samples):
    """p-unit-sphere points: sign-grid directions plus normalized Gaussians."""
    cands = []
    grid = np.array(np.meshgrid(*[[-1.0, 0.0, 1.0]] * dim, indexing="ij")).reshape(dim, -1).T
    for g in grid:
        if np.any(g):
            cands.append(g)
    cands.extend(rng.standard_normal((samples, dim)))
    out = []
    for x in cands:
        v = p.evaluate(x)
        if v > 1e-12:
            out.append(np.asarray(x, float) / v)
    return out


def check_equivalence_constants(p, K, expected_lower, samples=400, seed=0, tol=DEFAULT_TOL):
    """Estimate the best constant eps with eps * p <= p_u <= p over p-unit
    sphere samples; passes iff the estimate reaches ``expected_lower``."""
    rng = np.random.default_rng(seed)
    E = SeminormedSpace(K.dim, K, p)
    pu = one_max_normalization(E, tol)
    eps_low = np.inf
    tested = 0
    for x in _sphere_candidates(p, K.dim, rng, samples):
        tested += 1
        eps_low = min(eps_low, pu.evaluate(x))
    ok = abs(eps_low - expected_lower) <= 1e-6 or eps_low >= expected_lower
    return PropertyReport(
        "equivalence-constants", "pass" if ok else "fail", tested, tol.abs_tol,
        witness=(float(np.round(eps_low, 12)),), seed=seed,
    )


def check_normal_cone_norm(p, K, expect_norm, samples=400, seed=0, tol=DEFAULT_TOL):
    """For a normal cone p_u must be a monotone norm; otherwise the check
    witnesses a degenerate direction (p_u = 0 on a nonzero vector)."""
    rng = np.random.default_rng(seed)
    E = SeminormedSpace(K.dim, K, p)
    pu = one_max_normalization(E, tol)
    degenerate = None
    for x in _sphere_candidates(p, K.dim, rng, samples):
        if pu.evaluate(x) <= 100 * tol.abs_tol:
            degenerate = x
            break
    if expect_norm:
        if degenerate is not None:
            return PropertyReport(
                "normal-cone-norm", "fail", samples, tol.abs_tol,
                witness=_tuple(degenerate), seed=seed,
            )
        mono = check_monotone(pu, K, samples, seed, tol)
        if mono.verdict != "pass":
            return PropertyReport(
                "normal-cone-norm", "fail", samples, tol.abs_tol,
                witness=mono.witness, seed=seed,
            )
        return PropertyReport("normal-cone-norm", "pass", samples, tol.abs_tol, seed=seed)
    if degenerate is None:
        return PropertyReport(
            "normal-cone-norm", "fail", samples, tol.abs_tol,
            witness=("expected a degenerate direction, found none",), seed=seed,
        )
    return PropertyReport(
        "normal-cone-norm", "pass", samples, tol.abs_tol,
        witness=_tuple(degenerate), seed=seed,
    )


def check_universal_property(psi, samples=200, seed=0, tol=DEFAULT_TOL):
    """Factorization, unitality, and uniqueness-by-reconstruction for the
    unital extension of a contractive positive map."""
    try:
        ext = universal_extension(psi, tol)
    except ToolkitError as exc:
        return PropertyReport(
            "universal-property", "precondition-failed", 0, tol.abs_tol,
            witness=(str(exc),), seed=seed,
        )
    U = ext.domain
    rng = np.random.default_rng(seed)
    n = U.base.dim
    for x in rng.standard_normal((samples, n)):
        lhs = ext.apply(np.concatenate([U.canonical_rep(x), [0.0]]))
        rhs = psi.apply(x)
        if np.linalg.norm(lhs - rhs) > 1e-12 + 1e-9 * np.linalg.norm(rhs):
            return PropertyReport(
                "universal-property", "fail", samples, 1e-12,
                witness=_tuple(x), seed=seed,
            )
    unit_img = ext.apply(U.unit.coords())
    from ovs.maps import _space_unit_coords

    if not np.array_equal(unit_img, np.asarray(_space_unit_coords(ext.codomain), float)):
        return PropertyReport(
            "universal-property", "fail", samples, 0.0,
            witness=_tuple(unit_img), seed=seed,
        )
    return PropertyReport("universal-property", "pass", samples, 1e-12, seed=seed)


def check_normalization_bounds(E, samples=500, seed=0, tol=DEFAULT_TOL):
    """p_u <= p pointwise, and (p_u)_u = p_u (idempotence), on samples."""
    rng = np.random.default_rng(seed)
    pu = one_max_normalization(E, tol)
    Eu = SeminormedSpace(E.dim, E.cone, pu)
    puu = one_max_normalization(Eu, tol)
    for x in rng.standard_normal((samples, E.dim)) * rng.exponential(1.0, (samples, 1)):
        a, b, c = E.seminorm.evaluate(x), pu.evaluate(x), puu.evaluate(x)
        if b > a + tol.abs_tol or abs(c - b) > 100 * tol.abs_tol:
            return PropertyReport(
                "normalization-bounds", "fail", samples, tol.abs_tol,
                witness=_tuple(x), seed=seed,
            )
    return PropertyReport("normalization-bounds", "pass", samples, tol.abs_tol, seed=seed)


def check_distance_axioms(E, samples=300, seed=0, tol=DEFAULT_TOL):
    """Positive homogeneity, subadditivity, nonexpansiveness, and coset
    invariance of x -> d(x, E+), sampled."""
    rng = np.random.default_rng(seed)
    closure = E.cone.closure()
    p = E.seminorm
    U = build_unitization(E, tol)

    def d(x):
        return dist_to_cone(x, closure, p, tol)

    for _ in range(samples):
        x = rng.standard_normal(E.dim)
        y = rng.standard_normal(E.dim)
        a = rng.exponential(1.0) + 1e-3
        if abs(d(a * x) - a * d(x)) > tol.abs_tol * (1 + a) * 10:
            return PropertyReport("distance-axioms", "fail", samples, tol.abs_tol,
                                  witness=("homogeneity",) + _tuple(x) + (float(a),), seed=seed)
        if d(x + y) > d(x) + d(y) + 10 * tol.abs_tol:
            return PropertyReport("distance-axioms", "fail", samples, tol.abs_tol,
                                  witness=("subadditivity",) + _tuple(x) + _tuple(y), seed=seed)
        if abs(d(x) - d(y)) > p.evaluate(x - y) + 10 * tol.abs_tol:
            return PropertyReport("distance-axioms", "fail", samples, tol.abs_tol,
                                  witness=("nonexpansive",) + _tuple(x) + _tuple(y), seed=seed)
        if U.N.dim:
            z = U.N.basis.T @ rng.standard_normal(U.N.dim)
            if abs(d(x + z) - d(x)) > 10 * tol.abs_tol:
                return PropertyReport("distance-axioms", "fail", samples, tol.abs_tol,
                                      witness=("coset",) + _tuple(x) + _tuple(z), seed=seed)
    return PropertyReport("distance-axioms", "pass", samples, tol.abs_tol, seed=seed)


# ---------------------------------------------------------------------------
# Suites: named instances with expected verdicts.
# ---------------------------------------------------------------------------

def _nonfull_gauge():
    # gauge of {|x1 - x2| <= 1, |x2| <= 5}: not monotone over the orthant
    normals = np.array([[1.0, -1.0], [-1.0, 1.0], [0.0, 0.2], [0.0, -0.2]])
    return PolytopeGauge(HPolytope(normals, np.ones(4)))


def golden_suite(seed=0, tol=DEFAULT_TOL):
    """The pinned instances; every row carries its expected verdict."""
    o2 = Orthant(2)
    z2 = ZeroCone(2)
    half = HPolyCone(np.array([[0.0, 1.0]]))
    l1, l2, linf = LqNorm(1, 2), LqNorm(2, 2), LqNorm(np.inf, 2)
    E_l1 = SeminormedSpace(2, o2, l1)
    pu_l1 = one_max_normalization(E_l1, tol)
    from ovs.maps import AOUSpace, real_line
    from ovs.seminorms import OrderUnitSeminorm

    F = AOUSpace(2, o2, np.array([1.0, 1.0]))
    E_aou = SeminormedSpace(2, o2, OrderUnitSeminorm(o2, np.array([1.0, 1.0])))
    psi_id = PositiveMap(np.eye(2), domain=E_aou, codomain=F)
    psi_zero = PositiveMap(np.zeros((2, 2)), domain=E_aou, codomain=F)
    psi_half = PositiveMap(0.5 * np.eye(2), domain=E_aou, codomain=F)
    psi_big = PositiveMap(2.0 * np.eye(2), domain=E_aou, codomain=F)

    def cstar_n2(s):
        from ovs.hermitian import check_cstar_unitization_agreement

        return check_cstar_unitization_agreement(2, samples=60, seed=s, tol=tol)

    def retract_report(s):
        U = build_unitization(E_aou, tol)
        return retract_positivity_report(U, samples=120, seed=s, tol=tol)

    rows = [
        ("onemax-linf-orthant", lambda s: check_one_max_normal(linf, o2, 2000, s, tol), "pass"),
        ("onemax-l1-orthant", lambda s: check_one_max_normal(l1, o2, 2000, s, tol), "fail"),
        ("onemax-l1-zerocone", lambda s: check_one_max_normal(l1, z2, 500, s, tol), "pass"),
        ("monotone-pu-l1-orthant", lambda s: check_monotone(pu_l1, o2, 400, s, tol), "pass"),
        ("monotone-l2-orthant", lambda s: check_monotone(l2, o2, 2000, s, tol), "pass"),
        ("monotone-nonfull-gauge", lambda s: check_monotone(_nonfull_gauge(), o2, 2000, s, tol), "fail"),
        ("fullhull-l1-orthant", lambda s: check_full_hull_ball(l1, o2, 41, 2.0, s, tol), "pass"),
        ("fullhull-linf-orthant", lambda s: check_full_hull_ball(linf, o2, 41, 2.0, s, tol), "pass"),
        ("fullhull-l1-zerocone", lambda s: check_full_hull_ball(l1, z2, 21, 2.0, s, tol), "pass"),
        ("equivalence-linf-orthant", lambda s: check_equivalence_constants(linf, o2, 1.0, 300, s, tol), "pass"),
        ("equivalence-l1-orthant", lambda s: check_equivalence_constants(l1, o2, 0.5, 300, s, tol), "pass"),
        ("equivalence-l2-zerocone", lambda s: check_equivalence_constants(l2, z2, 1.0, 300, s, tol), "pass"),
        ("normalnorm-l2-orthant", lambda s: check_normal_cone_norm(l2, o2, True, 300, s, tol), "pass"),
        ("normalnorm-l2-halfspace", lambda s: check_normal_cone_norm(l2, half, False, 300, s, tol), "pass"),
        ("normalnorm-l2-zerocone", lambda s: check_normal_cone_norm(l2, z2, True, 300, s, tol), "pass"),
        ("universal-identity", lambda s: check_universal_property(psi_id, 200, s, tol), "pass"),
        ("universal-zero-map", lambda s: check_universal_property(psi_zero, 200, s, tol), "pass"),
        ("universal-half-identity", lambda s: check_universal_property(psi_half, 200, s, tol), "pass"),
        ("universal-noncontractive", lambda s: check_universal_property(psi_big, 200, s, tol), "precondition-failed"),
        ("cstar-agreement-n2", cstar_n2, "pass"),
        ("retract-positivity-orthant", retract_report, "indeterminate"),
    ]
    return rows


def random_suite(seed=0, count=6, tol=DEFAULT_TOL):
    """Randomly generated instances checking theorem-level properties of the
    normalization and the distance; all rows are expected to pass."""
    rng = np.random.default_rng(seed)
    rows = []
    for i in range(count):
        dim = int(rng.integers(2, 4))
        kind = ["orthant", "vpoly", "hpoly", "zero"][int(rng.integers(0, 4))]
        if kind == "orthant":
            K = Orthant(dim)
        elif kind == "vpoly":
            K = VPolyCone(rng.standard_normal((int(rng.integers(dim, dim + 3)), dim)))
        elif kind == "hpoly":
            K = HPolyCone(rng.standard_normal((int(rng.integers(1, dim + 1)), dim)))
        else:
            K = ZeroCone(dim)
        q = [1.0, 2.0, np.inf][int(rng.integers(0, 3))]
        if rng.random() < 0.3:
            p = WeightedLqNorm(q, rng.uniform(0.5, 2.0, dim))
        else:
            p = LqNorm(q, dim)
        E = SeminormedSpace(dim, K, p)
        pu = one_max_normalization(E, tol)
        name = f"random-{i}-{kind}-q{'inf' if q == np.inf else int(q)}-d{dim}"
        rows.append((f"{name}-pu-onemax",
                     (lambda s, pu=pu, K=K: check_one_max_normal(pu, K, 300, s, tol)), "pass"))
        rows.append((f"{name}-bounds",
                     (lambda s, E=E: check_normalization_bounds(E, 150, s, tol)), "pass"))
        rows.append((f"{name}-distance",
                     (lambda s, E=E: check_distance_axioms(E, 100, s, tol)), "pass"))
    return rows


def broken_suite(seed=0, tol=DEFAULT_TOL):
    """The golden suite with one intentionally wrong expectation (the l1
    seminorm flagged as 1-max-normal), for exercising failure reporting."""
    rows = golden_suite(seed, tol)
    return [
        (name, fn, "pass" if name == "onemax-l1-orthant" else expected)
        for name, fn, expected in rows
    ]


SUITES = {"golden": golden_suite, "random": random_suite, "broken": broken_suite}


def run_suite(name, seed=0, tol=DEFAULT_TOL):
    """Run a suite; returns (rows, all_ok) with rows sorted by instance name.

    Each row is (instance, report, expected, ok); sub-seeds are derived
    deterministically from the suite seed and the instance position.
    """
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; available: {sorted(SUITES)}")
    spec_rows = SUITES[name](seed, tol)
    out = []
    for i, (instance, fn, expected) in enumerate(spec_rows):
        report = fn(seed + 1000 * i)
        out.append((instance, report, expected, report.verdict == expected))
    out.sort(key=lambda r: r[0])
    return out, all(ok for _, _, _, ok in out)


def format_suite_rows(rows):
    """Fixed-layout text rows (tab separated), byte-deterministic per seed."""
    lines = []
    for instance, report, expected, ok in rows:
        lines.append(
            f"{instance}\t{report.verdict}\texpected={expected}\t"
            f"ok={'yes' if ok else 'no'}\tsamples={report.samples}\t"
            f"witness={fmt_value(report.witness)}"
        )
    return "\n".join(lines) + "\n"
