"""Recover a Delzant polytope from a sequence of joint-spectrum clouds.

Pipeline: convex hull of the finest cloud -> rational facet normals ->
per-cloud support offsets -> extrapolation k -> infinity -> snap onto the
2pi-lattice -> validate.  Every stage leaves its numbers in the result.
"""

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

import numpy as np
from scipy.spatial import ConvexHull, QhullError, cKDTree

from .delzant import (
    ValidationReport,
    canonical,
    check_prequantizable,
    half_form_vector,
    polytope_equal,
    validate_delzant,
)
from .errors import (
    HullDegenerate,
    NoHalfForm,
    NotDelzant,
    RationalizationFailed,
    SnapExceeded,
    ToricError,
)
from .lattice import HPolytope, affine_rank, enumerate_vertices, hausdorff_distance, primitive_part, recession_ray
from .quantum import TWO_PI, model_spectrum


def worker_count():
    """Thread cap from TORIC_SPEC_THREADS (default: 1, i.e. sequential)."""
    try:
        return max(1, int(os.environ.get("TORIC_SPEC_THREADS", "1")))
    except ValueError:
        return 1


@dataclass
class ReconstructionConfig:
    denominator_bound: int = 32
    snap_tolerance: float = None  # absolute units; None -> 0.4 * 2pi / k_max
    minimum_clouds: int = 1
    order: int = 1  # degree of the polynomial-in-1/k offset fit

    def __post_init__(self):
        if self.denominator_bound < 1:
            raise ValueError("denominator_bound must be >= 1")
        if self.snap_tolerance is not None and self.snap_tolerance <= 0:
            raise ValueError("snap_tolerance must be positive")
        if self.order < 0:
            raise ValueError("order must be >= 0")

    def tolerance(self, k_max):
        return self.snap_tolerance if self.snap_tolerance is not None else 0.4 * TWO_PI / k_max


@dataclass
class ReconstructionResult:
    polytope: object
    translation_used: tuple
    per_k_residuals: list
    rate_fit: tuple  # (C, exponent), exponent free
    constrained_C: float  # C with exponent frozen at 1
    certificate: str
    stages: dict = field(default_factory=dict)


def rationalize_normal(direction, Q):
    """Primitive integer vector along a float direction, entries ratio-bounded by Q.

    Each component is divided by the largest-magnitude one and replaced by its
    best rational approximation with denominator <= Q.
    """
    direction = np.asarray(direction, dtype=float)
    j = int(np.argmax(np.abs(direction)))
    lead = direction[j]
    if lead == 0 or not np.isfinite(lead):
        raise RationalizationFailed("zero or non-finite facet normal")
    ratios = [Fraction(float(x / lead)).limit_denominator(Q) for x in direction]
    den = math.lcm(*(r.denominator for r in ratios))
    sign = 1 if lead > 0 else -1
    return primitive_part(tuple(sign * int(r * den) for r in ratios))


def _hull_normals(points, Q, tau):
    """Distinct rationalized inward normals of the hull facets of a cloud (2pi-units)."""
    try:
        hull = ConvexHull(points)
    except (QhullError, ValueError) as exc:
        raise HullDegenerate(f"cloud is not full-dimensional: {exc}") from None
    normals = set()
    for simplex, eq in zip(hull.simplices, hull.equations):
        X = rationalize_normal(-eq[:-1], Q)
        Xa = np.array(X, dtype=float)
        vals = points @ Xa
        spread = (points[simplex] @ Xa - vals.min()).max() / np.linalg.norm(Xa)
        if spread > tau:
            raise RationalizationFailed(
                f"normal {X} misses its hull facet by {spread:.3g} (> {tau:.3g}); raise denominator_bound")
        normals.add(X)
    return sorted(normals)


def _support_offsets(points, normals):
    """lambda_f(k) = -min_p <X_f, p> for one cloud."""
    N = np.array(normals, dtype=float)
    return -(points @ N.T).min(axis=0)


def extrapolate(ks, values, order=1):
    """Least-squares fit of values(k) as a polynomial in 1/k; returns the k -> inf limit.

    ``values`` has one row per k.  The degree is capped at len(ks) - 1.
    """
    ks = np.asarray(ks, dtype=float)
    values = np.asarray(values, dtype=float)
    deg = min(order, len(ks) - 1)
    A = np.vander(1.0 / ks, deg + 1, increasing=True)
    coef, *_ = np.linalg.lstsq(A, values, rcond=None)
    return coef[0]


def _float_vertices(normals, lam):
    """Vertices of {<X, x> + lam >= 0} by solving every n-subset (vectorised)."""
    N = np.asarray(normals, dtype=float)
    lam = np.asarray(lam, dtype=float)
    n = N.shape[1]
    idx = np.array(list(combinations(range(len(N)), n)), dtype=int).reshape(-1, n)
    if not len(idx):
        return np.zeros((0, n))
    A = N[idx]
    ok = np.abs(np.linalg.det(A)) > 1e-12
    A, idx = A[ok], idx[ok]
    if not len(idx):
        return np.zeros((0, n))
    x = np.linalg.solve(A, -lam[idx][..., None])[..., 0]
    scale = max(1.0, float(np.abs(lam).max()))
    inside = (x @ N.T + lam >= -1e-9 * scale).all(axis=1)
    return x[inside]


def _drop_undetectable(normals, lam, tau):
    """Indices of halfspaces to keep after removing those that cut at most tau deep.

    Noise produces hull facets that shave a corner or an edge by less than the
    snap tolerance; deleting them changes the polytope by at most tau, so they
    are invisible at this resolution.  Among removable cuts the one with the
    largest normal goes first: a near-parallel pair like (0, -1) and (-1, -31)
    covers for each other, and the simpler normal is the real facet.
    """
    N = np.asarray(normals, dtype=float)
    norms = np.linalg.norm(N, axis=1)
    keep = list(range(len(normals)))
    while True:
        depths = []
        for j in keep:
            rest = [i for i in keep if i != j]
            if recession_ray([normals[i] for i in rest], N.shape[1]) is not None:
                continue
            vr = _float_vertices(N[rest], lam[rest])
            if not len(vr):
                continue
            depth = float(-(vr @ N[j] + lam[j]).min()) / norms[j]
            if depth <= tau:
                depths.append((-max(map(abs, normals[j])), depth, j))
        if not depths:
            return keep
        keep.remove(min(depths)[2])


def lex_min(points, tol=1e-7):
    """Lexicographic minimum with ties up to tol in each coordinate."""
    cand = list(points)
    for i in range(len(cand[0])):
        m = min(p[i] for p in cand)
        cand = [p for p in cand if p[i] <= m + tol]
    return cand[0]


def _prune_to_facets(halfspaces, n):
    """Drop halfspaces that do not support an (n-1)-dimensional face."""
    hs = sorted(set(halfspaces))
    verts = enumerate_vertices(hs, n)
    keep = []
    for j, h in enumerate(hs):
        if affine_rank([v for v, act in verts if j in act]) == n - 1:
            keep.append(h)
    return keep


def _fit_rate(ks, ds):
    pos = [(k, d) for k, d in zip(ks, ds) if d > 0]
    if not pos:
        return (0.0, 1.0), 0.0
    lk = np.log([k for k, _ in pos])
    ld = np.log([d for _, d in pos])
    constrained = float(np.exp(np.mean(ld + lk)))
    if len(pos) < 2:
        return (constrained, 1.0), constrained
    slope, intercept = np.polyfit(lk, ld, 1)
    return (float(np.exp(intercept)), float(-slope)), constrained


def limit_polytope(clouds, cfg=None):
    """Reconstruct the polytope whose model spectra the clouds approximate."""
    cfg = cfg or ReconstructionConfig()
    clouds = list(clouds)
    if len(clouds) < max(1, cfg.minimum_clouds):
        raise ValueError(f"need at least {max(1, cfg.minimum_clouds)} clouds, got {len(clouds)}")
    ks = [c.k for c in clouds]
    if ks != sorted(ks) or len(set(ks)) != len(ks):
        raise ValueError("clouds must be sorted by strictly increasing k")
    n = clouds[0].dim
    if any(c.dim != n for c in clouds):
        raise ValueError("clouds have different dimensions")
    if any(len(c) == 0 for c in clouds):
        raise HullDegenerate("empty cloud")

    k_max = ks[-1]
    tau_abs = cfg.tolerance(k_max)
    tau = tau_abs / TWO_PI
    pts = [c.points / TWO_PI for c in clouds]
    stages = {"k": ks, "tolerance": tau_abs}

    # 1-2: facet normals
    if n == 1:
        normals = [(-1,), (1,)]
    else:
        normals = _hull_normals(pts[-1], cfg.denominator_bound, tau)
    stages["normals"] = normals

    # 3: offsets per cloud, then k -> infinity
    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        per_k = list(pool.map(lambda p: _support_offsets(p, normals), pts))
    lam = extrapolate(ks, np.array(per_k), cfg.order)
    stages["offsets_per_k"] = [row.tolist() for row in per_k]
    stages["offsets_limit"] = lam.tolist()

    # 4: drop sub-resolution cuts, then snap
    kept = _drop_undetectable(normals, lam, tau)
    stages["dropped_normals"] = [X for i, X in enumerate(normals) if i not in kept]
    normals, lam = [normals[i] for i in kept], lam[kept]
    verts = _float_vertices(normals, lam)
    if not len(verts):
        raise HullDegenerate("extrapolated halfspaces have no vertex")
    v0 = lex_min(verts)
    N = np.array(normals, dtype=float)
    shifted = lam + N @ v0
    rounded = np.rint(shifted)
    err = np.abs(shifted - rounded) / np.linalg.norm(N, axis=1)
    stages["snap_errors"] = err.tolist()
    raw = {"normals": normals, "offsets": lam.tolist(), "unit": "2pi"}
    if (err > tau).any():
        worst = int(np.argmax(err))
        raise SnapExceeded(
            f"offset of normal {normals[worst]} is {err[worst] * TWO_PI:.3g} from the lattice "
            f"(tolerance {tau_abs:.3g})", raw)

    hs = _prune_to_facets([(X, Fraction(int(r))) for X, r in zip(normals, rounded)], n)
    candidate = HPolytope(n, tuple(hs))
    snapped = validate_delzant(candidate, "reconstructed")
    if isinstance(snapped, ValidationReport):
        raise NotDelzant("snapped polytope is not Delzant:\n" + str(snapped), snapped)

    # 5: canonical form, put back at the estimated position
    c = check_prequantizable(snapped)
    canon = snapped.translated(c)
    est = v0 - np.array([float(x) for x in c])
    translation = []
    for x in est:
        q = Fraction(float(x)).limit_denominator(cfg.denominator_bound)
        translation.append(q if abs(float(q) - x) <= tau else Fraction(float(x)))
    translation = tuple(translation)
    result_polytope = canon.translated(translation)

    # 6: residuals and rate
    residuals = []
    for cloud in clouds:
        model = model_spectrum(result_polytope, cloud.k)
        residuals.append((cloud.k, hausdorff_distance(cloud.points, model.points)))
    rate, constrained = _fit_rate([k for k, _ in residuals], [d for _, d in residuals])

    try:
        u = half_form_vector(result_polytope)
        half = f"half-form: u = ({', '.join(map(str, u))})"
    except NoHalfForm:
        half = "half-form: none"
    lines = [
        "== reconstruction certificate ==",
        f"clouds: k = {', '.join(map(str, ks))}",
        f"facet normals: {len(stages['normals'])} hull directions, {len(stages['dropped_normals'])} "
        f"sub-tolerance cuts dropped -> {len(result_polytope.facets)} facets",
        f"max snap error: {float(err.max()) * TWO_PI:.3g} (tolerance {tau_abs:.3g}, absolute units)",
        "Delzant: OK",
        f"prequantizable: OK, translation used = ({', '.join(str(x) for x in translation)}) [2pi-units]",
        half,
        f"residual fit: d_H ~ {rate[0]:.4g} * k^-{rate[1]:.3g}; exponent-1 fit C = {constrained:.4g}",
    ]
    for k, d in residuals:
        lines.append(f"  k = {k}: d_H = {d:.6g}")
    return ReconstructionResult(result_polytope, translation, residuals, rate, constrained,
                                "\n".join(lines), stages)


@dataclass
class ConvergenceReport:
    rows: list  # (k, d_H)
    C: float  # fit d_H ~ C / k
    worst: list  # (k, cloud point farthest from model, model point farthest from cloud)


def convergence_report(clouds, P):
    """Hausdorff distance of each cloud to the model spectrum of P, fit to C/k."""
    rows, worst = [], []
    for cloud in clouds:
        model = model_spectrum(P, cloud.k).points
        a, b = cloud.points, model
        if a.shape[1] != b.shape[1]:
            raise ToricError("cloud and polytope dimensions differ")
        da, ia = cKDTree(b).query(a)
        db, ib = cKDTree(a).query(b)
        rows.append((cloud.k, float(max(da.max(), db.max()))))
        worst.append((cloud.k, tuple(a[int(np.argmax(da))]), tuple(b[int(np.argmax(db))])))
    _, C = _fit_rate([k for k, _ in rows], [d for _, d in rows])
    return ConvergenceReport(rows, C, worst)


def isomorphic(A, B):
    """Isospectrality verdict: toric systems are isomorphic iff their polytopes agree."""
    return polytope_equal(A, B)


def canonical_equal(A, B):
    """Equality after moving each polytope's lexicographically smallest vertex to 0."""
    return polytope_equal(canonical(A), canonical(B))
