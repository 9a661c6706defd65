import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from toricspec import library
from toricspec.delzant import canonical, from_facets, polytope_equal
from toricspec.errors import DimensionMismatch, HullDegenerate, NotDelzant, RationalizationFailed, SnapExceeded
from toricspec.inverse import (
    ReconstructionConfig,
    canonical_equal,
    convergence_report,
    extrapolate,
    isomorphic,
    limit_polytope,
    rationalize_normal,
)
from toricspec.quantum import (
    TWO_PI,
    DeformationSeries,
    Polynomial,
    SpectrumCloud,
    apply_deformation,
    inject_noise,
    model_spectrum,
)

from .helpers import G1, delzant_polytopes, sup_over_polytope

LIB = ["cp1", "cp2", "square", "h1", "h2"]


def clouds_of(P, ks, g=None):
    out = [model_spectrum(P, k) for k in ks]
    return [apply_deformation(c, g) for c in out] if g else out


def test_rationalize_normal():
    assert rationalize_normal([0.70710678, 0.70710678], 32) == (1, 1)
    assert rationalize_normal([-0.4472136, -0.89442719], 32) == (-1, -2)
    assert rationalize_normal([3.0, -1e-12], 32) == (1, 0)
    assert rationalize_normal([0.3, 0.7], 32) == (3, 7)


def test_extrapolate_recovers_affine_limit():
    ks = [8, 16, 32]
    vals = np.array([[2 + 3 / k, -1 + 0.5 / k] for k in ks])
    np.testing.assert_allclose(extrapolate(ks, vals), [2, -1], atol=1e-12)
    assert extrapolate([8], np.array([[1.5]]))[0] == 1.5


def test_exact_square_roundtrip():
    S = library.square()
    res = limit_polytope(clouds_of(S, [8, 32]))
    assert polytope_equal(res.polytope, S)
    assert all(d == 0 for _, d in res.per_k_residuals)
    assert "Delzant: OK" in res.certificate


def test_cp2_deformed_roundtrip():
    P = library.cp2()
    x = Polynomial(((F(3, 10), (1, 0)), (-F(3, 10) / F(TWO_PI).limit_denominator(10 ** 9), (2, 0))))
    g = DeformationSeries(2, ((x, Polynomial(((F(1, 5), (0, 1)),))),))
    res = limit_polytope(clouds_of(P, [16, 32, 64], g))
    assert canonical_equal(res.polytope, P)


def test_single_interval_cloud():
    res = limit_polytope([model_spectrum(library.cp1(), 4)])
    assert polytope_equal(res.polytope, library.cp1())


def test_translation_is_recovered():
    P = library.h1().translated((F(2), F(-1, 2)))
    res = limit_polytope(clouds_of(P, [8, 16]))
    assert polytope_equal(res.polytope, P)
    assert res.translation_used == (2, F(-1, 2))


@pytest.mark.parametrize("name", LIB + ["cp3"])
def test_exact_roundtrip_library(name):
    P = library.get(name)
    ks = [8, 16, 32] if P.dim < 3 else [4, 8]
    res = limit_polytope(clouds_of(P, ks))
    assert canonical_equal(res.polytope, P)
    assert polytope_residuals_zero(res)


def polytope_residuals_zero(res):
    return all(d < 1e-12 for _, d in res.per_k_residuals)


@pytest.mark.parametrize("name", LIB)
def test_deformation_robustness(name):
    """g1 with sup <= 0.25 * 2pi/k_min still reconstructs exactly."""
    P = library.get(name)
    ks = [8, 16, 32]
    g = G1[P.dim]
    assert sup_over_polytope(g, P) <= 0.25 * TWO_PI / ks[0]
    res = limit_polytope(clouds_of(P, ks, g))
    assert canonical_equal(res.polytope, P)
    ds = [d for _, d in res.per_k_residuals]
    assert all(b <= 2 * a for a, b in zip(ds, ds[1:]))
    assert math.isfinite(res.constrained_C)


def test_noisy_roundtrip():
    P = library.h2()
    rng = np.random.default_rng(11)
    clouds = [inject_noise(c, 1.0, 1, rng) for c in clouds_of(P, [8, 16, 32])]
    res = limit_polytope(clouds)
    assert canonical_equal(res.polytope, P)
    assert res.stages["dropped_normals"]


def test_convergence_report_examples():
    P = library.square()
    rep = convergence_report(clouds_of(P, [4, 8, 16]), P)
    assert all(d == 0 for _, d in rep.rows) and rep.C == 0

    g = G1[2]
    B = sup_over_polytope(g, P)
    rep = convergence_report(clouds_of(P, [16, 32, 64], g), P)
    assert rep.C <= B * 1.1

    Q = library.h1()
    rep = convergence_report(clouds_of(Q, [8, 16, 32]), P)
    floor = TWO_PI * 1 / 2  # Hausdorff distance between the two polytopes is 2pi/sqrt(2) > pi
    assert all(d >= floor / 2 for _, d in rep.rows)


def test_isomorphic_examples():
    P = library.square()
    assert isomorphic(limit_polytope(clouds_of(P, [8, 16])).polytope, P)
    with pytest.raises(DimensionMismatch):
        isomorphic(library.cp1(), library.cp2())
    sheared = from_facets([(1, 0), (-1, 1), (-1, 0), (1, -1)], [0, 0, 1, 1])
    assert not isomorphic(P, sheared)


def test_hull_degenerate():
    pts = np.array([[0, 0], [1, 1], [2, 2]], dtype=float)
    with pytest.raises(HullDegenerate):
        limit_polytope([SpectrumCloud(4, pts)])


def test_rationalization_failure():
    with pytest.raises(RationalizationFailed):
        limit_polytope(clouds_of(library.h2(), [16, 32]), ReconstructionConfig(denominator_bound=1))


def test_snap_exceeded_reports_raw_polytope():
    c = model_spectrum(library.cp1(), 8)
    stretched = SpectrumCloud(8, c.points * 1.5)
    with pytest.raises(SnapExceeded) as info:
        limit_polytope([stretched])
    assert info.value.raw["normals"] == [(-1,), (1,)]


def test_non_delzant_snap():
    # lattice points of the weighted triangle x, y >= 0, x + 2y <= 2 (2pi-units)
    pts = [(x / 8, y / 8) for x in range(17) for y in range(9) if x + 2 * y <= 16]
    cloud = SpectrumCloud(8, np.array(pts) * TWO_PI)
    with pytest.raises(NotDelzant) as info:
        limit_polytope([cloud])
    assert "not-unimodular" in str(info.value)


def test_input_checks():
    cs = clouds_of(library.square(), [8, 4])
    with pytest.raises(ValueError):
        limit_polytope(cs)
    with pytest.raises(ValueError):
        limit_polytope(clouds_of(library.square(), [4]), ReconstructionConfig(minimum_clouds=2))
    with pytest.raises(ValueError):
        ReconstructionConfig(denominator_bound=0)


def _outcome(clouds, cfg):
    try:
        r = limit_polytope(clouds, cfg)
    except Exception as exc:  # determinism covers failures too
        return repr(exc)
    return (r.polytope, r.translation_used, r.per_k_residuals, r.rate_fit, r.constrained_C, r.certificate)


@settings(max_examples=100)
@given(delzant_polytopes(dims=(1, 2)), st.integers(0, 2 ** 32 - 1))
def test_reconstruction_is_deterministic(P, seed):
    rng = np.random.default_rng(seed)
    clouds = [inject_noise(model_spectrum(P, k), 0.5, 1, rng) for k in (4, 8)]
    cfg = ReconstructionConfig()
    assert _outcome(clouds, cfg) == _outcome([SpectrumCloud(c.k, c.points.copy()) for c in clouds], cfg)


def test_thread_count_does_not_change_result(monkeypatch):
    P = library.h2()
    clouds = clouds_of(P, [8, 16, 32], G1[2])
    monkeypatch.setenv("TORIC_SPEC_THREADS", "1")
    a = _outcome(clouds, ReconstructionConfig())
    monkeypatch.setenv("TORIC_SPEC_THREADS", "4")
    assert _outcome(clouds, ReconstructionConfig()) == a


def test_canonical_equal_ignores_translation():
    P = library.cp2()
    assert canonical_equal(P.translated((5, 7)), P)
    assert canonical(P.translated((5, 7))) == P
