from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from toricspec import library
from toricspec.bargmann import admissible_indices, bijection_check, oracle_spectrum
from toricspec.delzant import canonical, construction_data, half_form_vector
from toricspec.errors import NoHalfForm
from toricspec.quantum import quantum_dimension

from .helpers import delzant_polytopes

HALF_FORM = ["cp1", "square", "h2"]


def alphas(C, k, metaplectic=False):
    return [idx.alpha for idx in admissible_indices(C, k, metaplectic)]


def test_admissible_examples():
    C = construction_data(library.cp1())
    assert sorted(alphas(C, 3)) == [(0, 3), (1, 2), (2, 1), (3, 0)]
    got = alphas(construction_data(library.cp2()), 1)
    assert len(got) == 3 and all(sum(a) == 1 for a in got)
    assert sorted(alphas(C, 2, metaplectic=True)) == [(0, 1), (1, 0)]


def test_metaplectic_needs_half_form():
    with pytest.raises(NoHalfForm):
        admissible_indices(construction_data(library.cp2()), 2, metaplectic=True)


def test_oracle_examples():
    spec = oracle_spectrum(construction_data(library.cp1()), 3)
    assert spec.eigenvalues == [(0,), (F(1, 3),), (F(2, 3),), (1,)]
    spec = oracle_spectrum(construction_data(library.cp2()), 2)
    assert sorted(spec.eigenvalues) == sorted(
        (F(a, 2), F(b, 2)) for a in range(3) for b in range(3) if a + b <= 2)


@pytest.mark.parametrize("name", ["cp1", "cp2", "square", "h1", "h2", "cp3"])
def test_facet_equations_hold_exactly(name):
    C = construction_data(library.get(name))
    for idx, ell in oracle_spectrum(C, 3).entries:
        a = idx.shifted()
        for f, (X, lam) in enumerate(zip(C.normals, C.lam)):
            assert sum(x * y for x, y in zip(X, ell)) + lam == a[f] / 3


@pytest.mark.parametrize("name", ["cp1", "cp2", "square", "h1", "h2"])
def test_count_matches_quantum_dimension(name):
    P = library.get(name)
    C = construction_data(P)
    modes = [False, True] if name in HALF_FORM else [False]
    for metaplectic in modes:
        for k in range(1, 13):
            assert len(admissible_indices(C, k, metaplectic)) == quantum_dimension(P, k, metaplectic)


@pytest.mark.parametrize("name", ["cp1", "cp2", "square", "h1", "h2"])
def test_eigenvalues_inside_and_injective(name):
    P = library.get(name)
    C = construction_data(P)
    for k in (1, 4, 7):
        spec = oracle_spectrum(C, k)
        assert all(P.contains(ell) for ell in spec.eigenvalues)
        assert len(set(spec.eigenvalues)) == len(spec.entries)
        assert len({idx.alpha for idx, _ in spec.entries}) == len(spec.entries)
    if name in HALF_FORM:
        for k in (1, 4, 7):
            for ell in oracle_spectrum(C, k, True).eigenvalues:
                assert all(f.value(ell) > 0 for f in P.facets)


def test_divisor_twist_reported():
    spec = oracle_spectrum(construction_data(library.h2()), 2, metaplectic=True)
    C = construction_data(library.h2())
    gamma = half_form_vector(library.h2())
    assert spec.divisor_twist == tuple(
        (sum(x * g for x, g in zip(X, gamma)) - 1) // 2 for X in C.normals)


def test_bijection_examples():
    for k in range(1, 13):
        assert bijection_check(library.cp1(), k).ok
    for k in range(1, 9):
        assert bijection_check(library.cp2(), k).ok
    for k in range(1, 7):
        assert bijection_check(library.h2(), k).ok
        assert bijection_check(library.h2(), k, metaplectic=True).ok
    rep = bijection_check(library.cp1(), 5)
    assert str(rep) == "dim 6, sets identical"


def test_bijection_in_three_dimensions():
    for k in (1, 2, 3):
        assert bijection_check(library.cp3(), k).ok
        assert bijection_check(library.cube(), k, metaplectic=True).ok


@settings(max_examples=25)
@given(delzant_polytopes(dims=(2,)), st.sampled_from([1, 2, 3, 5, 8]))
def test_bijection_on_random_images(P, k):
    assert bijection_check(P, k).ok
    try:
        half_form_vector(P)
    except NoHalfForm:
        return
    assert bijection_check(P, k, metaplectic=True).ok


def test_oracle_is_independent_of_translation():
    P = library.h2().translated((F(3), F(-2)))
    assert bijection_check(P, 3).ok
    assert canonical(P) == library.h2()
