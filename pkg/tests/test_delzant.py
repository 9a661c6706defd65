from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from toricspec import library
from toricspec.delzant import (
    ValidationReport,
    canonical,
    check_prequantizable,
    construction_data,
    edge_length,
    from_facets,
    half_form_vector,
    polytope_equal,
    unimodular_image,
    validate_delzant,
)
from toricspec.errors import (
    DimensionMismatch,
    NoHalfForm,
    NotDelzant,
    NotPrequantizable,
    NotPrequantized,
    NotUnimodular,
    ZeroVector,
)
from toricspec.lattice import HPolytope, dot, matmul, smith_invariants

from .helpers import delzant_polytopes, unimodular_matrices


def H(normals, offsets):
    return HPolytope(len(normals[0]), tuple((tuple(n), F(o)) for n, o in zip(normals, offsets)))


def kinds(report):
    return [v.kind for v in report.violations]


def test_square_is_delzant():
    P = validate_delzant(H([(1, 0), (0, 1), (-1, 0), (0, -1)], [0, 0, 1, 1]))
    assert not isinstance(P, ValidationReport)
    assert len(P.vertices) == 4


def test_weighted_triangle_names_bad_vertex():
    rep = validate_delzant(H([(1, 0), (0, 1), (-1, -2)], [0, 0, 2]))
    assert isinstance(rep, ValidationReport)
    (v,) = rep.violations
    assert v.kind == "not-unimodular"
    assert v.facets == (0, 2)  # first and third facet, 0-based
    assert v.vertex == (0, 1)
    assert "det = -2" in str(v)


def test_interval_is_delzant():
    assert validate_delzant(H([(1,), (-1,)], [0, 1])).dim == 1


def test_every_violation_is_reported():
    rep = validate_delzant(H([(2, 0), (0, 1), (-1, 0), (0, -1), (0, -1)], [0, 0, 1, 1, 1]))
    assert "non-primitive" in kinds(rep)
    assert "duplicate" in kinds(rep)


@pytest.mark.parametrize("normals, offsets, kind", [
    ([(0, 0), (1, 0), (0, 1), (-1, -1)], [1, 0, 0, 1], "zero-normal"),
    ([(1, 0), (0, 1)], [0, 0], "unbounded"),
    ([(1,), (-1,)], [0, -1], "empty"),
    ([(1,), (-1,)], [0, 0], "empty"),
    ([(1, 0), (0, 1), (-1, 0), (0, -1), (-1, 0)], [0, 0, 1, 1, 2], "redundant"),
    ([(0, 0, 1), (-1, 0, -1), (1, 0, -1), (0, -1, -1), (0, 1, -1)], [1, 1, 1, 1, 1], "not-simple"),
])
def test_violation_kinds(normals, offsets, kind):
    rep = validate_delzant(H(normals, offsets))
    assert isinstance(rep, ValidationReport)
    assert kind in kinds(rep)


def test_require_raises_not_delzant():
    with pytest.raises(NotDelzant) as info:
        from_facets([(1, 0), (0, 1), (-1, -2)], [0, 0, 2])
    assert not info.value.report.ok


def test_edge_length_examples():
    assert edge_length((2, 0)) == 2
    assert edge_length((1, 1)) == 1
    assert edge_length((F(1, 2), 0)) == F(1, 2)
    assert edge_length((-3, 6)) == 3
    with pytest.raises(ZeroVector):
        edge_length((0, 0))


def test_prequantization_examples():
    assert check_prequantizable(library.cp1()) == (0,)
    tri = from_facets([(1, 0), (0, 1), (-1, -1)], [0, 0, 3])
    assert check_prequantizable(tri) == (0, 0)


def test_interval_of_non_lattice_length():
    # stand-in for [-1, 1] in absolute units: edge length 1/pi is not representable, 1/3 plays its role
    P = from_facets([(1,), (-1,)], [F(1, 6), F(1, 6)])
    with pytest.raises(NotPrequantizable) as info:
        check_prequantizable(P)
    ((a, b, length),) = info.value.edges
    assert length == F(1, 3)


def test_translation_puts_vertices_on_lattice():
    P = from_facets([(1, 0), (0, 1), (-1, -1)], [F(1, 2), F(-1, 3), F(11, 6)])
    c = check_prequantizable(P)
    assert c == (F(1, 2), F(-1, 3))
    assert all(x.denominator == 1 for v in canonical(P).vertex_points for x in v)


@given(delzant_polytopes(dims=(1, 2, 3)))
def test_prequantized_vertices_integral(P):
    c = check_prequantizable(P)
    Q = P.translated(c)
    assert all(x.denominator == 1 for v in Q.vertex_points for x in v)
    assert min(Q.vertex_points) == (0,) * P.dim


def test_half_form_examples():
    assert half_form_vector(library.cp1()) == (1,)
    with pytest.raises(NoHalfForm) as info:
        half_form_vector(library.cp2())
    assert info.value.certificate == (0, 1, 2)
    assert half_form_vector(library.square()) == (1, 1)
    with pytest.raises(NoHalfForm):
        half_form_vector(library.h1())
    assert half_form_vector(library.h2()) == (1, 1)


def _odd_everywhere(normals, u):
    return all(dot(X, u) % 2 == 1 for X in normals)


@given(delzant_polytopes(dims=(1, 2, 3)), st.randoms(use_true_random=False))
def test_half_form_reorder_invariant(P, rnd):
    facets = list(P.facets)
    rnd.shuffle(facets)
    Q = from_facets([f.normal for f in facets], [f.offset for f in facets])
    try:
        u = half_form_vector(P)
    except NoHalfForm:
        with pytest.raises(NoHalfForm):
            half_form_vector(Q)
        return
    assert _odd_everywhere(Q.normals, half_form_vector(Q))
    assert _odd_everywhere(Q.normals, u)


@given(delzant_polytopes(dims=(1, 2, 3)), st.data())
def test_half_form_under_unimodular_image(P, data):
    A = data.draw(unimodular_matrices(P.dim))
    Q = unimodular_image(P, A, (0,) * P.dim)
    try:
        half_form_vector(P)
        exists = True
    except NoHalfForm:
        exists = False
    if exists:
        assert _odd_everywhere(Q.normals, half_form_vector(Q))
    else:
        with pytest.raises(NoHalfForm):
            half_form_vector(Q)


def test_polytope_equal_examples():
    S = library.square()
    assert polytope_equal(S, S)
    rev = from_facets(list(reversed(S.normals)), list(reversed(S.offsets)))
    assert polytope_equal(S, rev)
    assert not polytope_equal(S, S.translated((1, 0)))
    with pytest.raises(DimensionMismatch):
        polytope_equal(library.cp1(), library.cp2())


@given(st.lists(delzant_polytopes(dims=(2,)), min_size=3, max_size=3))
def test_polytope_equal_is_equivalence(Ps):
    A, B, C = Ps
    assert polytope_equal(A, A)
    assert polytope_equal(A, B) == polytope_equal(B, A)
    if polytope_equal(A, B) and polytope_equal(B, C):
        assert polytope_equal(A, C)


def test_construction_data_examples():
    C = construction_data(library.cp1())
    assert C.pi == ((1, -1),)
    assert C.kernel_basis == ((1, 1),)
    assert C.lam == (0, 1)
    C = construction_data(library.cp2())
    assert C.pi == ((1, 0, -1), (0, 1, -1))
    assert C.kernel_basis == ((1, 1, 1),)
    C = construction_data(library.square())
    assert C.pi == ((1, 0, -1, 0), (0, 1, 0, -1))
    assert set(C.kernel_basis) == {(1, 0, 1, 0), (0, 1, 0, 1)}


def test_construction_needs_integral_offsets():
    with pytest.raises(NotPrequantized):
        construction_data(library.cp1().translated((F(1, 2),)))


@pytest.mark.parametrize("name", ["cp1", "cp2", "square", "h1", "h2", "cp3", "cube"])
def test_construction_invariants(name):
    C = construction_data(library.get(name))
    K = tuple(zip(*C.kernel_basis))
    assert all(x == 0 for row in matmul(C.pi, K) for x in row)
    assert smith_invariants(C.pi) == (1,) * C.n
    assert len(C.kernel_basis) == C.nfacets - C.n


def test_unimodular_image_examples():
    S = library.square()
    assert polytope_equal(unimodular_image(S, ((1, 0), (0, 1)), (0, 0)), S)
    sheared = unimodular_image(S, ((1, 1), (0, 1)), (0, 0))
    assert sorted(sheared.vertex_points) == [(0, 0), (1, 0), (1, 1), (2, 1)]
    I = library.cp1()
    assert polytope_equal(unimodular_image(I, ((-1,),), (1,)), I)
    with pytest.raises(NotUnimodular):
        unimodular_image(S, ((2, 0), (0, 1)), (0, 0))


@given(delzant_polytopes(dims=(1, 2, 3)), st.data())
def test_validation_stable_under_unimodular_image(P, data):
    A = data.draw(unimodular_matrices(P.dim))
    t = tuple(data.draw(st.integers(-5, 5)) for _ in range(P.dim))
    Q = validate_delzant(unimodular_image(P, A, t).hpolytope)
    assert not isinstance(Q, ValidationReport)
    assert len(Q.vertices) == len(P.vertices)
