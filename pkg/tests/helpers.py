"""Shared strategies and small independent reference computations."""

from fractions import Fraction
from itertools import product

import numpy as np
from hypothesis import strategies as st

from toricspec import library
from toricspec.delzant import unimodular_image
from toricspec.quantum import TWO_PI, DeformationSeries, Polynomial

SEEDS_2D = ["cp2", "square", "h1", "h2"]


def shear_product(n, ops):
    """Product of elementary matrices: (i, j, c) adds c * row j to row i; (i, i, _) negates row i."""
    A = [[int(i == j) for j in range(n)] for i in range(n)]
    for i, j, c in ops:
        if i == j:
            A[i] = [-x for x in A[i]]
        else:
            A[i] = [a + c * b for a, b in zip(A[i], A[j])]
    return tuple(tuple(r) for r in A)


@st.composite
def unimodular_matrices(draw, n):
    ops = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1), st.integers(-2, 2)),
                        max_size=5))
    return shear_product(n, ops)


@st.composite
def delzant_polytopes(draw, dims=(1, 2)):
    """Unimodular images of library polytopes, shifted by a rational translation."""
    n = draw(st.sampled_from(dims))
    if n == 1:
        P = library.cp1()
    elif n == 2:
        P = library.get(draw(st.sampled_from(SEEDS_2D)))
    else:
        P = library.get(draw(st.sampled_from(["cp3", "cube"])))
    A = draw(unimodular_matrices(n))
    t = tuple(Fraction(draw(st.integers(-6, 6)), draw(st.sampled_from([1, 2, 3]))) for _ in range(n))
    return unimodular_image(P, A, t)


def brute_lattice(P, k, shift=None):
    """Independent reference: scan a box of k-grid points around P with plain Fractions."""
    verts = P.vertex_points
    n = P.dim
    v0 = verts[0]
    lo = [min(v[i] for v in verts) for i in range(n)]
    hi = [max(v[i] for v in verts) for i in range(n)]
    shift = shift or (0,) * n
    ranges = []
    for i in range(n):
        base = v0[i] + Fraction(shift[i])
        a = int(np.floor(float((lo[i] - base) * k))) - 1
        b = int(np.ceil(float((hi[i] - base) * k))) + 1
        ranges.append([base + Fraction(m, k) for m in range(a, b + 1)])
    return sorted(p for p in product(*ranges) if P.contains(p))


def sup_over_polytope(g, P, m=401, j=1):
    """max |g_j| over a dense grid of P (absolute units), vertices included."""
    V = np.array([[float(x) for x in v] for v in P.vertex_points])
    lo, hi = V.min(axis=0), V.max(axis=0)
    axes = [np.linspace(a, b, m) for a, b in zip(lo, hi)]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, P.dim)
    N = np.array(P.normals, dtype=float)
    lam = np.array([float(x) for x in P.offsets])
    inside = grid[(grid @ N.T + lam >= -1e-12).all(axis=1)]
    pts = np.vstack([inside, V]) * TWO_PI
    return g.sup_norm(pts, j)


def poly(*terms):
    return Polynomial(tuple((Fraction(c), ex) for c, ex in terms))


# Fixed first-order deformations (absolute units); sup over each library polytope is <= 0.2.
G1 = {
    1: DeformationSeries(1, ((poly(("1/400", (2,)), ("-1/100", (1,))),),)),
    2: DeformationSeries(2, ((poly(("1/2000", (2, 0)), ("-1/200", (0, 1))),
                              poly(("1/1000", (1, 1)))),)),
}
