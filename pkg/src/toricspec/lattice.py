"""Exact integer/rational linear algebra and H-polytope primitives.

Vectors are tuples of ``int`` or ``Fraction``; matrices are tuples of row
tuples.  Nothing in here touches floating point except
``hausdorff_distance``.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from itertools import combinations
from math import factorial, gcd, isqrt, sqrt

import numpy as np
from scipy.spatial import cKDTree

from .errors import (
    EmptySet,
    NonSquare,
    NotFullDimensional,
    NotSimple,
    Unbounded,
    ZeroVector,
)


def as_fraction(x):
    """Coerce ints, Fractions and ``"p/q"`` strings; floats are refused."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"expected an exact rational, got {type(x).__name__}")


def dot(u, v):
    return sum((a * b for a, b in zip(u, v)), 0)


# -- integer vectors and matrices ------------------------------------------

def primitive_part(v):
    """Divide an integer vector by the gcd of its entries (sign kept)."""
    v = tuple(int(x) for x in v)
    g = reduce(gcd, v, 0)
    if g == 0:
        raise ZeroVector("primitive part of the zero vector")
    return tuple(x // g for x in v)


def is_primitive(v):
    return reduce(gcd, (int(x) for x in v), 0) == 1


def shape(M):
    rows = len(M)
    cols = len(M[0]) if rows else 0
    if any(len(r) != cols for r in M):
        raise ValueError("ragged matrix")
    return rows, cols


def transpose(M):
    return tuple(zip(*M))


def matmul(A, B):
    Bt = transpose(B)
    return tuple(tuple(dot(row, col) for col in Bt) for row in A)


def matvec(A, v):
    return tuple(dot(row, v) for row in A)


def det_int(M):
    """Exact determinant of an integer matrix by Bareiss elimination."""
    n, m = shape(M)
    if n != m:
        raise NonSquare(f"{n}x{m} matrix has no determinant")
    if n == 0:
        return 1
    a = [[int(x) for x in row] for row in M]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def is_unimodular(M):
    return abs(det_int(M)) == 1


def det_frac(M):
    """Determinant over the rationals (Gaussian elimination)."""
    n, m = shape(M)
    if n != m:
        raise NonSquare(f"{n}x{m} matrix has no determinant")
    a = [[as_fraction(x) if not isinstance(x, Fraction) else x for x in row] for row in M]
    d = Fraction(1)
    for k in range(n):
        p = next((i for i in range(k, n) if a[i][k] != 0), None)
        if p is None:
            return Fraction(0)
        if p != k:
            a[k], a[p] = a[p], a[k]
            d = -d
        d *= a[k][k]
        for i in range(k + 1, n):
            f = a[i][k] / a[k][k]
            if f:
                for j in range(k, n):
                    a[i][j] -= f * a[k][j]
    return d


def solve(A, b):
    """Solve the square system A x = b exactly; None when A is singular."""
    n = len(A)
    a = [[Fraction(x) for x in row] + [Fraction(y)] for row, y in zip(A, b)]
    for k in range(n):
        p = next((i for i in range(k, n) if a[i][k] != 0), None)
        if p is None:
            return None
        a[k], a[p] = a[p], a[k]
        piv = a[k][k]
        for i in range(n):
            if i != k and a[i][k] != 0:
                f = a[i][k] / piv
                for j in range(k, n + 1):
                    a[i][j] -= f * a[k][j]
    return tuple(a[i][n] / a[i][i] for i in range(n))


def rank(M):
    if not M:
        return 0
    a = [[Fraction(x) for x in row] for row in M]
    rows, cols = len(a), len(a[0])
    r = 0
    for c in range(cols):
        p = next((i for i in range(r, rows) if a[i][c] != 0), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        for i in range(r + 1, rows):
            f = a[i][c] / a[r][c]
            if f:
                for j in range(c, cols):
                    a[i][j] -= f * a[r][j]
        r += 1
        if r == rows:
            break
    return r


def integer_inverse(A):
    """Inverse of a unimodular integer matrix, as an integer matrix."""
    n, m = shape(A)
    if n != m:
        raise NonSquare("inverse of a non-square matrix")
    cols = []
    for j in range(n):
        e = [0] * n
        e[j] = 1
        x = solve(A, e)
        if x is None:
            raise ZeroDivisionError("singular matrix")
        cols.append(x)
    inv = transpose(cols)
    if any(x.denominator != 1 for row in inv for x in row):
        raise ValueError("matrix inverse is not integral")
    return tuple(tuple(int(x) for x in row) for row in inv)


def hermite_normal_form(rows):
    """Row-style reduced Hermite normal form; zero rows dropped.

    Pivots are positive and entries above each pivot are reduced into
    ``[0, pivot)``.
    """
    a = [list(int(x) for x in r) for r in rows]
    if not a:
        return ()
    ncols = len(a[0])
    piv_row = 0
    pivots = []
    for c in range(ncols):
        for i in range(piv_row + 1, len(a)):
            while a[i][c] != 0:
                q = a[piv_row][c] // a[i][c]
                a[piv_row] = [x - q * y for x, y in zip(a[piv_row], a[i])]
                a[piv_row], a[i] = a[i], a[piv_row]
        if piv_row < len(a) and a[piv_row][c] != 0:
            if a[piv_row][c] < 0:
                a[piv_row] = [-x for x in a[piv_row]]
            p = a[piv_row][c]
            for i in range(piv_row):
                q = a[i][c] // p
                if q:
                    a[i] = [x - q * y for x, y in zip(a[i], a[piv_row])]
            pivots.append(c)
            piv_row += 1
            if piv_row == len(a):
                break
    return tuple(tuple(r) for r in a[:piv_row])


def integer_kernel_basis(M):
    """Z-basis of {x in Z^cols : M x = 0}, one basis vector per entry.

    Row-reduces [M^T | I] with unimodular integer moves; the identity part of
    the rows whose M^T part vanishes spans the saturated kernel lattice.  The
    basis is returned in reduced Hermite form so it is canonical.
    """
    rows_m, cols = shape(M)
    if cols == 0:
        return ()
    mt = transpose(M) if rows_m else tuple(() for _ in range(cols))
    a = [list(mt[i]) + [1 if j == i else 0 for j in range(cols)] for i in range(cols)]
    piv = 0
    for c in range(rows_m):
        for i in range(piv + 1, cols):
            while a[i][c] != 0:
                q = a[piv][c] // a[i][c]
                a[piv] = [x - q * y for x, y in zip(a[piv], a[i])]
                a[piv], a[i] = a[i], a[piv]
        if piv < cols and a[piv][c] != 0:
            piv += 1
            if piv == cols:
                break
    kernel = [r[rows_m:] for r in a[piv:]]
    return hermite_normal_form(kernel)


def smith_invariants(M):
    """Invariant factors of an integer matrix via determinantal divisors.

    Fine at the sizes used here (at most a few hundred small minors).
    """
    rows, cols = shape(M)
    out = []
    prev = 1
    for j in range(1, min(rows, cols) + 1):
        d = 0
        for ri in combinations(range(rows), j):
            for ci in combinations(range(cols), j):
                d = gcd(d, det_int([[M[r][c] for c in ci] for r in ri]))
                if d == 1:
                    break
            if d == 1:
                break
        if d == 0:
            break
        out.append(d // prev)
        prev = d
    return tuple(out)


# -- H-polytopes -----------------------------------------------------------

@dataclass(frozen=True)
class HPolytope:
    """{xi : <normal, xi> + offset >= 0 for every halfspace}."""

    dim: int
    halfspaces: tuple

    def __post_init__(self):
        hs = []
        for normal, offset in self.halfspaces:
            normal = tuple(int(x) for x in normal)
            if len(normal) != self.dim:
                raise ValueError(f"normal {normal} has wrong dimension")
            hs.append((normal, as_fraction(offset)))
        if self.dim < 1:
            raise ValueError("dimension must be >= 1")
        object.__setattr__(self, "halfspaces", tuple(hs))

    @property
    def normals(self):
        return tuple(h[0] for h in self.halfspaces)

    @property
    def offsets(self):
        return tuple(h[1] for h in self.halfspaces)

    def values(self, point):
        return tuple(dot(n, point) + o for n, o in self.halfspaces)

    def contains(self, point):
        return all(v >= 0 for v in self.values(point))

    def translated(self, t):
        """The polytope shifted by the vector t."""
        return HPolytope(self.dim, tuple((n, o - dot(n, t)) for n, o in self.halfspaces))


def _cofactor_direction(rows, n):
    """Generator of the kernel of an (n-1) x n integer matrix of rank n-1."""
    d = []
    for j in range(n):
        minor = [[r[c] for c in range(n) if c != j] for r in rows]
        d.append((-1) ** j * det_int(minor))
    return tuple(d)


def recession_ray(normals, n):
    """A nonzero d with <X, d> >= 0 for all normals, or None if bounded."""
    if rank(normals) < n:
        # the cone contains a line
        return _nullspace_vector(normals, n)
    for sub in combinations(normals, n - 1):
        if n > 1 and rank(sub) < n - 1:
            continue
        d = _cofactor_direction(sub, n) if n > 1 else (1,)
        if not any(d):
            continue
        vals = [dot(x, d) for x in normals]
        if all(v >= 0 for v in vals):
            return d
        if all(v <= 0 for v in vals):
            return tuple(-x for x in d)
    return None


def _nullspace_vector(rows, n):
    a = [[Fraction(x) for x in r] for r in rows]
    pivots = []
    r = 0
    for c in range(n):
        p = next((i for i in range(r, len(a)) if a[i][c] != 0), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        a[r] = [x / a[r][c] for x in a[r]]
        for i in range(len(a)):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
    free = next(c for c in range(n) if c not in pivots)
    v = [Fraction(0)] * n
    v[free] = Fraction(1)
    for i, c in enumerate(pivots):
        v[c] = -a[i][free]
    den = reduce(lambda x, y: x * y // gcd(x, y), (x.denominator for x in v), 1)
    return tuple(int(x * den) for x in v)


def enumerate_vertices(halfspaces, n):
    """All vertices with their full active sets; no simplicity assumed.

    Returns a lexicographically sorted list of (vertex, frozenset(active)).
    """
    found = {}
    for idx in combinations(range(len(halfspaces)), n):
        A = [halfspaces[i][0] for i in idx]
        b = [-halfspaces[i][1] for i in idx]
        x = solve(A, b)
        if x is None or x in found:
            continue
        vals = [dot(nm, x) + o for nm, o in halfspaces]
        if all(v >= 0 for v in vals):
            found[x] = frozenset(i for i, v in enumerate(vals) if v == 0)
    return sorted(found.items())


def affine_rank(points):
    if not points:
        return -1
    p0 = points[0]
    return rank([tuple(a - b for a, b in zip(p, p0)) for p in points[1:]]) if len(points) > 1 else 0


def vertex_enumeration(P):
    """Exact vertices of a bounded, full-dimensional, simple H-polytope.

    Returns a sorted list of (vertex, frozenset of active halfspace indices).
    """
    n = P.dim
    if not P.halfspaces or recession_ray(P.normals, n) is not None:
        raise Unbounded("polytope is unbounded")
    verts = enumerate_vertices(P.halfspaces, n)
    if not verts:
        raise NotFullDimensional("polytope is empty")
    if affine_rank([v for v, _ in verts]) < n:
        raise NotFullDimensional("polytope has empty interior")
    bad = [v for v, act in verts if len(act) > n]
    if bad:
        raise NotSimple(f"{len(bad)} vertex/vertices lie on more than {n} facets", bad)
    return verts


# -- lattice points --------------------------------------------------------

def _ceil_div(a, b):
    return -((-a) // b)


def _integer_constraints(P, scale, offset):
    """Rewrite membership of o + s z as integer constraints <X, z> >= b."""
    out = []
    for normal, lam in P.halfspaces:
        c = -(dot(normal, offset) + lam) / scale
        out.append((normal, _ceil_div(c.numerator, c.denominator)))
    return out


def _bounding_box(P, scale, offset):
    verts = [v for v, _ in vertex_enumeration(P)]
    lo, hi = [], []
    for i in range(P.dim):
        vmin = min(v[i] for v in verts)
        vmax = max(v[i] for v in verts)
        a = (vmin - offset[i]) / scale
        b = (vmax - offset[i]) / scale
        lo.append(_ceil_div(a.numerator, a.denominator))
        hi.append(b.numerator // b.denominator)
    return lo, hi


def _scan(P, scale, offset):
    """Yield (prefix, first, last) runs of integer points z in the box."""
    scale = as_fraction(scale)
    if scale <= 0:
        raise ValueError("scale must be positive")
    offset = tuple(as_fraction(x) for x in offset)
    n = P.dim
    cons = _integer_constraints(P, scale, offset)
    lo, hi = _bounding_box(P, scale, offset)

    def rec(prefix, partial):
        d = len(prefix)
        if d == n - 1:
            first, last = lo[d], hi[d]
            for (normal, b), s in zip(cons, partial):
                a = normal[d]
                r = b - s
                if a > 0:
                    first = max(first, _ceil_div(r, a))
                elif a < 0:
                    last = min(last, (-r) // (-a))
                elif r > 0:
                    return
            if first <= last:
                yield prefix, first, last
            return
        for z in range(lo[d], hi[d] + 1):
            yield from rec(prefix + (z,), [s + nm[d] * z for (nm, _), s in zip(cons, partial)])

    yield from rec((), [0] * len(cons))


def lattice_points(P, scale, offset):
    """(offset + scale * Z^n) intersected with P, lexicographically sorted."""
    scale = as_fraction(scale)
    offset = tuple(as_fraction(x) for x in offset)
    out = []
    for prefix, first, last in _scan(P, scale, offset):
        head = tuple(o + scale * z for o, z in zip(offset, prefix))
        o_last = offset[-1]
        for z in range(first, last + 1):
            out.append(head + (o_last + scale * z,))
    return out


def count_lattice_points(P, scale, offset):
    return sum(last - first + 1 for _, first, last in _scan(P, scale, offset))


# -- Hausdorff distance ----------------------------------------------------

def _as_points(A):
    pts = []
    for p in A:
        if isinstance(p, (int, float, Fraction, np.integer, np.floating)):
            p = (p,)
        pts.append(tuple(p))
    return pts


def _is_exact(pts):
    return all(isinstance(x, (int, Fraction)) and not isinstance(x, bool) for p in pts for x in p)


def _directed_sq_exact(A, B):
    """max_a min_b |a-b|^2 for integer point lists."""
    big = max(abs(x) for p in A + B for x in p)
    if big < 2**20:
        a = np.array(A, dtype=np.int64)
        b = np.array(B, dtype=np.int64)
        worst = 0
        for start in range(0, len(a), 512):
            chunk = a[start:start + 512]
            d = ((chunk[:, None, :] - b[None, :, :]) ** 2).sum(axis=2)
            worst = max(worst, int(d.min(axis=1).max()))
        return worst
    return max(min(sum((x - y) ** 2 for x, y in zip(p, q)) for q in B) for p in A)


def hausdorff_distance(A, B):
    """Euclidean Hausdorff distance between two finite point sets.

    Exact rational inputs are compared exactly; the square root of the exact
    squared distance is the only rounding step.
    """
    A, B = _as_points(A), _as_points(B)
    if not A or not B:
        raise EmptySet("Hausdorff distance of an empty set")
    if len({len(p) for p in A + B}) != 1:
        raise ValueError("points of different dimensions")
    if _is_exact(A) and _is_exact(B):
        fa = [tuple(Fraction(x) for x in p) for p in A]
        fb = [tuple(Fraction(x) for x in p) for p in B]
        den = reduce(lambda x, y: x * y // gcd(x, y), (x.denominator for p in fa + fb for x in p), 1)
        ia = [tuple(int(x * den) for x in p) for p in fa]
        ib = [tuple(int(x * den) for x in p) for p in fb]
        sq = max(_directed_sq_exact(ia, ib), _directed_sq_exact(ib, ia))
        r = isqrt(sq)
        if r * r == sq:
            return float(Fraction(r, den))
        return sqrt(Fraction(sq, den * den))
    a = np.asarray(A, dtype=float)
    b = np.asarray(B, dtype=float)
    d_ab = cKDTree(b).query(a)[0].max()
    d_ba = cKDTree(a).query(b)[0].max()
    return float(max(d_ab, d_ba))


# -- volume ----------------------------------------------------------------

def polytope_volume(P):
    """Exact volume by a pulling triangulation over the face lattice."""
    verts = vertex_enumeration(P)
    n = P.dim
    nf = len(P.halfspaces)
    memo = {}

    def triangulate(S):
        if S in memo:
            return memo[S]
        face = [(v, act) for v, act in verts if S <= act]
        if n - len(S) == 0:
            memo[S] = [[face[0][0]]]
            return memo[S]
        apex, apex_act = face[0]
        simplices = []
        for f in range(nf):
            if f in S or f in apex_act:
                continue
            if not any(f in act for _, act in face):
                continue
            for simp in triangulate(S | {f}):
                simplices.append([apex] + simp)
        memo[S] = simplices
        return simplices

    total = Fraction(0)
    for simp in triangulate(frozenset()):
        v0 = simp[0]
        total += abs(det_frac([[a - b for a, b in zip(v, v0)] for v in simp[1:]]))
    return total / factorial(n)
