"""Delzant polytopes: validation, prequantization, half-forms, construction data.

Coordinates are in units of 2*pi throughout: a stored point x stands for the
momentum value 2*pi*x, so every quantity below stays rational.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from itertools import combinations
from math import gcd

from .errors import (
    DimensionMismatch,
    NoHalfForm,
    NotDelzant,
    NotPrequantizable,
    NotPrequantized,
    NotUnimodular,
    ZeroVector,
)
from .lattice import (
    HPolytope,
    affine_rank,
    as_fraction,
    det_int,
    dot,
    enumerate_vertices,
    integer_inverse,
    integer_kernel_basis,
    is_primitive,
    is_unimodular,
    primitive_part,
    recession_ray,
    smith_invariants,
    transpose,
)


@dataclass(frozen=True, order=True)
class Facet:
    normal: tuple
    offset: Fraction

    def value(self, point):
        return dot(self.normal, point) + self.offset


@dataclass(frozen=True)
class DelzantPolytope:
    """A validated Delzant polytope; build one with ``validate_delzant``."""

    dim: int
    facets: tuple
    vertices: tuple  # ((vertex, frozenset of facet indices), ...), lex sorted
    name: str = field(default="", compare=False)

    @property
    def hpolytope(self):
        return HPolytope(self.dim, tuple((f.normal, f.offset) for f in self.facets))

    @property
    def normals(self):
        return tuple(f.normal for f in self.facets)

    @property
    def offsets(self):
        return tuple(f.offset for f in self.facets)

    @property
    def vertex_points(self):
        return tuple(v for v, _ in self.vertices)

    def contains(self, point):
        return all(f.value(point) >= 0 for f in self.facets)

    def edges(self):
        """Pairs of vertex indices joined by an edge (n-1 shared facets)."""
        n = self.dim
        out = []
        for (i, (_, a)), (j, (_, b)) in combinations(enumerate(self.vertices), 2):
            if len(a & b) == n - 1:
                out.append((i, j))
        return out

    def translated(self, t):
        t = tuple(as_fraction(x) for x in t)
        facets = tuple(Facet(f.normal, f.offset - dot(f.normal, t)) for f in self.facets)
        verts = tuple((tuple(a + b for a, b in zip(v, t)), act) for v, act in self.vertices)
        return DelzantPolytope(self.dim, facets, verts, self.name)

    def __str__(self):
        label = self.name or "polytope"
        return f"{label} (dim {self.dim}, {len(self.facets)} facets, {len(self.vertices)} vertices)"


@dataclass(frozen=True)
class Violation:
    kind: str  # non-primitive | duplicate | unbounded | empty | redundant | not-simple | not-unimodular
    facets: tuple = ()
    vertex: tuple = None
    detail: str = ""

    def __str__(self):
        where = []
        if self.facets:
            where.append("facets " + ",".join(str(i) for i in self.facets))
        if self.vertex is not None:
            where.append("vertex (" + ", ".join(str(x) for x in self.vertex) + ")")
        loc = f" [{'; '.join(where)}]" if where else ""
        return f"{self.kind}{loc}: {self.detail}"


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple

    @property
    def ok(self):
        return not self.violations

    def __str__(self):
        return "\n".join(str(v) for v in self.violations)


def validate_delzant(candidate, name=""):
    """Check the Delzant conditions; return a DelzantPolytope or a report.

    Never raises on bad geometry: every violated condition is collected so it
    can be shown at once.
    """
    n = candidate.dim
    problems = []
    hs = []
    for i, (normal, offset) in enumerate(candidate.halfspaces):
        if not any(normal):
            problems.append(Violation("zero-normal", (i,), detail="normal vector is zero"))
            continue
        if not is_primitive(normal):
            g = reduce(gcd, normal, 0)
            problems.append(Violation("non-primitive", (i,), detail=f"normal {normal} is {g} times a lattice vector"))
            normal, offset = primitive_part(normal), offset / g
        hs.append((i, normal, offset))

    seen = {}
    for i, normal, offset in hs:
        key = (normal, offset)
        if key in seen:
            problems.append(Violation("duplicate", (seen[key], i), detail="same halfspace listed twice"))
        else:
            seen[key] = i
    halfspaces = [(nm, off) for _, nm, off in hs]
    index = [i for i, _, _ in hs]

    if not halfspaces or recession_ray([h[0] for h in halfspaces], n) is not None:
        problems.append(Violation("unbounded", detail="facet normals do not positively span R^n"))
        return ValidationReport(tuple(problems))

    verts = enumerate_vertices(halfspaces, n)
    if not verts or affine_rank([v for v, _ in verts]) < n:
        problems.append(Violation("empty", detail="polytope has empty interior"))
        return ValidationReport(tuple(problems))

    for j in range(len(halfspaces)):
        on_face = [v for v, act in verts if j in act]
        if affine_rank(on_face) < n - 1:
            problems.append(Violation("redundant", (index[j],), detail="halfspace does not support a facet"))

    for v, act in verts:
        if len(act) > n:
            problems.append(Violation("not-simple", tuple(sorted(index[j] for j in act)), v,
                                      f"{len(act)} facets meet at a vertex of a {n}-polytope"))
            continue
        d = det_int([halfspaces[j][0] for j in sorted(act)])
        if abs(d) != 1:
            problems.append(Violation("not-unimodular", tuple(sorted(index[j] for j in act)), v,
                                      f"det = {d}"))

    if problems:
        return ValidationReport(tuple(problems))
    facets = tuple(Facet(nm, off) for nm, off in halfspaces)
    return DelzantPolytope(n, facets, tuple(verts), name)


def require_delzant(candidate, name=""):
    """``validate_delzant`` that raises NotDelzant instead of returning a report."""
    out = validate_delzant(candidate, name)
    if isinstance(out, ValidationReport):
        raise NotDelzant("not a Delzant polytope:\n" + str(out), out)
    return out


def from_facets(normals, offsets, name=""):
    return require_delzant(HPolytope(len(normals[0]), tuple(zip(normals, offsets))), name)


def edge_length(e):
    """Smallest l > 0 with e / l a lattice vector (2pi-units)."""
    e = tuple(as_fraction(x) for x in e)
    if not any(e):
        raise ZeroVector("edge vector is zero")
    den = reduce(lambda a, b: a * b // gcd(a, b), (x.denominator for x in e), 1)
    num = reduce(gcd, (int(x * den) for x in e), 0)
    return Fraction(num, den)


def check_prequantizable(P):
    """Translation c putting every vertex of P + c on the integer lattice.

    c is minus the lexicographically smallest vertex.  Raises
    NotPrequantizable listing every edge whose length is not an integer.
    """
    bad = []
    for i, j in P.edges():
        a, b = P.vertices[i][0], P.vertices[j][0]
        ell = edge_length(tuple(y - x for x, y in zip(a, b)))
        if ell.denominator != 1:
            bad.append((a, b, ell))
    if bad:
        lengths = ", ".join(str(e[2]) for e in bad)
        raise NotPrequantizable(f"{len(bad)} edge(s) not in the 2pi-lattice (lengths {lengths})", bad)
    v0 = P.vertices[0][0]
    c = tuple(-x for x in v0)
    for v, _ in P.vertices:
        if any((x + y).denominator != 1 for x, y in zip(v, c)):
            raise NotPrequantizable("translated vertices are not integral")
    return c


def canonical(P):
    """P translated so its lexicographically smallest vertex is the origin."""
    return P.translated(check_prequantizable(P))


def solve_parity(normals):
    """u in {0,1}^n with <X, u> odd for every X in normals, solved over GF(2).

    Raises NoHalfForm carrying the rows whose constraints add up to 0 = 1.
    """
    n = len(normals[0])
    # each row: [coefficient bitmask, rhs bit, bitmask of source rows]
    rows = []
    for fi, normal in enumerate(normals):
        mask = sum(1 << i for i, x in enumerate(normal) if x % 2)
        rows.append([mask, 1, 1 << fi])
    pivots = []
    r = 0
    for col in range(n):
        p = next((i for i in range(r, len(rows)) if rows[i][0] >> col & 1), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        for i in range(len(rows)):
            if i != r and rows[i][0] >> col & 1:
                rows[i] = [rows[i][0] ^ rows[r][0], rows[i][1] ^ rows[r][1], rows[i][2] ^ rows[r][2]]
        pivots.append(col)
        r += 1
    for mask, rhs, src in rows[r:]:
        if rhs:
            cert = tuple(i for i in range(len(normals)) if src >> i & 1)
            raise NoHalfForm(f"no half-form bundle: parity constraints of facets {cert} are inconsistent", cert)
    u = [0] * n
    for i, col in enumerate(pivots):
        u[col] = rows[i][1]
    return tuple(u)


def half_form_vector(P):
    """The parity class u_Delta: <X_f, u> odd for every facet normal."""
    return solve_parity(P.normals)


def polytope_equal(A, B):
    if A.dim != B.dim:
        raise DimensionMismatch(f"dimensions {A.dim} and {B.dim} differ")
    return sorted(A.facets) == sorted(B.facets)


@dataclass(frozen=True)
class ConstructionData:
    pi: tuple  # n x |F| integer matrix, column f is X_f
    kernel_basis: tuple  # Z-basis of ker(pi) in Z^F, one vector per entry
    lam: tuple  # offsets lambda_f, integers in 2pi-units
    base_vertex: tuple
    base_facets: tuple  # facets through base_vertex, sorted
    normals: tuple

    @property
    def n(self):
        return len(self.pi)

    @property
    def nfacets(self):
        return len(self.lam)


def construction_data(P):
    """Matrices of the Delzant construction for a prequantized polytope."""
    if any(f.offset.denominator != 1 for f in P.facets):
        raise NotPrequantized("offsets must be integral in 2pi-units; translate by check_prequantizable first")
    normals = P.normals
    pi = transpose(normals)
    kernel = integer_kernel_basis(pi)
    invariants = smith_invariants(pi)
    if len(invariants) != P.dim or any(s != 1 for s in invariants):
        raise NotDelzant(f"pi is not surjective over Z (invariants {invariants})")
    if len(kernel) != len(P.facets) - P.dim:
        raise NotDelzant("kernel lattice has the wrong rank")
    v, act = P.vertices[0]
    return ConstructionData(
        pi=pi,
        kernel_basis=kernel,
        lam=tuple(f.offset for f in P.facets),
        base_vertex=v,
        base_facets=tuple(sorted(act)),
        normals=normals,
    )


def unimodular_image(P, A, t):
    """The polytope {A xi + t : xi in P} for unimodular integer A."""
    A = tuple(tuple(int(x) for x in row) for row in A)
    if len(A) != P.dim or not is_unimodular(A):
        raise NotUnimodular("transformation matrix is not unimodular")
    t = tuple(as_fraction(x) for x in t)
    # normals transform by the inverse transpose
    inv_t = transpose(integer_inverse(A))
    hs = []
    for f in P.facets:
        normal = primitive_part(tuple(dot(row, f.normal) for row in inv_t))
        hs.append((normal, f.offset - dot(normal, t)))
    return require_delzant(HPolytope(P.dim, tuple(hs)), P.name)
