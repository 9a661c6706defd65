"""Forward joint spectra of the quantum toric model.

Lattice computations run in exact 2pi-units; a ``SpectrumCloud`` holds
floating-point points in absolute units (2pi-unit rationals times 2pi).
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

import numpy as np

from .delzant import check_prequantizable, half_form_vector
from .errors import OutOfPolytope
from .lattice import as_fraction, count_lattice_points, lattice_points, polytope_volume

TWO_PI = 2 * math.pi


@dataclass
class SpectrumCloud:
    k: int
    points: np.ndarray  # shape (N, n), absolute units
    exact: bool = True
    source: str = ""
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 1:
            raise ValueError(f"semiclassical index must be a positive integer, got {self.k}")
        self.k = int(self.k)
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        self.points = pts

    @property
    def dim(self):
        return self.points.shape[1]

    def __len__(self):
        return len(self.points)


def to_absolute(points):
    """2pi-unit rationals -> float array in absolute units."""
    return np.array([[float(x) * TWO_PI for x in p] for p in points], dtype=float).reshape(len(points), -1)


def model_lattice(P, k):
    """Exact (v + Z^n / k) intersected with P in 2pi-units, v a vertex."""
    _check_k(k)
    check_prequantizable(P)
    v = P.vertices[0][0]
    return lattice_points(P.hpolytope, Fraction(1, k), v)


def metaplectic_lattice(P, k):
    """Exact (v + (Z^n + u/2) / k) intersected with P in 2pi-units."""
    _check_k(k)
    check_prequantizable(P)
    u = half_form_vector(P)
    v = P.vertices[0][0]
    offset = tuple(x + Fraction(ui, 2 * k) for x, ui in zip(v, u))
    return lattice_points(P.hpolytope, Fraction(1, k), offset)


def model_spectrum(P, k):
    pts = model_lattice(P, k)
    return SpectrumCloud(k, to_absolute(pts), True, f"model:{P.name or 'polytope'}")


def metaplectic_spectrum(P, k):
    pts = metaplectic_lattice(P, k)
    return SpectrumCloud(k, to_absolute(pts), True, f"metaplectic:{P.name or 'polytope'}")


def quantum_dimension(P, k, metaplectic=False):
    """Number of joint eigenvalues, i.e. the dimension of the quantum space."""
    _check_k(k)
    check_prequantizable(P)
    v = P.vertices[0][0]
    if metaplectic:
        u = half_form_vector(P)
        v = tuple(x + Fraction(ui, 2 * k) for x, ui in zip(v, u))
    return count_lattice_points(P.hpolytope, Fraction(1, k), v)


def _check_k(k):
    if int(k) != k or k < 1:
        raise ValueError(f"k must be a positive integer, got {k}")


# -- deformations ----------------------------------------------------------

@dataclass(frozen=True)
class Polynomial:
    """Sum of coeff * prod(x_i ** e_i); coefficients rational."""

    terms: tuple  # ((coeff, exponents), ...)

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple((as_fraction(c), tuple(int(e) for e in ex))
                                                for c, ex in self.terms))

    @classmethod
    def constant(cls, c, n):
        return cls(((c, (0,) * n),))

    @property
    def degree(self):
        return max((sum(ex) for _, ex in self.terms), default=0)

    def __call__(self, x):
        """Exact on a tuple of rationals; vectorised on an (N, n) float array."""
        if isinstance(x, np.ndarray):
            out = np.zeros(len(x))
            for c, ex in self.terms:
                term = np.full(len(x), float(c))
                for i, e in enumerate(ex):
                    if e:
                        term = term * x[:, i] ** e
                out += term
            return out
        total = 0
        for c, ex in self.terms:
            term = c
            for xi, e in zip(x, ex):
                term *= xi ** e
            total += term
        return total

    def abs_bound(self, box):
        """Upper bound of |p| on a box given as [(lo, hi), ...] (float bounds allowed)."""
        total = 0.0
        for c, ex in self.terms:
            term = abs(float(c))
            for (lo, hi), e in zip(box, ex):
                term *= max(abs(float(lo)), abs(float(hi))) ** e
            total += term
        return total


@dataclass(frozen=True)
class DeformationSeries:
    """g(.; k) = Id + sum_j k^-j g_j with polynomial g_j acting on absolute units."""

    dim: int
    orders: tuple = ()  # orders[j-1] is g_j: a tuple of `dim` Polynomials

    def __post_init__(self):
        for g in self.orders:
            if len(g) != self.dim:
                raise ValueError("each coefficient map needs one polynomial per coordinate")

    @property
    def order(self):
        return len(self.orders)

    def term(self, j, x):
        """g_j evaluated on an (N, n) array."""
        return np.column_stack([p(x) for p in self.orders[j - 1]])

    def __call__(self, x, k):
        x = np.asarray(x, dtype=float)
        out = x.copy()
        for j in range(1, self.order + 1):
            out = out + self.term(j, x) / float(k) ** j
        return out

    def sup_bound(self, box, j=1):
        """Rigorous bound on the Euclidean norm of g_j over a box."""
        comps = [p.abs_bound(box) for p in self.orders[j - 1]]
        return math.sqrt(sum(float(c) ** 2 for c in comps))

    def sup_norm(self, points, j=1):
        """max |g_j| over the given (N, n) sample of points."""
        if not self.orders:
            return 0.0
        vals = self.term(j, np.asarray(points, dtype=float))
        return float(np.sqrt((vals ** 2).sum(axis=1)).max())


def apply_deformation(cloud, g):
    """Replace every point x by x + sum_j k^-j g_j(x)."""
    if g.order == 0:
        return SpectrumCloud(cloud.k, cloud.points.copy(), cloud.exact, cloud.source, dict(cloud.metadata))
    if g.dim != cloud.dim:
        raise ValueError(f"deformation acts on R^{g.dim}, cloud lives in R^{cloud.dim}")
    pts = g(cloud.points, cloud.k)
    meta = dict(cloud.metadata)
    collisions = len(pts) - len(np.unique(pts, axis=0))
    if collisions:
        meta["collisions"] = int(collisions)
    meta["deformation_order"] = g.order
    return SpectrumCloud(cloud.k, pts, False, cloud.source + "+deformed", meta)


def inject_noise(cloud, C, N, rng):
    """Add noise uniform in the ball of radius C * k^-N (absolute units)."""
    radius = C * float(cloud.k) ** (-N)
    n = cloud.dim
    direction = rng.standard_normal((len(cloud), n))
    direction /= np.linalg.norm(direction, axis=1, keepdims=True)
    r = radius * rng.random(len(cloud)) ** (1.0 / n)
    meta = dict(cloud.metadata, noise_radius=radius)
    return SpectrumCloud(cloud.k, cloud.points + direction * r[:, None], False, cloud.source + "+noise", meta)


# -- Weyl law --------------------------------------------------------------

@dataclass(frozen=True)
class WeylRow:
    k: int
    count: int
    leading: float
    relative_gap: float


def weyl_report(P, k, metaplectic=False):
    """Lattice count against the leading Weyl term (k/2pi)^n vol(Delta).

    In 2pi-units the leading term is k^n times the volume of the stored
    polytope.
    """
    count = quantum_dimension(P, k, metaplectic)
    n = P.dim
    leading = Fraction(k) ** n * polytope_volume(P.hpolytope)
    gap = abs(count - leading) / Fraction(k) ** (n - 1)
    return WeylRow(k, count, float(leading), float(gap))


# -- torus averages --------------------------------------------------------

def orbit_average(f, E, P=None, flow="torus", n_grid=256):
    """Average f(angles, E) over one circle flow or over the whole torus.

    Angles live in [0, 1)^n.  ``flow`` is a coordinate index for a single
    Hamiltonian flow, or ``"torus"`` for the full tensor grid (n_grid^n
    evaluations).  Uniform grids integrate trigonometric polynomials of
    degree < n_grid exactly.
    """
    E = np.asarray(E, dtype=float).reshape(-1)
    n = len(E)
    if P is not None:
        xi = E / TWO_PI
        tol = 1e-12 * max(1.0, float(np.abs(xi).max()))
        if any(sum(a * b for a, b in zip(fc.normal, xi)) + float(fc.offset) < -tol for fc in P.facets):
            raise OutOfPolytope(f"point {tuple(E)} is not in the polytope")
    grid = np.arange(n_grid) / n_grid
    if flow == "torus":
        total = 0.0
        for idx in product(range(n_grid), repeat=n):
            total += f(grid[list(idx)], E)
        return total / n_grid ** n
    i = int(flow)
    if not 0 <= i < n:
        raise ValueError(f"flow index {i} out of range for dimension {n}")
    total = 0.0
    angles = np.zeros(n)
    for t in grid:
        angles[i] = t
        total += f(angles.copy(), E)
    return total / n_grid
