"""Joint spectrum recomputed on the Fock side of the Delzant construction.

A monomial z^alpha in the Bargmann space of C^F is an eigenvector of the
Kostant-Souriau operators with eigenvalue <X, alpha/k - lambda> (2pi-units,
plus alpha -> alpha + 1/2 with the half-form twist).  The reduced space keeps
the monomials annihilated by the kernel directions; solving for the torus
eigenvalue ell recovers the joint spectrum without ever enumerating lattice
points of the polytope.
"""

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .delzant import check_prequantizable, construction_data, solve_parity
from .errors import InconsistentSystem
from .lattice import dot, enumerate_vertices, integer_inverse, matvec
from .quantum import metaplectic_lattice, model_lattice


@dataclass(frozen=True, order=True)
class FockIndex:
    alpha: tuple
    half_shifted: bool = False

    def shifted(self):
        """alpha (+ 1/2 per entry when half-shifted) as Fractions."""
        h = Fraction(1, 2) if self.half_shifted else Fraction(0)
        return tuple(a + h for a in self.alpha)


@dataclass(frozen=True)
class OracleSpectrum:
    k: int
    entries: tuple  # ((FockIndex, ell), ...) sorted by ell, ell in 2pi-units
    metaplectic: bool = False
    divisor_twist: tuple = None  # d with pi^* gamma = 1 + 2d
    exact: bool = True

    @property
    def eigenvalues(self):
        return [ell for _, ell in self.entries]


def _alpha_box(C, k, metaplectic):
    verts = enumerate_vertices(tuple(zip(C.normals, C.lam)), C.n)
    bounds = []
    for normal, lam in zip(C.normals, C.lam):
        m = max(dot(normal, v) + lam for v, _ in verts)
        top = k * m - (Fraction(1, 2) if metaplectic else 0)
        bounds.append(top.numerator // top.denominator)
    return bounds


def _twist(C):
    gamma = solve_parity(C.normals)
    d = []
    for normal in C.normals:
        odd = dot(normal, gamma)
        d.append((odd - 1) // 2)
    return gamma, tuple(d)


def admissible_indices(C, k, metaplectic=False):
    """All alpha in N^F whose monomial survives reduction, by brute force.

    The box 0 <= alpha_f <= k * max_Delta(<X_f, .> + lambda_f) is scanned in
    full and the kernel constraints <Y, alpha (+1/2) - k lambda> = 0 are
    tested in integer arithmetic.
    """
    if metaplectic:
        _twist(C)
    bounds = _alpha_box(C, k, metaplectic)
    if any(b < 0 for b in bounds):
        return []
    Y = np.array(C.kernel_basis, dtype=np.int64).reshape(len(C.kernel_basis), C.nfacets)
    lam = [int(x) for x in C.lam]
    if metaplectic:
        # 2 <Y, alpha> + <Y, 1> = 2k <Y, lambda>
        target = np.array([2 * k * dot(y, lam) - sum(y) for y in C.kernel_basis], dtype=np.int64)
        weight = 2
    else:
        target = np.array([k * dot(y, lam) for y in C.kernel_basis], dtype=np.int64)
        weight = 1
    out = []
    rest = [b + 1 for b in bounds[1:]]
    grid = np.indices(rest).reshape(len(rest), -1).T if rest else np.zeros((1, 0), dtype=np.int64)
    for a0 in range(bounds[0] + 1):
        alphas = np.column_stack([np.full(len(grid), a0, dtype=np.int64), grid])
        if len(Y):
            ok = np.all(weight * (alphas @ Y.T) == target, axis=1)
            alphas = alphas[ok]
        out.extend(FockIndex(tuple(int(x) for x in a), metaplectic) for a in alphas)
    return sorted(out)


def oracle_spectrum(C, k, metaplectic=False):
    """Eigenvalue ell for each admissible alpha, with <X_f, ell> + lambda_f = alpha_f / k."""
    twist = _twist(C)[1] if metaplectic else None
    B = [C.normals[f] for f in C.base_facets]
    Binv = integer_inverse(B)
    entries = []
    for idx in admissible_indices(C, k, metaplectic):
        a = idx.shifted()
        rhs = [a[f] / k - C.lam[f] for f in C.base_facets]
        ell = matvec(Binv, rhs)
        for f, (normal, lam) in enumerate(zip(C.normals, C.lam)):
            if dot(normal, ell) + lam != a[f] / k:
                raise InconsistentSystem(f"alpha={idx.alpha}: facet {f} equation fails")
        entries.append((idx, ell))
    entries.sort(key=lambda e: e[1])
    ells = [e[1] for e in entries]
    if len(set(ells)) != len(ells):
        raise InconsistentSystem("two Fock indices share a joint eigenvalue")
    return OracleSpectrum(k, tuple(entries), metaplectic, twist)


@dataclass(frozen=True)
class BijectionReport:
    ok: bool
    dimension: int
    lattice_only: tuple = ()
    oracle_only: tuple = ()  # ((ell, alpha), ...)

    def __str__(self):
        if self.ok:
            return f"dim {self.dimension}, sets identical"
        lines = [f"MISMATCH: {len(self.lattice_only)} lattice-only, {len(self.oracle_only)} oracle-only"]
        for p in self.lattice_only[:5]:
            lines.append(f"  lattice only: {tuple(str(x) for x in p)}")
        for p, a in self.oracle_only[:5]:
            lines.append(f"  oracle only: {tuple(str(x) for x in p)} from alpha={a}")
        return "\n".join(lines)


def bijection_check(P, k, metaplectic=False):
    """Compare the oracle eigenvalues with the lattice description exactly."""
    c = check_prequantizable(P)
    C = construction_data(P.translated(c))
    oracle = oracle_spectrum(C, k, metaplectic)
    from_oracle = {tuple(x - y for x, y in zip(ell, c)): idx.alpha for idx, ell in oracle.entries}
    lattice = metaplectic_lattice(P, k) if metaplectic else model_lattice(P, k)
    lattice_set = set(lattice)
    lattice_only = tuple(sorted(lattice_set - from_oracle.keys()))
    oracle_only = tuple(sorted((p, a) for p, a in from_oracle.items() if p not in lattice_set))
    ok = not lattice_only and not oracle_only
    return BijectionReport(ok, len(oracle.entries), lattice_only, oracle_only)
