"""JSON/CSV file formats.

Polytope files store 2pi-units (``"unit": "2pi"``): a facet
``{"normal": [1, 0], "offset": "1"}`` means <(1,0), xi> + 2pi >= 0 in absolute
momentum coordinates.  Spectrum clouds store absolute units.  Every file
carries ``"schema": 1``.
"""

import json
import math
import os
import re
import tempfile
from fractions import Fraction

import numpy as np

from .errors import SchemaError
from .lattice import HPolytope
from .quantum import DeformationSeries, Polynomial, SpectrumCloud, TWO_PI

SCHEMA = 1


def _check_keys(d, allowed, required, what):
    if not isinstance(d, dict):
        raise SchemaError(f"{what}: expected a JSON object")
    unknown = set(d) - set(allowed)
    if unknown:
        raise SchemaError(f"{what}: unknown field(s) {sorted(unknown)}")
    missing = set(required) - set(d)
    if missing:
        raise SchemaError(f"{what}: missing field(s) {sorted(missing)}")
    if d.get("schema", SCHEMA) != SCHEMA:
        raise SchemaError(f"{what}: unsupported schema version {d.get('schema')!r}")


def _rational(x, what):
    if isinstance(x, bool) or isinstance(x, float):
        raise SchemaError(f"{what}: {x!r} is not an exact rational (write it as a \"p/q\" string)")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError):
            raise SchemaError(f"{what}: cannot parse {x!r} as a rational") from None
    raise SchemaError(f"{what}: expected a rational, got {type(x).__name__}")


def _integer(x, what):
    if isinstance(x, bool) or not isinstance(x, int):
        raise SchemaError(f"{what}: expected an integer, got {x!r}")
    return x


def load_json(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON ({exc})") from None
    except OSError as exc:
        raise SchemaError(f"{path}: {exc.strerror}") from None


def fmt_float(x):
    x = float(x)
    if not math.isfinite(x):
        raise ValueError("non-finite value cannot be serialized")
    return f"{x:.17g}"


def fmt_rational(x):
    return str(Fraction(x))


# -- polytopes -------------------------------------------------------------

def polytope_from_dict(d):
    """(HPolytope, name) from a polytope document; geometry is not validated here."""
    _check_keys(d, {"schema", "dim", "unit", "facets", "name"}, {"dim", "facets"}, "polytope")
    if d.get("unit", "2pi") != "2pi":
        raise SchemaError(f"polytope: unit must be \"2pi\", got {d['unit']!r}")
    dim = _integer(d["dim"], "polytope.dim")
    if dim < 1:
        raise SchemaError("polytope.dim must be >= 1")
    if not isinstance(d["facets"], list):
        raise SchemaError("polytope.facets must be a list")
    hs = []
    for i, f in enumerate(d["facets"]):
        _check_keys(f, {"normal", "offset"}, {"normal", "offset"}, f"facet {i}")
        normal = f["normal"]
        if not isinstance(normal, list) or len(normal) != dim:
            raise SchemaError(f"facet {i}: normal must be a list of {dim} integers")
        normal = tuple(_integer(x, f"facet {i} normal") for x in normal)
        hs.append((normal, _rational(f["offset"], f"facet {i} offset")))
    name = d.get("name", "")
    if not isinstance(name, str):
        raise SchemaError("polytope.name must be a string")
    return HPolytope(dim, tuple(hs)), name


def polytope_to_dict(P, name=None):
    return {
        "schema": SCHEMA,
        "dim": P.dim,
        "unit": "2pi",
        "name": P.name if name is None else name,
        "facets": [{"normal": list(f.normal), "offset": fmt_rational(f.offset)} for f in P.facets],
    }


_INT_LIST = re.compile(r"\[\s+(-?\d+(?:,\s+-?\d+)*)\s+\]")


def dumps(doc):
    """Indented JSON with short integer lists kept on one line."""
    text = json.dumps(doc, indent=2)
    return _INT_LIST.sub(lambda m: "[" + re.sub(r",\s+", ", ", m.group(1)) + "]", text) + "\n"


# -- spectrum clouds -------------------------------------------------------

def _points_json(points, indent):
    rows = ["[" + ", ".join(fmt_float(x) for x in p) + "]" for p in points]
    pad = " " * indent
    if not rows:
        return "[]"
    return "[\n" + ",\n".join(pad + "  " + r for r in rows) + "\n" + pad + "]"


def cloud_to_json(cloud, extra=None):
    """Serialize a SpectrumCloud; floats written with 17 significant digits."""
    head = {"schema": SCHEMA, "k": cloud.k, "exact": bool(cloud.exact), "source": cloud.source}
    if cloud.metadata:
        head["metadata"] = cloud.metadata
    parts = [f'  "{key}": {json.dumps(val)}' for key, val in head.items()]
    parts.append('  "points": ' + _points_json(cloud.points, 2))
    for key, val in (extra or {}).items():
        parts.append(f'  "{key}": {json.dumps(val)}')
    return "{\n" + ",\n".join(parts) + "\n}\n"


def cloud_from_dict(d):
    _check_keys(d, {"schema", "k", "points", "exact", "source", "metadata", "alpha"}, {"k", "points"}, "cloud")
    k = _integer(d["k"], "cloud.k")
    pts = d["points"]
    if not isinstance(pts, list) or not pts:
        raise SchemaError("cloud.points must be a non-empty list")
    try:
        arr = np.array(pts, dtype=float)
    except (TypeError, ValueError):
        raise SchemaError("cloud.points must be a list of equal-length numeric lists") from None
    if arr.ndim != 2:
        raise SchemaError("cloud.points must be a list of equal-length numeric lists")
    if not np.isfinite(arr).all():
        raise SchemaError("cloud.points contains non-finite values")
    try:
        return SpectrumCloud(k, arr, bool(d.get("exact", False)), str(d.get("source", "")),
                             dict(d.get("metadata", {})))
    except ValueError as exc:
        raise SchemaError(f"cloud: {exc}") from None


def clouds_from_document(d):
    """A list of clouds from either a single cloud or a ``{"clouds": [...]}`` bundle."""
    if isinstance(d, dict) and "clouds" in d:
        _check_keys(d, {"schema", "clouds"}, {"clouds"}, "bundle")
        if not isinstance(d["clouds"], list):
            raise SchemaError("bundle.clouds must be a list")
        return [cloud_from_dict(c) for c in d["clouds"]]
    return [cloud_from_dict(d)]


def bundle_to_json(clouds):
    bodies = [cloud_to_json(c).rstrip("\n") for c in clouds]
    inner = ",\n".join("    " + b.replace("\n", "\n    ") for b in bodies)
    return '{\n  "schema": 1,\n  "clouds": [\n' + inner + "\n  ]\n}\n"


def oracle_to_json(spec, source="oracle"):
    """Oracle spectrum in the cloud layout, plus the Fock index of every point."""
    pts = [[float(x) * TWO_PI for x in ell] for _, ell in spec.entries]
    cloud = SpectrumCloud(spec.k, np.array(pts), True, source + (":metaplectic" if spec.metaplectic else ""))
    return cloud_to_json(cloud, {"alpha": [list(idx.alpha) for idx, _ in spec.entries]})


def points_csv(points):
    points = np.asarray(points, dtype=float)
    n = points.shape[1]
    lines = [",".join(f"x{i + 1}" for i in range(n))]
    lines += [",".join(fmt_float(x) for x in p) for p in points]
    return "\n".join(lines) + "\n"


# -- deformations and configs ----------------------------------------------

def deformation_from_dict(d):
    """``{"schema": 1, "dim": n, "orders": [[comp_1, ..., comp_n], ...]}``.

    Each component is a list of terms ``{"coeff": "p/q", "powers": [e_1, ..., e_n]}``
    in absolute-unit variables; ``orders[j-1]`` is g_j.
    """
    _check_keys(d, {"schema", "dim", "orders"}, {"dim", "orders"}, "deformation")
    n = _integer(d["dim"], "deformation.dim")
    orders = []
    for j, g in enumerate(d["orders"], start=1):
        if not isinstance(g, list) or len(g) != n:
            raise SchemaError(f"deformation order {j}: need {n} components")
        comps = []
        for comp in g:
            terms = []
            for t in comp:
                _check_keys(t, {"coeff", "powers"}, {"coeff", "powers"}, f"deformation order {j} term")
                powers = t["powers"]
                if not isinstance(powers, list) or len(powers) != n:
                    raise SchemaError(f"deformation order {j}: powers need {n} entries")
                powers = tuple(_integer(e, "power") for e in powers)
                if any(e < 0 for e in powers):
                    raise SchemaError("negative power in deformation")
                terms.append((_rational(t["coeff"], "coeff"), powers))
            comps.append(Polynomial(tuple(terms)))
        orders.append(tuple(comps))
    return DeformationSeries(n, tuple(orders))


def deformation_to_dict(g):
    return {
        "schema": SCHEMA,
        "dim": g.dim,
        "orders": [[[{"coeff": fmt_rational(c), "powers": list(ex)} for c, ex in p.terms] for p in comps]
                   for comps in g.orders],
    }


def config_from_dict(d):
    from .inverse import ReconstructionConfig

    fields = {"denominator_bound", "snap_tolerance", "minimum_clouds", "order"}
    _check_keys(d, fields | {"schema"}, set(), "config")
    kw = {k: v for k, v in d.items() if k in fields}
    try:
        return ReconstructionConfig(**kw)
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"config: {exc}") from None


def result_to_dict(res):
    return {
        "schema": SCHEMA,
        "polytope": polytope_to_dict(res.polytope, "reconstructed"),
        "translation_used": [fmt_rational(x) for x in res.translation_used],
        "per_k_residuals": [[k, float(d)] for k, d in res.per_k_residuals],
        "rate_fit": {"C": res.rate_fit[0], "exponent": res.rate_fit[1], "C_exponent_1": res.constrained_C},
        "certificate": res.certificate,
    }


def atomic_write(path, text):
    """Write via a temporary file in the same directory, then rename."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
