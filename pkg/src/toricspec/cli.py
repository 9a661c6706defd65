"""Command-line front end.

    toricspec validate P.json
    toricspec spectrum P.json --k K [--metaplectic] [--deform g.json] [--noise C,N --seed S]
                                    [--out cloud.json] [--plot-data out.csv]
    toricspec oracle P.json --k K [--metaplectic]
    toricspec reconstruct cloud.json... [--config cfg.json] [--out result.json]
    toricspec compare A.json B.json [--kmax K] [--tol T]
    toricspec weyl P.json --kmax K [--metaplectic]

Exit codes: 0 success, 1 domain failure, 2 usage or parse failure.  Every
invocation writes one run manifest (``--manifest``; default: next to
``--out``, else ``toricspec-<command>.manifest.json`` in the working dir).
"""

import argparse
import hashlib
import json
import os
import sys
import time
from datetime import datetime, timezone

import numpy as np

from . import __version__
from . import io
from .bargmann import bijection_check
from .delzant import ValidationReport, check_prequantizable, half_form_vector, polytope_equal, validate_delzant
from .errors import (
    HullDegenerate,
    NoHalfForm,
    NotDelzant,
    NotPrequantizable,
    RationalizationFailed,
    SchemaError,
    SnapExceeded,
    ToricError,
)
from .inverse import ReconstructionConfig, limit_polytope
from .lattice import hausdorff_distance
from .quantum import apply_deformation, inject_noise, metaplectic_spectrum, model_spectrum, weyl_report

STAGES = {
    HullDegenerate: "hull",
    RationalizationFailed: "rationalize",
    SnapExceeded: "snap",
    NotDelzant: "validate",
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _vec(v):
    return "(" + ",".join(str(x) for x in v) + ")"


def _load_polytope(path):
    cand, name = io.polytope_from_dict(io.load_json(path))
    out = validate_delzant(cand, name or os.path.splitext(os.path.basename(path))[0])
    return out


def _require(path):
    out = _load_polytope(path)
    if isinstance(out, ValidationReport):
        raise NotDelzant(f"{path}: not a Delzant polytope:\n{out}", out)
    return out


def _emit(text, path, written):
    if path is None:
        sys.stdout.write(text)
    else:
        io.atomic_write(path, text)
        written.append(path)


# -- commands --------------------------------------------------------------

def cmd_validate(args, ctx):
    out = _load_polytope(args.polytope)
    if isinstance(out, ValidationReport):
        print("Delzant: FAILED")
        for v in out.violations:
            print(f"  {v}")
        return 1
    parts = ["Delzant: OK"]
    try:
        c = check_prequantizable(out)
        parts.append("prequantizable: c = " + ("0" if not any(c) else _vec(c)))
    except NotPrequantizable as exc:
        parts.append(f"prequantizable: NO ({exc})")
    try:
        parts.append("half-form: u = " + _vec(half_form_vector(out)))
    except NoHalfForm as exc:
        parts.append(f"half-form: none (facets {', '.join(map(str, exc.certificate))} have inconsistent parity)")
    print(", ".join(parts))
    return 0


def _parse_noise(text):
    try:
        C, N = (float(x) for x in text.split(","))
    except ValueError:
        raise UsageError(f"--noise expects C,N, got {text!r}") from None
    if C < 0:
        raise UsageError("--noise radius must be non-negative")
    return C, N


def cmd_spectrum(args, ctx):
    P = _require(args.polytope)
    ctx["config"].update(k=args.k, metaplectic=args.metaplectic, noise=args.noise, seed=args.seed)
    cloud = metaplectic_spectrum(P, args.k) if args.metaplectic else model_spectrum(P, args.k)
    if args.deform:
        g = io.deformation_from_dict(io.load_json(args.deform))
        ctx["inputs"].append(args.deform)
        cloud = apply_deformation(cloud, g)
    if args.noise:
        C, N = _parse_noise(args.noise)
        cloud = inject_noise(cloud, C, N, np.random.default_rng(args.seed))
    _emit(io.cloud_to_json(cloud), args.out, ctx["outputs"])
    if args.plot_data:
        io.atomic_write(args.plot_data, io.points_csv(cloud.points))
        ctx["outputs"].append(args.plot_data)
    if args.out:
        print(f"{len(cloud)} points, k = {cloud.k} -> {args.out}")
    return 0


def cmd_oracle(args, ctx):
    P = _require(args.polytope)
    ctx["config"].update(k=args.k, metaplectic=args.metaplectic)
    report = bijection_check(P, args.k, args.metaplectic)
    print(report)
    return 0 if report.ok else 1


def _load_clouds(paths):
    clouds = []
    for p in paths:
        clouds.extend(io.clouds_from_document(io.load_json(p)))
    clouds.sort(key=lambda c: c.k)
    return clouds


def cmd_reconstruct(args, ctx):
    cfg = ReconstructionConfig()
    if args.config:
        cfg = io.config_from_dict(io.load_json(args.config))
        ctx["inputs"].append(args.config)
    ctx["config"].update(vars(cfg))
    clouds = _load_clouds(args.clouds)
    try:
        res = limit_polytope(clouds, cfg)
    except ValueError as exc:
        raise ToricError(f"input: {exc}") from None
    _emit(io.dumps(io.result_to_dict(res)), args.out, ctx["outputs"])
    if args.out:
        print(res.certificate)
    return 0


def _is_polytope_doc(doc):
    return isinstance(doc, dict) and "facets" in doc


def cmd_compare(args, ctx):
    ctx["config"].update(kmax=args.kmax, tol=args.tol)
    docs = [io.load_json(p) for p in (args.a, args.b)]
    if all(_is_polytope_doc(d) for d in docs):
        A, B = (_require(p) for p in (args.a, args.b))
        same = polytope_equal(A, B)
        ks = range(1, args.kmax + 1)
        spectral = True
        for k in ks:
            try:
                la, lb = model_spectrum(A, k).points, model_spectrum(B, k).points
            except NotPrequantizable as exc:
                raise ToricError(f"spectra undefined: {exc}") from None
            if la.shape != lb.shape or hausdorff_distance(la, lb) > args.tol:
                spectral = False
                break
    elif not any(_is_polytope_doc(d) for d in docs):
        ca, cb = (io.clouds_from_document(d) for d in docs)
        ca.sort(key=lambda c: c.k)
        cb.sort(key=lambda c: c.k)
        A, B = limit_polytope(ca), limit_polytope(cb)
        same = polytope_equal(A.polytope, B.polytope)
        common = sorted({c.k for c in ca} & {c.k for c in cb})
        by_a, by_b = {c.k: c for c in ca}, {c.k: c for c in cb}
        spectral = bool(common) and all(
            hausdorff_distance(by_a[k].points, by_b[k].points) <= args.tol for k in common)
        ks = common
    else:
        raise UsageError("compare needs two polytopes or two cloud files, not a mix")
    print("polytopes: " + ("isomorphic" if same else "NOT isomorphic"))
    kdesc = f"k = {min(ks)}..{max(ks)}" if ks else "no common k"
    print(f"spectra ({kdesc}, tol {args.tol:g}): " + ("identical" if spectral else "differ"))
    return 0


def cmd_weyl(args, ctx):
    P = _require(args.polytope)
    ctx["config"].update(kmax=args.kmax, metaplectic=args.metaplectic)
    print(f"{'k':>5} {'count':>10} {'leading':>14} {'relative_gap':>13}")
    for k in range(1, args.kmax + 1):
        row = weyl_report(P, k, args.metaplectic)
        print(f"{row.k:>5} {row.count:>10} {row.leading:>14.6f} {row.relative_gap:>13.6f}")
    return 0


# -- plumbing --------------------------------------------------------------

def _positive(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def build_parser():
    p = _Parser(prog="toricspec", description="Quantum toric systems: Delzant polytopes, joint spectra, reconstruction.")
    p.add_argument("--version", action="version", version=f"toricspec {__version__}")
    p.add_argument("--manifest", help="where to write the run manifest")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("validate", help="check Delzant, prequantization and half-form conditions")
    s.add_argument("polytope")
    s.set_defaults(func=cmd_validate, inputs=["polytope"])

    s = sub.add_parser("spectrum", help="write a (deformed, noisy) joint-spectrum cloud")
    s.add_argument("polytope")
    s.add_argument("--k", type=_positive, required=True)
    s.add_argument("--metaplectic", action="store_true")
    s.add_argument("--deform", metavar="G.json")
    s.add_argument("--noise", metavar="C,N", help="uniform noise in a ball of radius C*k^-N")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out")
    s.add_argument("--plot-data", metavar="OUT.csv")
    s.set_defaults(func=cmd_spectrum, inputs=["polytope"])

    s = sub.add_parser("oracle", help="compare the Fock-space oracle with the lattice spectrum")
    s.add_argument("polytope")
    s.add_argument("--k", type=_positive, required=True)
    s.add_argument("--metaplectic", action="store_true")
    s.set_defaults(func=cmd_oracle, inputs=["polytope"])

    s = sub.add_parser("reconstruct", help="recover the polytope from spectrum clouds")
    s.add_argument("clouds", nargs="+")
    s.add_argument("--config")
    s.add_argument("--out")
    s.set_defaults(func=cmd_reconstruct, inputs=["clouds"])

    s = sub.add_parser("compare", help="isomorphism verdicts for two polytopes or two cloud sets")
    s.add_argument("a")
    s.add_argument("b")
    s.add_argument("--kmax", type=_positive, default=4)
    s.add_argument("--tol", type=float, default=1e-9)
    s.set_defaults(func=cmd_compare, inputs=["a", "b"])

    s = sub.add_parser("weyl", help="lattice counts against the leading Weyl term")
    s.add_argument("polytope")
    s.add_argument("--kmax", type=_positive, required=True)
    s.add_argument("--metaplectic", action="store_true")
    s.set_defaults(func=cmd_weyl, inputs=["polytope"])
    return p


def _sha256(path):
    h = hashlib.sha256()
    try:
        with open(path, "rb") as fh:
            for block in iter(lambda: fh.read(1 << 16), b""):
                h.update(block)
    except OSError:
        return None
    return h.hexdigest()


def _manifest_path(args, ctx):
    if getattr(args, "manifest", None):
        return args.manifest
    if ctx["outputs"]:
        return ctx["outputs"][0] + ".manifest.json"
    return f"toricspec-{getattr(args, 'command', None) or 'usage'}.manifest.json"


def _write_manifest(args, ctx, argv, code, message, started, t0):
    inputs = list(ctx["inputs"])
    doc = {
        "schema": 1,
        "command": getattr(args, "command", None),
        "argv": argv,
        "inputs": [{"path": p, "sha256": _sha256(p)} for p in inputs],
        "outputs": ctx["outputs"],
        "config": ctx["config"],
        "version": __version__,
        "exit_code": code,
        "message": message,
        "started": started,
        "duration_s": round(time.perf_counter() - t0, 6),
    }
    try:
        io.atomic_write(_manifest_path(args, ctx), json.dumps(doc, indent=2, default=str) + "\n")
    except OSError as exc:
        print(f"warning: could not write manifest: {exc}", file=sys.stderr)


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    t0 = time.perf_counter()
    started = datetime.now(timezone.utc).isoformat()
    ctx = {"inputs": [], "outputs": [], "config": {}}
    args = argparse.Namespace()
    message = ""
    try:
        args = build_parser().parse_args(argv)
        for attr in args.inputs:
            val = getattr(args, attr)
            ctx["inputs"].extend(val if isinstance(val, list) else [val])
        code = args.func(args, ctx)
    except SystemExit as exc:  # --help / --version
        code = exc.code if isinstance(exc.code, int) else 0
    except (UsageError, SchemaError) as exc:
        code, message = 2, str(exc)
        print(f"error: {exc}", file=sys.stderr)
    except NoHalfForm as exc:
        code, message = 1, str(exc)
        print(f"error: {exc}", file=sys.stderr)
    except ToricError as exc:
        code, message = 1, str(exc)
        stage = next((name for cls, name in STAGES.items() if isinstance(exc, cls)), None)
        prefix = f"{stage} stage failed: " if stage else ""
        print(f"error: {prefix}{exc}", file=sys.stderr)
    _write_manifest(args, ctx, argv, code, message, started, t0)
    return code


if __name__ == "__main__":
    sys.exit(main())
