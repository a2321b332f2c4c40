"""Command-line interface: ``symspace <command> ...``.

Exit codes: 0 success, 1 a check failed, 2 usage or parse error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import BadParams, ParseError, SymspaceError, UnknownSuite

SCHEMA = 1
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


@dataclass
class RunConfig:
    command: str
    seed: int = 0
    out: Optional[str] = None
    tol: Optional[float] = None
    options: dict = field(default_factory=dict)

    def validate(self) -> None:
        if self.tol is not None and not (self.tol > 0 and math.isfinite(self.tol)):
            raise BadParams("--tol must be a positive number")
        if self.seed < 0:
            raise BadParams("--seed must be non-negative")


# --- io helpers ----------------------------------------------------------------

def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump(obj, out: Optional[str]) -> None:
    _emit(json.dumps(obj, indent=2, default=_json_default) + "\n", out)


def _json_default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.floating, np.integer, np.bool_)):
        return o.item()
    if isinstance(o, complex):
        return [o.real, o.imag]
    return str(o)


def _floats(text: str) -> list:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise ParseError(f"cannot parse number list {text!r}") from exc


def _params(args):
    from .liealg import SignatureParams
    try:
        return SignatureParams(args.r, args.s, odd=args.odd)
    except (ValueError, TypeError) as exc:
        raise BadParams(str(exc)) from exc


def _point(p, text: Optional[str]):
    from .solvgroup import SolvablePoint
    if text is None:
        return SolvablePoint.zeros(p)
    v = _floats(text)
    if len(v) != p.dim_solv:
        from .errors import ShapeMismatch
        raise ShapeMismatch(f"expected {p.dim_solv} coordinates for (r,s)=({p.r},{p.s}), got {len(v)}")
    return SolvablePoint.from_vector(p, v)


def _read_json(path: str):
    try:
        with open(path, encoding="utf-8") if path != "-" else sys.stdin as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read JSON from {path}: {exc}") from exc


def _load_point(d):
    from .solvgroup import SolvablePoint
    try:
        return SolvablePoint.from_json(d)
    except (KeyError, TypeError, ValueError) as exc:
        from .errors import ShapeMismatch
        raise ShapeMismatch(f"malformed point: {exc}") from exc


def _report_lines(checks) -> str:
    lines = [c.line() for c in checks]
    failed = sum(not c.ok for c in checks)
    lines.append(f"{len(checks)} checks, {failed} failed")
    return "\n".join(lines) + "\n"


def _report(checks, cfg: RunConfig, suite: str) -> int:
    if cfg.options.get("json"):
        _dump({"schema": SCHEMA, "suite": suite, "seed": cfg.seed,
               "passed": all(c.ok for c in checks), "checks": [c.to_json() for c in checks]}, cfg.out)
    else:
        _emit(_report_lines(checks), cfg.out)
    return EXIT_OK if all(c.ok for c in checks) else EXIT_FAIL


# --- commands ---------------------------------------------------------------------

def cmd_distance(args, cfg: RunConfig) -> int:
    from .geodesy import distance, distance_report
    from .solvgroup import SolvablePoint
    if args.random:
        p = _params(args)
        rng = np.random.default_rng(cfg.seed)
        pairs = [(SolvablePoint.random(p, rng), SolvablePoint.random(p, rng)) for _ in range(args.random)]
    elif args.input:
        data = _read_json(args.input)
        raw = data.get("pairs") if isinstance(data, dict) else data
        if not isinstance(raw, list):
            raise ParseError("expected a list of point pairs")
        pairs = []
        for item in raw:
            if not (isinstance(item, (list, tuple)) and len(item) == 2):
                raise ParseError("each pair must hold exactly two points")
            u, v = _load_point(item[0]), _load_point(item[1])
            if u.params != v.params:
                from .errors import ShapeMismatch
                raise ShapeMismatch("pair members belong to different (r,s)")
            pairs.append((u, v))
    else:
        raise BadParams("give an input file or --random N")
    records = [distance_report(u, v) for u, v in pairs]
    out = {"schema": SCHEMA, "records": records}
    if len(pairs) > 1:
        # chain pairs into triangles (u_i, v_i, u_{i+1})
        slack = min(distance(u, w) + distance(w, v) - rec["d"]
                    for (u, v), rec, (w, _) in zip(pairs, records, pairs[1:] + pairs[:1])
                    if w.params == u.params)
        out["triangle_min_slack"] = slack
        out["triangle_ok"] = bool(slack >= -1e-9)
    _dump(out, cfg.out)
    return EXIT_OK


def cmd_geodesic(args, cfg: RunConfig) -> int:
    from .geodesy import geodesic
    p = _params(args)
    u, v = _point(p, args.u), _point(p, args.v)
    g = geodesic(u, v)
    pts = g.samples(args.samples)
    _dump({"schema": SCHEMA, "length": g.length(), "points": [q.to_json() for q in pts]}, cfg.out)
    return EXIT_OK


def cmd_project(args, cfg: RunConfig) -> int:
    from .titssatake import ts_project, ts_reduce
    p = _params(args)
    y = _load_point(_read_json(args.input)) if args.input else _point(p, args.point)
    _dump({"schema": SCHEMA, "projected": ts_project(y).to_json(), "reduced": ts_reduce(y).to_json()}, cfg.out)
    return EXIT_OK


def cmd_siegel(args, cfg: RunConfig) -> int:
    from .titssatake import SIEGEL_ORIGIN, fl_action, spinor_solvable, to_siegel
    w = _floats(args.w)
    if len(w) != 6:
        raise BadParams("--w needs six numbers")
    z = to_siegel(w)
    two = float(np.abs(fl_action(spinor_solvable(w), SIEGEL_ORIGIN).Z - z.Z).max())
    _dump({"schema": SCHEMA, "X": z.X, "Y": z.Y, "two_path_residual": two}, cfg.out)
    return EXIT_OK


def _leaf_rows(w1, w2, phis):
    from .liealg import SignatureParams
    from .solvgroup import SolvablePoint
    from .titssatake import leaf, leaf_r1s1_xyz
    base = SolvablePoint(SignatureParams(1, 1), [w1], [], [[w2, 0.0]])
    rows = []
    for phi in phis:
        y = leaf(base, [phi]).point
        x, yy, w22 = leaf_r1s1_xyz(w1, w2, phi)
        rows.append([float(phi), float(y.cartan[0]), float(y.short[0, 0]), float(y.short[0, 1]), x, yy, w22])
    return rows


LEAF_COLUMNS = ["phi", "u1", "u21", "u22", "x", "y", "w22"]


def cmd_leaf(args, cfg: RunConfig) -> int:
    from .titssatake import leaf_norm_r1s1
    phis = np.linspace(0.0, 2 * math.pi, args.samples)
    rows = _leaf_rows(args.w1, args.w2, phis)
    _dump({"schema": SCHEMA, "w1": args.w1, "w2": args.w2, "norm_squared": leaf_norm_r1s1(args.w1, args.w2),
           "columns": LEAF_COLUMNS, "points": rows}, cfg.out)
    return EXIT_OK


def _family(args):
    from . import arithmetic as ar
    if args.family == "sp4z":
        return ar.sp4z_generators()
    if args.r is None or args.q is None:
        raise BadParams("sorqz needs --r and --q")
    try:
        return ar.sorqz_generators(args.r, args.q)
    except ValueError as exc:
        raise BadParams(str(exc)) from exc


def cmd_group(args, cfg: RunConfig) -> int:
    from . import arithmetic as ar
    from .suites import Check
    gens = _family(args)
    if args.action == "gen":
        _dump({"schema": SCHEMA, "family": args.family, "generators": {k: m.to_json() for k, m in gens.items()}},
              cfg.out)
        return EXIT_OK
    if args.action == "verify":
        rels = ar.sp4z_relations() if args.family == "sp4z" else ar.sorqz_relations(args.r, args.q)
        return _report([Check(f"{x.name} [{x.mode}]", x.holds) for x in rels], cfg, f"group-{args.family}")
    names = [n.strip() for n in args.gens.split(",")] if args.gens else (
        ["S1", "S2", "Q1", "Q2"] if args.family == "sp4z" else [k for k in gens if k.startswith("J")])
    unknown = [n for n in names if n not in gens]
    if unknown:
        raise BadParams(f"unknown generators: {', '.join(unknown)}")
    try:
        G = ar.closure([gens[n] for n in names], cap=args.cap)
    except SymspaceError as exc:
        _dump({"schema": SCHEMA, "generators": names, "error": str(exc)}, cfg.out)
        return EXIT_FAIL
    orders = {}
    for g in G:
        k = ar.element_order(g)
        orders[k] = orders.get(k, 0) + 1
    out = {"schema": SCHEMA, "generators": names, "order": len(G),
           "classes": len(ar.conjugacy_classes(G)),
           "element_orders": {str(k): orders[k] for k in sorted(orders)},
           "elements": [g.to_json() for g in G]}
    _dump(out, cfg.out)
    if args.cayley:
        edges = ar.cayley_edges(G, [gens[n] for n in names])
        with open(args.cayley, "w", encoding="utf-8") as fh:
            json.dump({"schema": SCHEMA, "generators": names, "vertices": len(G), "edges": edges}, fh)
    return EXIT_OK


def _partition(text: str):
    from .harmonics import Partition
    try:
        return Partition.parse(text)
    except ValueError as exc:
        raise ParseError(str(exc)) from exc


def cmd_casimir(args, cfg: RunConfig) -> int:
    from . import harmonics as hm
    lam = _partition(args.partition)
    c = hm.casimir(args.N, lam)
    _dump({"schema": SCHEMA, "N": args.N, "partition": str(lam), "casimir": str(c), "value": float(c),
           "dynkin": hm.dynkin_labels(lam, args.N), "even": lam.is_even()}, cfg.out)
    return EXIT_OK


def cmd_laplacian(args, cfg: RunConfig) -> int:
    from . import harmonics as hm
    from .suites import Check
    lam = _partition(args.partition)
    N = args.N
    rng = np.random.default_rng(cfg.seed)
    if lam.parts == (2,):
        f = hm.fundamental_harmonic(N, 1, 2)
    elif lam.parts in ((4,), (2, 2), (3, 1)):
        if N < 4:
            raise BadParams("level-2 harmonics need N >= 4")
        f = hm.harmonic_level2(N, lam, (1, 2, 3, 4))
    else:
        raise BadParams(f"no explicit harmonic for {lam}; choose (2), (4), (2,2) or (3,1)")
    pts = [hm.random_point(N, rng) for _ in range(args.points)]
    if not lam.is_even():
        worst = max(abs(f(x)) for x in pts)
        return _report([Check(f"{lam} harmonic vanishes", worst <= 1e-13, worst)], cfg, "laplacian")
    target = float(hm.casimir(N, lam))
    worst = max(abs(hm.eigenvalue_ratio(N, f, x) - target) / target for x in pts)
    return _report([Check(f"Laplacian {lam} = {hm.casimir(N, lam)}", worst < 1e-3, worst)], cfg, "laplacian")


def cmd_cmap(args, cfg: RunConfig) -> int:
    from .suites import cmap_suite
    return _report(cmap_suite(np.random.default_rng(cfg.seed)), cfg, "cmap")


def cmd_verify(args, cfg: RunConfig) -> int:
    from .suites import run_suite
    return _report(run_suite(args.suite, cfg.seed), cfg, args.suite)


# --- trace ---------------------------------------------------------------------------

def _polyline_distance(pts: np.ndarray, poly: np.ndarray) -> np.ndarray:
    """Distance from each point to a polyline."""
    a, b = poly[:-1], poly[1:]
    ab = b - a
    L2 = np.maximum(np.sum(ab * ab, axis=1), 1e-300)
    out = np.empty(len(pts))
    for k, x in enumerate(pts):
        t = np.clip(np.sum((x - a) * ab, axis=1) / L2, 0.0, 1.0)
        out[k] = np.min(np.linalg.norm(a + t[:, None] * ab - x, axis=1))
    return out


def trace_data(kind: str, opts: dict) -> dict:
    """Curve data for ``trace``: columns, rows and summary numbers."""
    from .geodesy import geodesic
    from .liealg import SignatureParams
    from .solvgroup import SolvablePoint
    from .titssatake import disk_geodesic, leaf, to_disk
    n = int(opts.get("samples") or {"geodesic": 33, "leaf": 64, "disk": 65}[kind])
    if n < 2:
        raise BadParams("--samples must be at least 2")
    if kind == "geodesic":
        p = opts["params"]
        u = opts.get("u") or SolvablePoint.zeros(p)
        v = opts.get("v")
        if v is None:
            v = SolvablePoint(p, np.eye(p.r)[0], np.zeros(p.r * p.r - p.r), np.zeros((p.r, p.q)))
        g = geodesic(u, v)
        ts = np.linspace(0.0, 1.0, n)
        rows = [[float(t)] + g.sampler(float(t)).as_vector().tolist() for t in ts]
        cols = ["t"] + [f"y{k + 1}" for k in range(p.dim_solv)]
        cart = np.array([r[1] for r in rows])
        return {"kind": kind, "columns": cols, "points": rows, "length": g.length(),
                "monotone_cartan": bool(np.all(np.diff(cart) >= -1e-12) or np.all(np.diff(cart) <= 1e-12)),
                "plot": (1, 2)}
    w1, w2 = float(opts.get("w1", 2.0 if kind == "leaf" else 0.5)), float(opts.get("w2", 1.5 if kind == "leaf" else 1.0))
    if kind == "leaf":
        rows = _leaf_rows(w1, w2, np.linspace(0.0, 2 * math.pi, n))
        gap = float(np.abs(np.array(rows[0][1:]) - np.array(rows[-1][1:])).max())
        return {"kind": kind, "w1": w1, "w2": w2, "columns": LEAF_COLUMNS, "points": rows,
                "closure_gap": gap, "closed": gap < 1e-9, "plot": (4, 5)}
    if kind == "disk":
        phi = float(opts.get("phi", math.pi / 2))
        base = SolvablePoint(SignatureParams(1, 1), [w1], [], [[w2, 0.0]])
        a, b = leaf(base, [0.0]).point, leaf(base, [phi]).point
        curve = geodesic(a, b).samples(n)
        disk = np.array([[d.re, d.im] for d in (to_disk(y.cartan[0], y.short[0, 0]) for y in curve)])
        da, db = to_disk(a.cartan[0], a.short[0, 0]), to_disk(b.cartan[0], b.short[0, 0])
        ref = disk_geodesic(da, db, 4001)
        dev = _polyline_distance(disk, ref)
        rows = [[float(t), float(x), float(y), float(e)] for t, (x, y), e in zip(np.linspace(0, 1, n), disk, dev)]
        return {"kind": kind, "w1": w1, "w2": w2, "phi": phi, "columns": ["t", "re", "im", "deviation"],
                "points": rows, "reference": disk_geodesic(da, db, n).tolist(),
                "max_deviation": float(dev.max()), "plot": (1, 2)}
    raise BadParams(f"unknown trace kind {kind!r}")


def _csv(data: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(data["columns"])
    for row in data["points"]:
        w.writerow([repr(float(x)) for x in row])
    return buf.getvalue()


def _svg(data: dict, size: int = 400) -> str:
    i, j = data["plot"]
    pts = np.array([[r[i], r[j]] for r in data["points"]])
    lines = [pts]
    if data["kind"] == "disk":
        lines.append(np.array(data["reference"]))
    allp = np.vstack(lines)
    lo, hi = allp.min(axis=0), allp.max(axis=0)
    span = max(float((hi - lo).max()), 1e-12)
    pad = 0.05 * size

    def xy(q):
        x = pad + (q[0] - lo[0]) / span * (size - 2 * pad)
        y = size - pad - (q[1] - lo[1]) / span * (size - 2 * pad)
        return f"{x:.3f},{y:.3f}"

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">']
    for line, colour in zip(lines, ("#1f4e9c", "#c0392b")):
        out.append(f'<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{" ".join(xy(q) for q in line)}"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def cmd_trace(args, cfg: RunConfig) -> int:
    opts = {"samples": args.samples}
    if args.kind == "geodesic":
        p = _params(args)
        opts.update(params=p, u=_point(p, args.u) if args.u else None, v=_point(p, args.v) if args.v else None)
    else:
        for k in ("w1", "w2", "phi"):
            if getattr(args, k) is not None:
                opts[k] = getattr(args, k)
    data = trace_data(args.kind, opts)
    fmt = args.format
    if fmt == "json":
        data = dict(data)
        data.pop("plot")
        _dump({"schema": SCHEMA, **data}, cfg.out)
    elif fmt == "csv":
        _emit(_csv(data), cfg.out)
    else:
        _emit(_svg(data), cfg.out)
    if args.kind == "disk":
        sys.stderr.write(f"max deviation from disk geodesic: {data['max_deviation']!r}\n")
    return EXIT_OK


# --- parser ---------------------------------------------------------------------------------

def _add_rs(sp, r=1, s=1):
    sp.add_argument("--r", type=int, default=r)
    sp.add_argument("--s", type=int, default=s)
    sp.add_argument("--odd", action="store_true", help="q = 2s+1 instead of 2s")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", "-o", help="write output to a file instead of stdout")
    common.add_argument("--tol", type=float, help="override the default tolerance (also SYMSPACE_TOL)")
    common.add_argument("--json", action="store_true", help="machine-readable report for check commands")

    ap = argparse.ArgumentParser(prog="symspace", description="Geometry of non-compact symmetric spaces.")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("distance", parents=[common], help="distances for JSON point pairs")
    sp.add_argument("input", nargs="?", help="JSON file with a list of [u, v] point pairs ('-' for stdin)")
    sp.add_argument("--random", type=int, default=0, help="use N random pairs instead of a file")
    _add_rs(sp)
    sp.set_defaults(func=cmd_distance)

    sp = sub.add_parser("geodesic", parents=[common], help="sampled geodesic between two points")
    _add_rs(sp)
    sp.add_argument("--u", help="comma-separated solvable coordinates (default origin)")
    sp.add_argument("--v", required=True)
    sp.add_argument("--samples", type=int, default=33)
    sp.set_defaults(func=cmd_geodesic)

    sp = sub.add_parser("project", parents=[common], help="Tits-Satake projection of a point")
    _add_rs(sp)
    sp.add_argument("--point")
    sp.add_argument("--input")
    sp.set_defaults(func=cmd_project)

    sp = sub.add_parser("siegel", parents=[common], help="Siegel-plane image of a rank-two point")
    sp.add_argument("--w", required=True, help="six comma-separated coordinates")
    sp.set_defaults(func=cmd_siegel)

    sp = sub.add_parser("leaf", parents=[common], help="r=1, s=1 Grassmannian leaf through (w1, w2)")
    sp.add_argument("--w1", type=float, default=2.0)
    sp.add_argument("--w2", type=float, default=1.5)
    sp.add_argument("--samples", type=int, default=64)
    sp.set_defaults(func=cmd_leaf)

    sp = sub.add_parser("group", parents=[common], help="integer generators, closures and relations")
    sp.add_argument("action", choices=["gen", "closure", "verify"])
    sp.add_argument("--family", choices=["sp4z", "sorqz"], default="sp4z")
    sp.add_argument("--r", type=int)
    sp.add_argument("--q", type=int)
    sp.add_argument("--gens", help="comma-separated generator names for closure")
    sp.add_argument("--cap", type=int, default=100000)
    sp.add_argument("--cayley", help="write Cayley graph edges to this JSON file")
    sp.set_defaults(func=cmd_group)

    sp = sub.add_parser("casimir", parents=[common], help="quadratic Casimir of an SL(N) irrep")
    sp.add_argument("N", type=int)
    sp.add_argument("partition", help="e.g. 2,2 or (2,2)")
    sp.set_defaults(func=cmd_casimir)

    sp = sub.add_parser("laplacian-check", parents=[common], help="numeric Laplacian on an explicit harmonic")
    sp.add_argument("N", type=int)
    sp.add_argument("partition")
    sp.add_argument("--points", type=int, default=3)
    sp.set_defaults(func=cmd_laplacian)

    sp = sub.add_parser("cmap", parents=[common], help="c-map checks")
    sp.add_argument("action", choices=["check"])
    sp.set_defaults(func=cmd_cmap)

    sp = sub.add_parser("verify", parents=[common], help="run a self-check suite")
    sp.add_argument("suite", help="geometry, arithmetic, harmonics, cmap or all")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("trace", parents=[common], help="export curve data as JSON, CSV or SVG")
    sp.add_argument("kind", choices=["geodesic", "leaf", "disk"])
    sp.add_argument("--format", choices=["json", "csv", "svg"], default="json")
    sp.add_argument("--samples", type=int)
    sp.add_argument("--w1", type=float)
    sp.add_argument("--w2", type=float)
    sp.add_argument("--phi", type=float)
    sp.add_argument("--u")
    sp.add_argument("--v")
    _add_rs(sp)
    sp.set_defaults(func=cmd_trace)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    cfg = RunConfig(args.command, seed=args.seed, out=args.out, tol=args.tol, options={"json": args.json})
    try:
        cfg.validate()
        if cfg.tol is not None:
            os.environ["SYMSPACE_TOL"] = repr(cfg.tol)
        return args.func(args, cfg)
    except (ParseError, BadParams, UnknownSuite, SymspaceError) as exc:
        sys.stderr.write(f"symspace: {type(exc).__name__}: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
