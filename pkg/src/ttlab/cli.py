"""``ttlab`` command line.

Exit codes: 0 when every requested check passes, 1 when a check fails,
2 for usage, input or numerical errors.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import io, spaces
from .errors import InjectivityError, PreconditionError, SizeError, TTLabError
from .metric_core import gh_estimate, gh_exact_small, truncated_gh
from .travel_time import (
    check_blie,
    check_flie,
    midpoint_test,
    travel_time_data,
    verify_stability,
)

PASS, FAIL, USAGE = 0, 1, 2


class Fail(Exception):
    """A requested assertion did not hold."""


def _emit(args, name: str, text: str) -> None:
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / name).write_text(text)
    sys.stdout.write(text)


def _emit_json(args, name: str, obj) -> None:
    _emit(args, name, io.dumps(obj))


def _svg(args, name: str, text: str) -> None:
    if args.svg:
        out = Path(args.out or ".")
        out.mkdir(parents=True, exist_ok=True)
        (out / name).write_text(text)


# ---------------------------------------------------------------- gen


def _parse_vertices(text: str):
    return [tuple(float(v) for v in p.split(",")) for p in text.split(";") if p.strip()]


def _load_edges(path):
    doc = json.loads(Path(path).read_text())
    if isinstance(doc, dict):
        doc = doc["edges"]
    return spaces.TreeSpec(tuple((str(u), str(v), float(w)) for u, v, w in doc))


def cmd_gen(args) -> int:
    kind = args.kind
    if kind == "tree":
        if not args.edges:
            raise TTLabError("gen tree needs --edges FILE")
        sampled = spaces.build_tree(_load_edges(args.edges), args.extra)
    elif kind == "random-tree":
        rng = np.random.default_rng(args.seed)
        sampled = spaces.build_tree(spaces.random_tree_spec(args.nodes, rng), args.extra)
    elif kind == "annulus":
        sampled = spaces.sample_annulus(spaces.AnnulusSpec(args.r, args.R, args.n_boundary, args.n_interior))
    elif kind == "sphere-band":
        sampled = spaces.sphere_band(spaces.SphereBandSpec(args.r, args.resolution))
    elif kind == "sphere-equator":
        sampled = spaces.sphere_equator(args.resolution, args.drop_south_pole)
    elif kind == "polygon":
        sampled = spaces.convex_polygon(_parse_vertices(args.vertices), args.resolution)
    elif kind == "interval":
        sampled = spaces.interval(args.length, args.points)
    elif kind == "herglotz-disk":
        from .herglotz import disk_distance_matrix, gaussian_profile

        sampled = disk_distance_matrix(gaussian_profile(args.k, args.sigma), args.grid)
    else:  # pragma: no cover - argparse restricts choices
        raise TTLabError(f"unknown generator {kind}")
    doc = sampled.document()
    doc["provenance"]["seed"] = args.seed
    _emit_json(args, f"{args.name or kind}.json", doc)
    return PASS


# ---------------------------------------------------------------- checks


def _space(path):
    space, prov = io.read_space(path)
    return space, prov


def _tol(args, prov) -> float:
    if args.tol is not None:
        return args.tol
    return float(prov.get("check_tol", 0.0))


def cmd_data(args) -> int:
    space, _ = _space(args.space)
    _emit(args, "data.csv", io.data_to_csv(travel_time_data(space)))
    return PASS


def _report(args, name, rep, extra=None) -> int:
    doc = rep.to_dict()
    if extra:
        doc.update(extra)
    _emit_json(args, name, doc)
    if not rep.passed:
        raise Fail
    return PASS


def cmd_check_flie(args) -> int:
    space, prov = _space(args.space)
    return _report(args, "flie.json", check_flie(space, None, args.eps, _tol(args, prov)))


def cmd_check_blie(args) -> int:
    space, prov = _space(args.space)
    try:
        rep = check_blie(space, None, args.eps, _tol(args, prov))
    except InjectivityError as exc:
        p, q = exc.pair
        _emit_json(args, "blie.json", {
            "passed": False,
            "injective": False,
            "duplicate_rows": [space.labels[p], space.labels[q]],
            "epsilon": args.eps if math.isfinite(args.eps) else None,
        })
        raise Fail from None
    return _report(args, "blie.json", rep, {"injective": True})


def cmd_midpoint(args) -> int:
    space, prov = _space(args.space)
    return _report(args, "midpoint.json", midpoint_test(travel_time_data(space), args.eps, _tol(args, prov)))


def cmd_gh(args) -> int:
    X, _ = _space(args.a)
    Y, _ = _space(args.b)
    if args.exact:
        if args.eps is not None:
            from .metric_core import truncate

            X, Y = truncate(X, args.eps), truncate(Y, args.eps)
        value = gh_exact_small(X, Y, args.cap)
        _emit_json(args, "gh.json", {"exact": value, "epsilon": args.eps})
        return PASS
    est = truncated_gh(X, Y, args.eps, args.cap) if args.eps is not None else gh_estimate(X, Y, args.cap)
    doc = est.to_dict()
    doc["epsilon"] = args.eps
    _emit_json(args, "gh.json", doc)
    return PASS


def cmd_stability(args) -> int:
    X, px = _space(args.a)
    Y, py = _space(args.b)
    tol = args.tol if args.tol is not None else 0.0
    try:
        rep = verify_stability(X, None, Y, None, None, args.eps, args.diam_bound, args.cap, tol)
    except PreconditionError as exc:
        doc = {"holds": False, "precondition": str(exc)}
        if exc.report is not None:
            doc["report"] = exc.report.to_dict()
        _emit_json(args, "stability.json", doc)
        raise Fail from None
    _emit_json(args, "stability.json", rep.to_dict())
    if not rep.holds:
        raise Fail
    return PASS


# ---------------------------------------------------------------- herglotz


def cmd_herglotz(args) -> int:
    from . import herglotz as hz
    from .svg import line_plot

    profile = hz.gaussian_profile(args.k, args.sigma)
    what = args.what
    if what == "alpha":
        radii = np.linspace(0.0, 1.0, args.grid + 1)
        lines = ["r,L,alpha"]
        recs = hz.geodesic_table(profile, radii)
        for rec in recs:
            lines.append(f"{rec.tip_radius!r},{rec.half_length!r},{rec.half_angle!r}")
        _emit(args, "alpha.csv", "\n".join(lines) + "\n")
        _svg(args, "alpha.svg", line_plot([(radii, [r.half_angle for r in recs])], "half opening angle"))
        return PASS
    if what == "conjugates":
        lines = ["r0,root"]
        for r0 in args.r0:
            for root in hz.conjugate_radii(profile, r0, args.grid):
                lines.append(f"{float(r0)!r},{root!r}")
            if args.svg:
                rr = np.linspace(0.01 * r0, 0.97 * r0, 80)
                curve = [hz.truncated_angle_slope(profile, r, r0) for r in rr]
                _svg(args, f"slope_{r0}.svg", line_plot([(rr, curve)], f"d/dr truncated angle, r0={r0}"))
        _emit(args, "conjugates.csv", "\n".join(lines) + "\n")
        return PASS
    triples = hz.find_intersecting_pairs(profile, args.grid)
    if what == "intersections":
        _emit_json(args, "intersections.json", [t.to_dict() for t in triples])
        return PASS
    report = hz.minimality_margin(profile, triples)
    doc = {
        "profile": profile.describe(),
        "grid": args.grid,
        "n_triples": report.n_triples,
        "n_failing": len(report.failing_triples),
        "delta": None if math.isinf(report.delta) else report.delta,
        "flie_epsilon_bound": None if math.isinf(report.delta) else hz.flie_from_delta(report.delta),
    }
    if report.extension_times:
        k, which, _ = min(report.extension_times, key=lambda e: e[2])
        doc["witness"] = report.failing_triples[k].to_dict() | {"geodesic": which}
        if args.svg:
            t = report.failing_triples[k]
            oracle = hz.ReplayOracle(profile)
            a, b = oracle.trace(t.r0, 1).polyline(), oracle.trace(t.r1, t.sign).polyline()
            _svg(args, "witness.svg", line_plot([(a[:, 0], a[:, 1]), (b[:, 0], b[:, 1])], "meeting geodesics",
                                                equal_aspect=True, circle=True))
    if args.out:
        Path(args.out).mkdir(parents=True, exist_ok=True)
        (Path(args.out) / "minimality_full.json").write_text(io.dumps(report.to_dict()))
    _emit_json(args, "delta.json", doc)
    if args.expect is not None:
        lo, hi = args.expect
        if not (doc["delta"] is not None and lo <= doc["delta"] <= hi):
            raise Fail
    return PASS


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", metavar="DIR", help="also write the result into DIR")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="ttlab", description="Travel time data and Gromov-Hausdorff experiments.")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", parents=[common], help="generate a sampled space")
    g.add_argument("kind", choices=["tree", "random-tree", "annulus", "sphere-band", "sphere-equator",
                                    "polygon", "interval", "herglotz-disk"])
    g.add_argument("--name", help="output file stem")
    g.add_argument("--edges", help="JSON list of [u, v, length]")
    g.add_argument("--extra", type=int, default=0, help="subdivision points per tree edge")
    g.add_argument("--nodes", type=int, default=10)
    g.add_argument("--r", type=float, default=0.4, help="inner radius or band radius")
    g.add_argument("--R", type=float, default=1.0)
    g.add_argument("--n-boundary", type=int, default=120)
    g.add_argument("--n-interior", type=int, default=1500)
    g.add_argument("--resolution", type=float, default=0.1)
    g.add_argument("--drop-south-pole", action="store_true")
    g.add_argument("--vertices", default="0,0;1,0;1,1;0,1", help="x,y;x,y;...")
    g.add_argument("--length", type=float, default=1.0)
    g.add_argument("--points", type=int, default=2)
    g.add_argument("--k", type=float, default=1.6)
    g.add_argument("--sigma", type=float, default=0.4)
    g.add_argument("--grid", type=int, default=16, help="rings of the Herglotz disk graph")
    g.set_defaults(func=cmd_gen)

    d = sub.add_parser("data", parents=[common], help="travel time CSV of a space file")
    d.add_argument("space")
    d.set_defaults(func=cmd_data)

    for name, func, default_eps in (("check-flie", cmd_check_flie, math.inf),
                                    ("check-blie", cmd_check_blie, math.inf),
                                    ("midpoint", cmd_midpoint, None)):
        c = sub.add_parser(name, parents=[common])
        c.add_argument("space")
        c.add_argument("--eps", type=float, default=default_eps, required=default_eps is None)
        c.add_argument("--tol", type=float, default=None)
        c.set_defaults(func=func)

    h = sub.add_parser("gh", parents=[common], help="Gromov-Hausdorff estimate of two space files")
    h.add_argument("a")
    h.add_argument("b")
    h.add_argument("--exact", action="store_true", help="exact value; fails above --cap points")
    h.add_argument("--eps", type=float, default=None, help="truncate both spaces first")
    h.add_argument("--cap", type=int, default=5)
    h.set_defaults(func=cmd_gh)

    s = sub.add_parser("stability", parents=[common], help="check both stability inequalities")
    s.add_argument("a")
    s.add_argument("b")
    s.add_argument("--eps", type=float, required=True)
    s.add_argument("--diam-bound", type=float, default=None)
    s.add_argument("--tol", type=float, default=None)
    s.add_argument("--cap", type=int, default=5)
    s.set_defaults(func=cmd_stability)

    z = sub.add_parser("herglotz", parents=[common], help="radial Herglotz disk computations")
    z.add_argument("what", choices=["alpha", "conjugates", "intersections", "delta"])
    z.add_argument("--k", type=float, default=1.6)
    z.add_argument("--sigma", type=float, default=0.4)
    z.add_argument("--grid", type=int, default=None)
    z.add_argument("--r0", type=float, nargs="+", default=[0.9])
    z.add_argument("--svg", action="store_true", help="write an illustrative SVG")
    z.add_argument("--expect", type=float, nargs=2, metavar=("LO", "HI"), help="fail unless delta lies in [LO, HI]")
    z.set_defaults(func=cmd_herglotz)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if args.command == "herglotz" and args.grid is None:
        args.grid = {"alpha": 50, "conjugates": 200}.get(args.what, 200)
    try:
        return args.func(args)
    except Fail:
        return FAIL
    except (TTLabError, OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"ttlab: error: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
