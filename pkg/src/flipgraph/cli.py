"""Command-line front end.  Exit status: 0 success or Same, 2 Different, 1 error."""
from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path

import networkx as nx

from . import io
from .arcs import Arc
from .combing import comb_along
from .connectivity import (color_decomposition, construct_path, decide_same_component,
                           different_threshold, flip_distance_bounds, lower_bound_display,
                           mutual_intersection_bound)
from .errors import FlipGraphError
from .flips import bfs_ball, bfs_geodesic
from .infinite import (Affine, Constant, Explicit, PeriodicTriangulation, build_flute,
                       decide_component_profiles)
from .quads import apply_simultaneous_flip
from .triangulation import Triangulation, euler_characteristics, generator_polygon, punctured_torus

EXIT_OK, EXIT_ERROR, EXIT_DIFFERENT = 0, 1, 2


def _read(path: str) -> str:
    return sys.stdin.read() if path == "-" else Path(path).read_text()


def _load(path: str):
    text = _read(path)
    return io.parse_tri(text), text


def _finite(obj, path) -> Triangulation:
    if not isinstance(obj, Triangulation):
        raise FlipGraphError(f"{path}: a finite triangulation is required here")
    return obj


def _pair(args) -> tuple[Triangulation, Triangulation, dict]:
    S, s_text = _load(args.first)
    S = _finite(S, args.first)
    inputs = {"first": io.digest(s_text)}
    if args.flips is not None:
        T = S
        for m in io.parse_moves(args.flips, S):
            T = apply_simultaneous_flip(T, m)
        inputs["flips"] = args.flips
    elif args.second is not None:
        T, t_text = _load(args.second)
        T = _finite(T, args.second)
        inputs["second"] = io.digest(t_text)
    else:
        raise FlipGraphError("give a second triangulation or --flips")
    return S, T, inputs


def _emit(report: dict, started: float) -> None:
    report["timings"] = {"seconds": round(time.perf_counter() - started, 4)}
    sys.stdout.write(io.emit_report(report))


# ---------------------------------------------------------------- subcommands

def cmd_validate(args) -> int:
    obj, text = _load(args.file)
    rep = {"command": "validate", "inputs": {"file": io.digest(text)}, "valid": True}
    if isinstance(obj, PeriodicTriangulation):
        W = obj.window(0, 0)
        rep.update(kind="periodic", triangles_per_cell=obj.triangles_per_cell,
                   vertex_classes=obj.vertex_classes, cell_edges=W.num_edges,
                   has_core_curve=bool(obj.core))
    else:
        chi, _ = euler_characteristics(obj)
        rep.update(kind="finite", triangles=obj.num_triangles, edges=obj.num_edges,
                   vertices=obj.num_vertices, boundary_edges=len(obj.boundary_sides),
                   euler_characteristic=chi, labelled_polygon=obj.is_labeled_disk())
    _emit(rep, args.started)
    return EXIT_OK


def cmd_bounds(args) -> int:
    lower, upper = flip_distance_bounds(args.k)
    _emit({"command": "bounds", "K": args.k, "lower": lower,
           "lower_log_form": lower_bound_display(args.k)[0], "upper": upper}, args.started)
    return EXIT_OK


def cmd_distance(args) -> int:
    S, T, inputs = _pair(args)
    rep = {"command": "distance", "inputs": inputs}
    if args.bounds:
        K = mutual_intersection_bound(S, T)
        lower, upper = flip_distance_bounds(K)
        rep.update(K=K, lower=lower, lower_log_form=lower_bound_display(K)[0], upper=upper)
    else:
        chain = bfs_geodesic(S, T, cutoff=args.cutoff)
        rep.update(distance=len(chain) - 1,
                   certificate=[[Y.parent.edge_names[e] for e in Y.move] for Y in chain[1:]])
    _emit(rep, args.started)
    return EXIT_OK


def cmd_path(args) -> int:
    S, T, inputs = _pair(args)
    built = construct_path(T, S, detailed=True)
    cert = built.certificate
    rep = {"command": "path", "inputs": inputs, "K": built.K, "length": len(cert),
           "upper": flip_distance_bounds(built.K)[1], "colors_used": built.colors.colors_used,
           "stages": [{"color": r.color, "moves": r.moves, "subsurface_triangles": list(r.subsurface_sizes)}
                      for r in built.stages],
           "certificate": io.certificate_to_json(cert)}
    _emit(rep, args.started)
    return EXIT_OK


def cmd_verify(args) -> int:
    import json
    obj = json.loads(_read(args.file))
    cert = obj.get("certificate", obj) if isinstance(obj, dict) else obj
    ok = isinstance(cert, dict) and io.verify_certificate_json(cert)
    _emit({"command": "verify", "verdict": "valid" if ok else "invalid",
           "moves": len(cert.get("moves", [])) if isinstance(cert, dict) else 0}, args.started)
    return EXIT_OK if ok else EXIT_ERROR


def _orient(named: list[tuple[str, Arc]], text: str, T: Triangulation) -> list[Arc]:
    if text == "forward":
        return [a for _, a in named]
    if text == "reverse":
        return [a.reversed(T) for _, a in named]
    flip = set(text.split(","))
    unknown = flip - {n for n, _ in named}
    if unknown:
        raise FlipGraphError(f"--orient names unknown arcs: {sorted(unknown)}")
    return [a.reversed(T) if n in flip else a for n, a in named]


def cmd_comb(args) -> int:
    T, t_text = _load(args.file)
    T = _finite(T, args.file)
    a_text = _read(args.along)
    named = io.parse_named_arcs(a_text, T)
    mu = _orient(named, args.orient, T)
    res = comb_along(T, mu)
    images = {T.edge_names[e]: io.serialize_arcs(arcs, T).splitlines() for e, arcs in sorted(res.arc_images.items())}
    rep = {"command": "comb", "inputs": {"triangulation": io.digest(t_text), "arcs": io.digest(a_text),
                                         "orient": args.orient},
           "moves": len(res.certificate), "images": images,
           "projected": io.serialize_tri(res.projected),
           "certificate": io.certificate_to_json(res.certificate)}
    _emit(rep, args.started)
    return EXIT_OK


def cmd_color(args) -> int:
    S, T, inputs = _pair(args)
    dec = color_decomposition(S, T, args.k)
    _emit({"command": "color", "inputs": inputs, "K": args.k, "colors_used": dec.colors_used,
           "bound": 2 * 3 ** args.k - 1,
           "assignment": {S.edge_names[e]: c for e, c in sorted(dec.assignment.items())}}, args.started)
    return EXIT_OK


def _witness_rows(witness, n_max: int) -> list[dict]:
    rows = []
    for N in range(1, n_max + 1):
        k = different_threshold(N)
        (_, (cell, _arc), value), = witness.witnesses([k])
        rows.append({"N": N, "threshold": k, "cell": cell, "intersection": value})
    return rows


def _decision_report(dec, inputs, n_max: int) -> dict:
    rep = {"command": "component", "inputs": inputs, "verdict": dec.verdict}
    if dec.verdict == "Different":
        rep["witnesses"] = _witness_rows(dec.evidence, n_max)
    else:
        rep["K"] = dec.bound
        rep["upper"] = flip_distance_bounds(dec.bound)[1]
        ev = dec.evidence
        if hasattr(ev, "window_certificate"):
            cert = ev.window_certificate(1)
            rep["finite_support"] = ev.finite_support
            rep["window"] = [-1, 1]
            rep["window_certificate"] = io.certificate_to_json(cert)
        else:
            rep["length"] = len(ev)
            rep["certificate"] = io.certificate_to_json(ev)
    return rep


def cmd_component(args) -> int:
    texts = [_read(args.first), _read(args.second)]
    inputs = {"first": io.digest(texts[0]), "second": io.digest(texts[1])}
    if all(t.lstrip().startswith("profile") for t in texts):
        pattern = build_flute()
        if args.pattern:
            ptext = _read(args.pattern)
            pattern = io.parse_tri(ptext)
            inputs["pattern"] = io.digest(ptext)
        dec = decide_component_profiles(pattern, io.parse_profile(texts[0]), io.parse_profile(texts[1]))
    else:
        S, T = (_finite(io.parse_tri(t), p) for t, p in zip(texts, (args.first, args.second)))
        dec = decide_same_component(S, T)
    _emit(_decision_report(dec, inputs, args.witness_max), args.started)
    return EXIT_DIFFERENT if dec.verdict == "Different" else EXIT_OK


def _dot(G: nx.Graph, reps: dict) -> str:
    index = {k: i for i, k in enumerate(sorted(G.nodes, key=lambda k: (G.nodes[k]["dist"], sorted(map(str, k)))))}
    lines = ["graph flips {"]
    for k, i in sorted(index.items(), key=lambda kv: kv[1]):
        X = reps[k]
        if X.is_labeled_disk():
            label = " ".join(sorted("-".join(sorted(p)) for p in X.diagonals()))
        else:
            label = f"d={G.nodes[k]['dist']}"
        lines.append(f'  n{i} [label="{label}"];')
    for a, b in sorted((min(index[u], index[v]), max(index[u], index[v])) for u, v in G.edges):
        lines.append(f"  n{a} -- n{b};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def cmd_enumerate(args) -> int:
    if args.polygon is not None:
        S, radius, what = generator_polygon(args.polygon), args.radius, f"polygon {args.polygon}"
    else:
        S, radius, what = punctured_torus(), args.radius if args.radius is not None else 3, "punctured torus"
    G, reps = bfs_ball(S, radius=radius, simultaneous=not args.single)
    if args.dot:
        sys.stdout.write(_dot(G, reps))
        return EXIT_OK
    rep = {"command": "enumerate", "surface": what, "radius": radius,
           "simultaneous": not args.single, "states": G.number_of_nodes(), "edges": G.number_of_edges(),
           "max_degree": max((d for _, d in G.degree), default=0), "is_tree": nx.is_tree(G)}
    if radius is None:
        rep["diameter"] = nx.diameter(G)
    _emit(rep, args.started)
    return EXIT_OK


def cmd_demo(args) -> int:
    P = build_flute()
    rows = []
    for p, q in ((Constant(0), Explicit([3], Constant(0))), (Constant(0), Affine(1, 0)),
                 (Affine(1, 0), Affine(2, 0)), (Constant(0), Affine(2, 0))):
        dec = decide_component_profiles(P, p, q)
        row = {"first": repr(p), "second": repr(q), "verdict": dec.verdict}
        if dec.verdict == "Different":
            row["witnesses"] = _witness_rows(dec.evidence, args.n_max)
        else:
            cert = dec.evidence.window_certificate(1)
            row.update(K=dec.bound, window_path_length=len(cert),
                       upper=flip_distance_bounds(dec.bound)[1])
        rows.append(row)
    _emit({"command": "demo twist-family", "pattern": io.serialize_tri(P), "decisions": rows}, args.started)
    return EXIT_OK


# ---------------------------------------------------------------- parser

def _pair_args(p):
    p.add_argument("first", help="TRI file (the start)")
    p.add_argument("second", nargs="?", help="TRI file (the target)")
    p.add_argument("--flips", help="target = start after these moves, e.g. 'a b; c'")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="flipgraph", description=__doc__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a TRI file")
    p.add_argument("file")
    p.set_defaults(run=cmd_validate)

    p = sub.add_parser("bounds", help="distance bounds for a mutual intersection bound K")
    p.add_argument("--k", type=int, required=True)
    p.set_defaults(run=cmd_bounds)

    p = sub.add_parser("distance", help="exact distance or bounds")
    _pair_args(p)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--exact", action="store_true", default=True)
    g.add_argument("--bounds", action="store_true")
    p.add_argument("--cutoff", type=int, default=32)
    p.set_defaults(run=cmd_distance)

    p = sub.add_parser("path", help="staged flip path with certificate")
    _pair_args(p)
    p.set_defaults(run=cmd_path)

    p = sub.add_parser("verify", help="replay a certificate")
    p.add_argument("file")
    p.set_defaults(run=cmd_verify)

    p = sub.add_parser("comb", help="comb a triangulation along an oriented multiarc")
    p.add_argument("file")
    p.add_argument("--along", required=True, help="ARC file")
    p.add_argument("--orient", default="forward", help="forward, reverse, or comma-separated arc ids to reverse")
    p.set_defaults(run=cmd_comb)

    p = sub.add_parser("color", help="coloring decomposition of the first triangulation's edges")
    _pair_args(p)
    p.add_argument("--k", type=int, required=True)
    p.set_defaults(run=cmd_color)

    p = sub.add_parser("component", help="same connected component? (TRI or PROFILE files)")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("--pattern", help="periodic TRI file for PROFILE inputs (default: flute)")
    p.add_argument("--witness-max", type=int, default=4, help="witnesses for N = 1..this")
    p.set_defaults(run=cmd_component)

    p = sub.add_parser("enumerate", help="breadth-first flip graph exploration")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--polygon", type=int)
    g.add_argument("--punctured-torus", action="store_true")
    p.add_argument("--radius", type=int)
    p.add_argument("--single", action="store_true", help="single flips only")
    p.add_argument("--dot", action="store_true", help="emit DOT instead of a report")
    p.set_defaults(run=cmd_enumerate)

    p = sub.add_parser("demo", help="demonstrations")
    p.add_argument("which", choices=["twist-family"])
    p.add_argument("--n-max", type=int, default=4)
    p.set_defaults(run=cmd_demo)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    args.started = time.perf_counter()
    try:
        return args.run(args)
    except (FlipGraphError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
