"""Command-line entry point: ``surflab <subcommand> ...``.

Reports go to stdout as JSON (sorted keys, ``schema_version`` field); a short
human summary goes to stderr.  Exit codes: 0 definite result, 2 Inconclusive
or Unknown, 1 error, 64 usage error, 74 file I/O error.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import random
import sys
from pathlib import Path

import numpy as np

from . import flows, foliation_calc, laminations
from .generators import FAMILIES, FiniteGraph, make_generator
from .graph_core import SCHEMA_VERSION, GraphView, TruncationTooLarge, boundary_shell
from .potential_theory import edge_function_from_json
from .type_classifier import (
    INCONCLUSIVE,
    classify,
    resistance_profile,
    resolve_exhaustion,
    tree_end_certificate,
    truncate,
    verify_flow_certificate,
)

EXIT_OK, EXIT_ERROR, EXIT_UNDECIDED, EXIT_USAGE, EXIT_IO = 0, 1, 2, 64, 74

# energy of a T3 lift is at most this multiple of the base energy:
# per cluster f^2 + g^2 + h^2 <= 4 e3^2 + 7 e4^2 + 9 e5^2 + 9 e6^2, and each
# grid edge also keeps its own image, so the worst direction (z) gets 4 + 9 + 1.
T3_LIFT_ENERGY_FACTOR = 14.0


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _emit(doc: dict) -> None:
    doc = dict(doc)
    doc["schema_version"] = SCHEMA_VERSION
    sys.stdout.write(json.dumps(doc, sort_keys=True, default=_json_default) + "\n")


def _json_default(x):
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, np.ndarray):
        return x.tolist()
    return str(x)


def _say(msg: str) -> None:
    print(msg, file=sys.stderr)


def _read_json(path):
    return json.loads(Path(path).read_text())


def _radii(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad radii list {text!r}") from None


def _params(text: str) -> dict:
    out = {}
    for item in text.split(","):
        if not item.strip():
            continue
        if "=" not in item:
            raise argparse.ArgumentTypeError(f"expected k=v, got {item!r}")
        k, v = item.split("=", 1)
        try:
            out[k.strip()] = float(v)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{k}: not a number: {v!r}") from None
    return out


def _generator(args):
    if getattr(args, "graph", None):
        return FiniteGraph(GraphView.from_json(Path(args.graph).read_text()))
    if not args.family:
        raise UsageError("give --graph FILE or --family NAME")
    spec = None
    if args.flute_spec:
        spec = _read_json(args.flute_spec) if Path(args.flute_spec).exists() else json.loads(args.flute_spec)
    return make_generator(args.family, args.transform, spec)


def _add_graph_args(p, need_graph_file=True):
    if need_graph_file:
        p.add_argument("--graph", help="graph file (JSON view)")
    p.add_argument("--family", choices=FAMILIES)
    p.add_argument("--transform", choices=("none", "t2", "t3"), default="none")
    p.add_argument("--flute-spec", help="flute-tree ray list (JSON file or inline JSON)")


# ---------------------------------------------------------------------------


def cmd_generate(args) -> int:
    gen = _generator(args)
    view = truncate(gen, args.radius, args.exhaustion)
    text = view.to_json()
    if args.out:
        Path(args.out).write_text(text + "\n")
        _emit({"written": args.out, "vertices": view.n_vertices, "edges": view.n_edges})
    else:
        sys.stdout.write(text + "\n")
    _say(f"{view.family}: radius {view.radius}, {view.n_vertices} vertices, "
         f"{view.n_edges} edges, {int(sum(view.boundary))} on the shell")
    return EXIT_OK


def _builtin_flow(gen, radius):
    """Explicit flow for families that come with one; ``(view, flow, bound)``."""
    fam = gen.family
    if fam == "trivalent":
        view, flow = flows.uniform_tree_flow(radius)
        return view, flow, None
    if fam == "gm-flute":
        view, flow = flows.gm_flute_tree_flow(radius)
        return view, flow, None
    if fam == "z3-t3":
        from .generators import grid
        from .graph_core import build_truncation
        base_view, base, r_eff = flows.base_flow(grid(3), 2 * radius)
        view = build_truncation(gen, radius)
        return view, flows.lift_flow_t3(base_view, base, view), T3_LIFT_ENERGY_FACTOR * r_eff
    if fam in ("z1", "z2", "z3"):
        view, flow, _ = flows.base_flow(gen, radius)
        return view, flow, None
    raise UsageError(f"no built-in flow for family {fam!r}; pass --flow FILE")


def _flow_verdict(args, gen):
    bound = args.energy_bound
    if args.flow:
        if getattr(args, "graph", None):
            view = gen.view
        else:
            view = truncate(gen, args.radius, "ball")
        flow = edge_function_from_json(view, Path(args.flow).read_text())
        if np.any(np.isnan(flow)):
            raise ValueError("flow file leaves some edges undefined")
    else:
        view, flow, auto_bound = _builtin_flow(gen, args.radius)
        bound = bound if bound is not None else auto_bound
    source = args.source if args.source is not None else view.root
    return verify_flow_certificate(None, flow, source, tol=args.flow_tol,
                                   energy_bound=bound, view=view)


def cmd_classify(args) -> int:
    gen = _generator(args)
    if args.method == "profile":
        radii = args.radii or [5, 10, 20, 40]
        prof = resistance_profile(gen, radii, args.exhaustion)
        verdict = classify(prof, args.tol)
        verdict.evidence["exhaustion"] = resolve_exhaustion(gen, args.exhaustion)
        if args.csv:
            with open(args.csv, "w", newline="") as fh:
                w = csv.writer(fh)
                w.writerow(["radius", "r_eff"])
                w.writerows(prof)
    elif args.method == "flow":
        verdict = _flow_verdict(args, gen)
    else:
        spec = None
        if args.end_spec:
            spec = _read_json(args.end_spec) if Path(args.end_spec).exists() else json.loads(args.end_spec)
        verdict = tree_end_certificate(gen, spec, args.radius)
    doc = verdict.to_dict()
    doc["family"] = gen.family
    _emit(doc)
    _say(f"{gen.family}: {verdict.verdict} ({verdict.method}); "
         f"{verdict.evidence.get('reason', '')}")
    return EXIT_UNDECIDED if verdict.verdict == INCONCLUSIVE else EXIT_OK


def cmd_verify_flow(args) -> int:
    gen = _generator(args)
    verdict = _flow_verdict(args, gen)
    _emit(verdict.to_dict())
    _say(f"flow certificate: {verdict.verdict}; {verdict.evidence.get('reason', '')}")
    return EXIT_UNDECIDED if verdict.verdict == INCONCLUSIVE else EXIT_OK


def cmd_lamination_check(args) -> int:
    track = laminations.load_track(args.track)
    w = laminations.load_weights(args.weights)
    ok, viol = laminations.validate_switch_conditions(track, w)
    doc = {"switch_conditions": {"valid": ok, "violations": viol}}
    if not ok:
        _emit(doc)
        _say(f"switch conditions fail at {[v['switch'] for v in viol]}")
        return EXIT_ERROR
    doc["membership"] = laminations.ml_int_membership(track, w)
    if args.curves:
        curves = laminations.curves_from_dicts(_read_json(args.curves))
        doc["l2_equivalence"] = laminations.l2_equivalence_check(track, w, curves)
    _emit(doc)
    res = doc["membership"]["result"]
    _say(f"switch conditions hold; membership: {res} ({doc['membership']['reason']})")
    return EXIT_UNDECIDED if res == laminations.UNKNOWN else EXIT_OK


def cmd_lamination_random(args) -> int:
    rng = random.Random(args.seed)
    track, w = laminations.random_weighted_track(rng, args.switches, args.valence)
    w.complete = True
    _emit({"seed": args.seed, "track": track.to_dict(), "weights": w.to_dict()})
    _say(f"random track: {len(track.branches)} branches, {len(track.switches)} switches")
    return EXIT_OK


def cmd_dirichlet(args) -> int:
    pc = foliation_calc.FoliationPiece(args.piece, args.params)
    cf = foliation_calc.closed_form(pc)
    doc = {"piece": pc.kind, "params": pc.params, "closed_form": cf}
    if pc.kind == "corner":
        doc["transverse_scale"] = pc.aspect
    if args.quadrature:
        q = foliation_calc.quadrature_dirichlet(pc, args.quadrature)
        doc.update(quadrature=q, grid_n=args.quadrature, abs_diff=abs(cf - q))
    _emit(doc)
    msg = f"{pc.kind}: closed form {cf:.10g}"
    if args.quadrature:
        msg += f", quadrature {doc['quadrature']:.10g}, |diff| {doc['abs_diff']:.3g}"
    _say(msg)
    return EXIT_OK


def cmd_dirichlet_solve(args) -> int:
    from .potential_theory import solve_dirichlet, vertex_function_to_json
    gen = _generator(args)
    view = truncate(gen, args.radius, args.exhaustion) if not args.graph else gen.view
    sol = solve_dirichlet(view, view.root, boundary_shell(view))
    _emit({"r_eff": sol.r_eff, "iterations": sol.iterations, "residual": sol.residual,
           "potentials": json.loads(vertex_function_to_json(view, sol.potentials))})
    _say(f"r_eff = {sol.r_eff:.12g} ({view.n_vertices} vertices)")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="surflab", description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=0, help="seed for randomized helpers")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("generate", help="write a truncation as a graph file")
    _add_graph_args(g, need_graph_file=False)
    g.add_argument("--radius", type=int, required=True)
    g.add_argument("--exhaustion", choices=("auto", "ball", "cluster"), default="ball")
    g.add_argument("--out")
    g.set_defaults(func=cmd_generate)

    c = sub.add_parser("classify", help="recurrent / transient verdict")
    _add_graph_args(c)
    c.add_argument("--method", choices=("profile", "flow", "tree"), required=True)
    c.add_argument("--radii", type=_radii)
    c.add_argument("--tol", type=float, default=0.02)
    c.add_argument("--exhaustion", choices=("auto", "ball", "cluster"), default="auto")
    c.add_argument("--csv", help="also write the resistance profile as CSV")
    c.add_argument("--flow", help="edge function file for --method flow")
    c.add_argument("--radius", type=int, default=10, help="truncation radius for flow/tree")
    c.add_argument("--source", type=int)
    c.add_argument("--flow-tol", type=float, default=1e-10)
    c.add_argument("--energy-bound", type=float)
    c.add_argument("--end-spec", help="ray list to check against the flute tree")
    c.set_defaults(func=cmd_classify)

    f = sub.add_parser("verify-flow", help="check a flow certificate")
    _add_graph_args(f)
    f.add_argument("--flow")
    f.add_argument("--radius", type=int, default=10)
    f.add_argument("--source", type=int)
    f.add_argument("--flow-tol", "--tol", dest="flow_tol", type=float, default=1e-10)
    f.add_argument("--energy-bound", type=float)
    f.set_defaults(func=cmd_verify_flow)

    lam = sub.add_parser("lamination", help="train-track weight checks")
    lsub = lam.add_subparsers(dest="lam_command", required=True, parser_class=_Parser)
    lc = lsub.add_parser("check")
    lc.add_argument("--track", required=True)
    lc.add_argument("--weights", required=True)
    lc.add_argument("--curves")
    lc.set_defaults(func=cmd_lamination_check)
    lr = lsub.add_parser("random", help="random valid track and weights")
    lr.add_argument("--switches", type=int, default=20)
    lr.add_argument("--valence", type=int, default=3)
    lr.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    lr.set_defaults(func=cmd_lamination_random)

    d = sub.add_parser("dirichlet", help="foliation-piece energies or a graph Dirichlet solve")
    d.add_argument("--piece", choices=foliation_calc.KINDS)
    d.add_argument("--params", type=_params, default={})
    d.add_argument("--quadrature", type=int, metavar="N")
    _add_graph_args(d)
    d.add_argument("--radius", type=int, default=5)
    d.add_argument("--exhaustion", choices=("auto", "ball", "cluster"), default="auto")
    d.set_defaults(func=cmd_dirichlet_dispatch)
    return ap


def cmd_dirichlet_dispatch(args) -> int:
    if args.piece:
        return cmd_dirichlet(args)
    if args.family or args.graph:
        return cmd_dirichlet_solve(args)
    raise UsageError("dirichlet needs --piece or a graph (--family/--graph)")


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except UsageError as exc:
        ap.print_usage(sys.stderr)
        _say(f"surflab: error: {exc}")
        return EXIT_USAGE
    except OSError as exc:
        _emit({"error": str(exc), "kind": "io"})
        _say(f"surflab: I/O error: {exc}")
        return EXIT_IO
    except TruncationTooLarge as exc:
        _emit({"error": str(exc), "kind": "resource"})
        _say(f"surflab: {exc} (raise SURFLAB_MAX_VERTICES to allow more)")
        return EXIT_ERROR
    except (ValueError, KeyError, RuntimeError, AssertionError) as exc:
        _emit({"error": str(exc), "kind": type(exc).__name__})
        _say(f"surflab: error: {exc}")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
