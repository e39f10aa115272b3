"""Command line entry point.

Exit codes: 0 success, 1 verification found violations, 2 usage or input error.
"""

import argparse
import json
import logging
import os
import sys

import numpy as np

from .body import equilateral_cones, make_disk_approx, tri_partition, tri_partition_cones
from .cones import build_multidigraph
from .essw import PAPER, PRACTICAL, dominate, paper_constants, practical_params, verify_domination
from .exceptions import ThreeColorError
from .fileio import emit_svg, perturb_points, points_to_csv, read_body, read_colors, read_digraph, read_points_csv
from .generators import SHAPES, build_Hkl, check_not_two_colorable, random_points
from .oracle import enumerate_cone_ranges, enumerate_translate_ranges, verify_coloring
from .pipeline import PipelineConfig, color_points, cone_color_points
from .polychromatic import RangeHypergraph

OK, VIOLATIONS, ERROR = 0, 1, 2


def _r_value(text):
    if text == "auto":
        return text
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError("r must be positive or 'auto'")
    return value


def _add_essw_flags(p):
    p.add_argument("--mode", choices=(PRACTICAL, PAPER), default=PRACTICAL)
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--g", type=int, default=None, help="sample cap per set (default: the proof's g)")
    p.add_argument("--max-retries", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)


def build_parser():
    parser = argparse.ArgumentParser(prog="threecolor", description="Three-colorings for translates of convex polygons.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("color", help="color a point set")
    p.add_argument("--points", required=True)
    p.add_argument("--body", help="body JSON; default is a 180-gon unit disk")
    p.add_argument("--ranges", choices=("translates", "cones"), default="translates")
    p.add_argument("--m", type=int, default=13)
    p.add_argument("--r", type=_r_value, default="auto")
    p.add_argument("--svg")
    p.add_argument("--out")
    p.add_argument("--perturb", type=float, default=None, help="jitter magnitude; 0 disables")
    _add_essw_flags(p)

    p = sub.add_parser("verify", help="check a coloring against all ranges")
    p.add_argument("--points", required=True)
    p.add_argument("--body")
    p.add_argument("--ranges", choices=("translates", "cones"), default="translates")
    p.add_argument("--colors", required=True)
    p.add_argument("--m", type=int, required=True)

    p = sub.add_parser("dominate", help="disjoint dominating sets of a complete multidigraph")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--digraph")
    src.add_argument("--points")
    p.add_argument("--body", help="take cones from the body's tri-partition instead of the equilateral set")
    p.add_argument("--k", type=int, default=None, help="expected number of arc classes")
    p.add_argument("--l", type=int, default=2)
    _add_essw_flags(p)

    p = sub.add_parser("gen-hkl", help="emit the red/blue hypergraph H(k, l)")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--l", type=int, required=True)
    p.add_argument("--check", action="store_true", help="also run the exhaustive 2-coloring scan")

    p = sub.add_parser("gen-points", help="emit a random point set as CSV")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--shape", choices=SHAPES, default="uniform-square")
    p.add_argument("--sigma", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")

    p = sub.add_parser("constants", help="print the domination constants for (k, l)")
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--l", type=int, default=2)
    return parser


def _seed(args):
    env = os.environ.get("COLOR3_SEED")
    return int(env) if env not in (None, "") else getattr(args, "seed", 0)


def _body(path):
    return make_disk_approx(1.0, 180) if path is None else read_body(path)


def _essw(args, k=3, l=2):
    if args.mode == PAPER:
        return paper_constants(k, l, max_retries=args.max_retries)
    return practical_params(k, l, delta=args.delta, g=args.g, max_retries=args.max_retries)


def _emit(obj, path=None):
    text = json.dumps(obj, indent=2)
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def cmd_color(args):
    P = read_points_csv(args.points)
    meta = {}
    if args.perturb != 0:
        P, meta = perturb_points(P, args.perturb, seed=_seed(args))
    config = PipelineConfig(m=args.m, mode=args.mode, essw=_essw(args), r=args.r, seed=_seed(args))
    if args.ranges == "cones":
        result = cone_color_points(P, equilateral_cones(), config)
    else:
        body = _body(args.body)
        result = color_points(P, body, config)
    out = result.to_json()
    out.update(meta)
    _emit(out, args.out)
    if args.svg:
        grid = result.r if np.isfinite(result.r) else None
        emit_svg(P, result.coloring, args.svg, grid=grid)
    return OK if result.ok else VIOLATIONS


def cmd_verify(args):
    P = read_points_csv(args.points)
    colors = read_colors(args.colors)
    if len(colors) != len(P):
        raise ValueError(f"{len(colors)} colors for {len(P)} points")
    if args.ranges == "cones":
        hs = [enumerate_cone_ranges(P, K) for K in equilateral_cones()]
        h = RangeHypergraph(len(P), np.vstack([x.masks for x in hs]), sum((x.tags for x in hs), []))
    else:
        h = enumerate_translate_ranges(P, _body(args.body))
    report = verify_coloring(h, colors, args.m)
    out = report.to_json()
    out["ranges"] = h.n_edges
    out["m"] = args.m
    _emit(out)
    return OK if report.ok else VIOLATIONS


def cmd_dominate(args):
    if args.digraph:
        D = read_digraph(args.digraph)
    else:
        P = read_points_csv(args.points)
        cones = tri_partition_cones(tri_partition(read_body(args.body))) if args.body else equilateral_cones()
        D = build_multidigraph(P, cones)
    if args.k is not None and args.k != D.k:
        raise ValueError(f"--k {args.k} but the digraph has {D.k} arc classes")
    params = _essw(args, k=D.k, l=args.l)
    fam = dominate(D, params, seed=_seed(args))
    report = verify_domination(D, fam, params.l)
    out = fam.to_json()
    out["params"] = params.to_json()
    out["ok"] = report.ok
    _emit(out)
    return OK if report.ok else VIOLATIONS


def cmd_gen_hkl(args):
    h = build_Hkl(args.k, args.l)
    out = h.to_json()
    if args.check:
        out["not_two_colorable"], _ = check_not_two_colorable(h)
    _emit(out)
    return OK


def cmd_gen_points(args):
    text = points_to_csv(random_points(args.n, args.shape, _seed(args), sigma=args.sigma))
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return OK


def cmd_constants(args):
    params = paper_constants(args.k, args.l)
    _emit(params.to_json())
    return OK


COMMANDS = {
    "color": cmd_color,
    "verify": cmd_verify,
    "dominate": cmd_dominate,
    "gen-hkl": cmd_gen_hkl,
    "gen-points": cmd_gen_points,
    "constants": cmd_constants,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return OK if exc.code == 0 else ERROR
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (ThreeColorError, ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return ERROR


if __name__ == "__main__":
    sys.exit(main())
