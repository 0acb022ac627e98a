"""Command-line entry point: ``quadlab <command> ...``.

Exit codes: 0 success, 1 invariant failure, 2 input error.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import InputError, ModulusOutOfRange, QuadlabError

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


def _load(path):
    from .geom_core import quad_from_json

    text = sys.stdin.read() if path in (None, "-") else Path(path).read_text(encoding="utf-8")
    return quad_from_json(json.loads(text))


def _emit(args, payload, csv_text=None, svg_text=None):
    fmt = getattr(args, "format", "json")
    if fmt == "svg" and svg_text is not None:
        text = svg_text
    elif fmt == "csv" and csv_text is not None:
        text = csv_text
    else:
        text = json.dumps(payload, indent=1, sort_keys=True) + "\n"
    if args.output and args.output != "-":
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _csv(rows: list[dict]) -> str:
    import csv
    import io

    if not rows:
        return ""
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


def cmd_modulus(args):
    from .modulus import compute_modulus, modulus_extrapolated

    Q = _load(args.input)
    if args.levels > 1:
        hs = [args.h * 2 ** (args.levels - 1 - k) for k in range(args.levels)]
        res = modulus_extrapolated(Q, hs, tol=args.tol)
    else:
        res = compute_modulus(Q, args.h, tol=args.tol)
    _emit(args, res.to_json(), _csv([{"h": h, "M": m} for h, m in res.levels]))
    return EXIT_OK


def cmd_distances(args):
    from .internal_distance import ExclusionSpec, geodesic_between_sides, truncated_internal_distance

    Q = _load(args.input)
    out = {}
    for pair in "AB":
        out[pair] = geodesic_between_sides(Q, pair).to_json()
        if args.delta is not None:
            out[pair + "_truncated"] = truncated_internal_distance(Q, pair, ExclusionSpec(args.delta)).to_json()
    rows = [{"pair": k, "length": v["length"]} for k, v in out.items()]
    svg = None
    if args.format == "svg":
        from .render import Scene, render_svg

        svg = render_svg(Scene.from_quad(Q, geodesics=[geodesic_between_sides(Q, p).path for p in "AB"]))
    _emit(args, out, _csv(rows), svg)
    return EXIT_OK


def cmd_rectify(args):
    from .rectification import GridSpec, rectify, rectify_to_tolerance
    from .render import Scene, render_svg

    Q = _load(args.input)
    if args.s is not None:
        res = rectify(Q, GridSpec(args.s, *(args.origin or (0.0, 0.0))))
    else:
        res = rectify_to_tolerance(Q, args.tau)
    payload = res.to_json()
    s = res.s_used
    cells = [(res.grid.ox + i * s, res.grid.oy + j * s, s) for i, j in sorted(res.cover)]
    svg = render_svg(Scene.from_quad(Q, cells=cells, outline=res.quad.polygon.xy))
    if args.svg:
        Path(args.svg).write_text(svg, encoding="utf-8")
    _emit(args, payload, None, svg)
    ok = res.achieved_tau <= args.tau if args.s is None else True
    return EXIT_OK if ok else EXIT_FAIL


def cmd_inscribe(args):
    from .disk_placement import largest_inscribed_disk

    d = largest_inscribed_disk(_load(args.input))
    _emit(args, d.to_json(), _csv([d.to_json() | {"center": f"{d.center.x} {d.center.y}"}]))
    return EXIT_OK


def cmd_verify(args):
    from .disk_placement import verify_theorem
    from .render import Scene, render_svg

    Q = _load(args.input)
    if args.K is not None:
        rep = verify_theorem(Q, "from_K", K=args.K)
    else:
        rep = verify_theorem(Q, "from_L", L=args.L)
    payload = rep.to_json()
    if args.svg or args.format == "svg":
        from .disk_placement import build_arc_frame, split_disk
        from .errors import QuadlabError as _QE
        from .modulus import conjugate

        f = rep.found
        c = rep.constants
        target = Q if c["applied_to"] == "Q" else conjugate(Q)
        frame = build_arc_frame(target, c["L"], (max(c["s_a"], c["s_b"]), min(c["s_a"], c["s_b"])))
        w0 = frame.point_at(frame.length / 2)
        disks = [(w0[0], w0[1], frame.R, "D(w0,R)"), (f.center.x, f.center.y, f.radius, "found")]
        if rep.largest:
            disks.append((rep.largest.center.x, rep.largest.center.y, rep.largest.radius, "largest"))
        try:
            sd = split_disk(target, frame, frame.length / 2)
            comps = [sd.Dplus, sd.Dminus]
        except _QE:
            comps = []
        svg = render_svg(Scene.from_quad(Q, geodesics=[frame.C], disks=disks, components=comps))
        if args.svg:
            Path(args.svg).write_text(svg, encoding="utf-8")
    else:
        svg = None
    _emit(args, payload, None, svg)
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_generate(args):
    from .generators import GeneratorParams, generate_random_rectilinear
    from .render import Scene, render_svg

    Q = generate_random_rectilinear(GeneratorParams(args.seed, args.n, args.cells, args.marks))
    _emit(args, Q.to_json(), None, render_svg(Scene.from_quad(Q)))
    return EXIT_OK


def cmd_pinch(args):
    from .generators import PinchParams, pinch_family, pinch_window_check
    from .modulus import rengel_bounds
    from .render import Scene, render_svg

    Q, meta = pinch_family(PinchParams(t=args.t, delta_test=args.delta))
    rb = rengel_bounds(meta["s_a"], meta["s_b"])
    payload = {"quad": Q.to_json(), "meta": meta, "rengel": [rb.lower, rb.upper]}
    code = EXIT_OK
    if args.check:
        rows = pinch_window_check(Q, meta)
        payload["window_check"] = rows
        code = EXIT_OK if all(r["ok"] for r in rows) else EXIT_FAIL
    _emit(args, payload, None, render_svg(Scene.from_quad(Q)))
    return code


def cmd_batch(args):
    from .batch import run_batch

    cfg_path = Path(args.config)
    config = json.loads(cfg_path.read_text(encoding="utf-8"))
    rep = run_batch(config, args.output_dir, base=cfg_path.parent)
    text = rep.to_csv() if args.format == "csv" else json.dumps(rep.aggregates, indent=1, sort_keys=True) + "\n"
    sys.stdout.write(text)
    return EXIT_OK if rep.ok else EXIT_FAIL


def cmd_render(args):
    from .internal_distance import geodesic_between_sides
    from .render import Scene, render_svg

    Q = _load(args.input)
    layers = set(filter(None, (args.layers or "").split(",")))
    geos = [geodesic_between_sides(Q, p).path for p in "AB" if f"geodesic{p}" in layers or "geodesics" in layers]
    disks = []
    if "disk" in layers:
        from .disk_placement import largest_inscribed_disk

        d = largest_inscribed_disk(Q)
        disks.append((d.center.x, d.center.y, d.radius, "largest"))
    svg = render_svg(Scene.from_quad(Q, geodesics=geos, disks=disks))
    if args.output and args.output != "-":
        Path(args.output).write_text(svg, encoding="utf-8")
    else:
        sys.stdout.write(svg)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="quadlab", description="Marked quadrilaterals: distances, moduli, disks.")
    sub = p.add_subparsers(dest="command", required=True)

    def add_input(sp):
        sp.add_argument("input", nargs="?", help="quad JSON (default stdin)")
        sp.add_argument("--input", "-i", dest="input_flag", help="same as the positional input")

    def common(sp, formats=("json",)):
        sp.add_argument("--output", "-o", help="output file (default stdout)")
        sp.add_argument("--format", choices=formats, default=formats[0])

    sp = sub.add_parser("modulus", help="conformal modulus of a rectilinear quadrilateral")
    add_input(sp)
    sp.add_argument("--h", type=float, required=True, help="finest grid step")
    sp.add_argument("--levels", type=int, default=1, help="number of halving levels ending at --h")
    sp.add_argument("--tol", type=float, default=1e-10)
    common(sp, ("json", "csv"))
    sp.set_defaults(func=cmd_modulus)

    sp = sub.add_parser("distances", help="internal distances s_a, s_b (and truncated variants)")
    add_input(sp)
    sp.add_argument("--delta", type=float)
    common(sp, ("json", "csv", "svg"))
    sp.set_defaults(func=cmd_distances)

    sp = sub.add_parser("rectify", help="rectilinear grid approximation")
    add_input(sp)
    sp.add_argument("--tau", type=float, default=0.1)
    sp.add_argument("--s", type=float, help="fixed grid side (skips the halving loop)")
    sp.add_argument("--origin", type=float, nargs=2)
    sp.add_argument("--svg", help="also write the SVG overlay here")
    common(sp, ("json", "svg"))
    sp.set_defaults(func=cmd_rectify)

    sp = sub.add_parser("inscribe", help="largest inscribed disk")
    add_input(sp)
    common(sp, ("json", "csv"))
    sp.set_defaults(func=cmd_inscribe)

    sp = sub.add_parser("verify", help="disk-of-radius theorem check")
    add_input(sp)
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--L", type=float)
    g.add_argument("--K", type=float)
    sp.add_argument("--svg")
    common(sp, ("json", "svg"))
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("generate", help="random rectilinear quadrilateral")
    sp.add_argument("--seed", type=int, default=1)
    sp.add_argument("--n", type=int, default=16)
    sp.add_argument("--cells", type=int, default=60)
    sp.add_argument("--marks", choices=("quantile", "corners"), default="quantile")
    common(sp, ("json", "svg"))
    sp.set_defaults(func=cmd_generate)

    sp = sub.add_parser("pinch", help="pinch-family instance")
    sp.add_argument("--t", type=float, default=1.0)
    sp.add_argument("--delta", type=float, default=0.002)
    sp.add_argument("--check", action="store_true", help="run the window disk check")
    common(sp, ("json", "svg"))
    sp.set_defaults(func=cmd_pinch)

    sp = sub.add_parser("batch", help="run a corpus config")
    sp.add_argument("config")
    sp.add_argument("--output-dir", "-d", default="quadlab-report")
    sp.add_argument("--format", choices=("json", "csv"), default="json")
    sp.set_defaults(func=cmd_batch)

    sp = sub.add_parser("render", help="SVG of a quadrilateral")
    add_input(sp)
    sp.add_argument("--layers", help="comma list: geodesics,geodesicA,geodesicB,disk")
    sp.add_argument("--output", "-o")
    sp.set_defaults(func=cmd_render)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "input_flag", None):
        args.input = args.input_flag
    try:
        return args.func(args)
    except (InputError, json.JSONDecodeError, OSError, ValueError, KeyError, TypeError) as exc:
        print(f"quadlab: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ModulusOutOfRange as exc:
        print(f"quadlab: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except QuadlabError as exc:
        print(f"quadlab: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
