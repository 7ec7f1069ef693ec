"""Command-line entry point: ``fareybary <subcommand> ...``.

Numbers are read and written as exact fractions ``p/q``.  ``--json`` switches
to JSON output and ``--approx D`` prints D-digit decimals instead of fractions.
Failures print one line ``error: <Kind>: <message>`` on stderr and exit 2.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import continuous, harness, periodicity, weighted
from .errors import FareyBaryError
from .minkowski import ApproxReal, interval_trace, question_mark, question_mark_inverse
from .projective import to_fraction
from .render import RenderSpec, render_partition


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _num(q, approx=None):
    q = Fraction(q)
    if approx is None:
        return str(q)
    from decimal import Decimal, localcontext

    with localcontext() as ctx:
        ctx.prec = approx + 20
        d = Decimal(q.numerator) / Decimal(q.denominator)
        return f"{d:.{approx}f}"


def _pt(p, approx=None):
    return f"{_num(p[0], approx)} {_num(p[1], approx)}"


def _emit(args, text, payload):
    if args.json:
        print(json.dumps(payload, sort_keys=True))
    else:
        print(text)


def _weights(text):
    return weighted.Weights.parse(text)


# -- subcommands -----------------------------------------------------------------

def cmd_qm(args):
    v = question_mark(to_fraction(args.x))
    _emit(args, _num(v, args.approx), {"x": str(to_fraction(args.x)), "qm": str(v)})


def cmd_qm_inv(args):
    v = question_mark_inverse(to_fraction(args.d))
    _emit(args, _num(v, args.approx), {"d": str(to_fraction(args.d)), "x": str(v)})


def cmd_qm_trace(args):
    x = to_fraction(args.x)
    if args.radius:
        x = ApproxReal(x, to_fraction(args.radius))
    tr = interval_trace(x, args.depth)
    rows = [
        {
            "depth": lv.farey.depth,
            "farey": [str(lv.farey.left), str(lv.farey.right)],
            "bary": [str(lv.bary.left), str(lv.bary.right)],
            "ratio": str(lv.ratio),
        }
        for lv in tr.levels
    ]
    lines = [
        f"{r['depth']} {r['farey'][0]} {r['farey'][1]} {r['bary'][0]} {r['bary'][1]} {_num(Fraction(r['ratio']), args.approx)}"
        for r in rows
    ]
    if tr.boundary is not None:
        lines.append(f"boundary {tr.boundary}")
    _emit(args, "\n".join(lines), {"levels": rows, "boundary": tr.boundary})


def _delta_payload(res):
    return {
        "point": [str(res.point.x), str(res.point.y)],
        "exact": res.exact,
        "error": str(res.error),
        "depth": res.depth,
    }


def cmd_wdelta(args):
    res = weighted.delta_weighted((to_fraction(args.x), to_fraction(args.y)), args.weights, to_fraction(args.tol))
    _emit(args, _pt(res.point, args.approx), _delta_payload(res))


def cmd_cdelta(args):
    res = continuous.delta_continuous((to_fraction(args.x), to_fraction(args.y)), to_fraction(args.tol))
    _emit(args, _pt(res.point, args.approx), _delta_payload(res))


def _encoding_text(runs, boundary):
    text = " ".join(str(r) for r in runs)
    if boundary is not None:
        text = (text + " " if text else "") + f"boundary {boundary}"
    return text


def cmd_wencode(args):
    enc = weighted.encode_weighted((to_fraction(args.x), to_fraction(args.y)), args.weights, args.depth)
    runs = weighted.runs_from_segments(enc.segments)
    payload = {
        "grammar": "weighted",
        "weights": list(args.weights.m),
        "runs": [{"count": r.count, "kind": r.kind} for r in runs],
        "boundary": enc.boundary,
    }
    _emit(args, _encoding_text(runs, enc.boundary), payload)


def cmd_cencode(args):
    enc = continuous.encode_continuous((to_fraction(args.x), to_fraction(args.y)), args.depth)
    runs = [continuous.SixRun(c, k) for k, c in enc.segments]
    payload = {
        "grammar": "continuous",
        "runs": [{"count": r.count, "kind": r.kind} for r in runs],
        "boundary": enc.boundary,
    }
    _emit(args, _encoding_text(runs, enc.boundary), payload)


def _cells_output(args, cells, side):
    out, lines = [], []
    for c in cells:
        m = c.farey if side == "farey" else c.bary
        cols = [[str(x) for x in col] for col in m.columns]
        out.append({"path": list(c.path), "columns": cols})
        verts = " | ".join(_pt(v, args.approx) for v in m.vertices())
        lines.append(f"{'.'.join(c.path) or '-'}: {verts}")
    _emit(args, "\n".join(lines), {"side": side, "cells": out})


def cmd_wpartition(args):
    _cells_output(args, weighted.weighted_partition(args.weights, args.depth), args.side)


def cmd_cpartition(args):
    _cells_output(args, continuous.continuous_partition(args.depth), args.side)


def cmd_periodic(args):
    text = args.spec
    if not text.lstrip().startswith("{"):
        with open(text) as fh:
            text = fh.read()
    spec = periodicity.PeriodicSpec.from_json(text)
    out = {}
    if args.side in ("farey", "both"):
        out["farey"] = periodicity.farey_periodic_eval(spec, tol=float(args.tol)).to_json(args.digits)
    if args.side in ("bary", "both"):
        out["bary"] = periodicity.bary_periodic_eval(spec).to_json(args.digits)
    print(json.dumps(out, sort_keys=True, indent=None if args.json else 2))


def cmd_demo(args):
    rep = continuous.nonconvergence_demo(args.n)
    rows = [
        {"n": r.n, "v2": list(r.v2), "v3": list(r.v3), "p2": [str(r.p2.x), str(r.p2.y)], "p3": [str(r.p3.x), str(r.p3.y)]}
        for r in rep.rows
    ]
    payload = {"rows": rows, "limit": list(rep.limit), "distance": rep.distance, "fibonacci_ok": rep.fibonacci_ok}
    lines = [f"{r.n}: v2 {r.v2} v3 {r.v3}" for r in rep.rows]
    lines.append(f"limit ({rep.limit[0]:.6f}, {rep.limit[1]:.6f}) distance {rep.distance:.3e}")
    _emit(args, "\n".join(lines), payload)


def cmd_stats(args):
    exp = args.experiment
    if exp == "failure":
        rep = harness.run_partition_failure(args.weights or weighted.Weights(1, 1, 2), args.depth, args.samples, args.seed)
        payload = rep.to_json()
    elif exp == "salem":
        rep = harness.run_salem_1d(args.samples, args.depth, args.seed, checkpoints=(args.depth,))
        payload = rep.to_json()
    else:
        cfg = harness.ExperimentConfig(
            map=args.map,
            weights=args.weights if args.map == "weighted" else None,
            samples=args.samples,
            depth=args.depth,
            seed=args.seed,
            workers=args.workers,
        )
        traces = harness.collect_traces(cfg)
        if exp == "ratio":
            payload = harness.run_ratio_experiment(cfg, traces).to_json()
        elif exp == "sn":
            payload = harness.run_sn_over_n(cfg, (cfg.depth,), traces).to_json()
        else:
            payload = harness.run_type1_runs(cfg, (cfg.depth,), traces=traces).to_json()
        if args.csv:
            harness.write_csv(traces, args.csv, cfg.map)
    text = json.dumps(payload, sort_keys=True)
    if args.json_out:
        with open(args.json_out, "w") as fh:
            fh.write(text + "\n")
    print(text)


def cmd_render(args):
    spec = RenderSpec(
        map=args.map,
        side=args.side,
        depth=args.depth,
        weights=args.weights if args.map == "weighted" else None,
        width=args.width,
        height=args.height,
        stroke=args.stroke,
        fill=args.fill,
    )
    svg = render_partition(spec)
    if args.output and args.output != "-":
        with open(args.output, "w") as fh:
            fh.write(svg)
    else:
        sys.stdout.write(svg)


# -- parser ----------------------------------------------------------------------

def build_parser():
    p = _Parser(prog="fareybary", description="Exact Minkowski ?(x) and its two-dimensional Farey-Bary analogs.")
    sub = p.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    def add(name, fn, help):
        sp = sub.add_parser(name, help=help)
        sp.set_defaults(fn=fn)
        sp.add_argument("--json", action="store_true", help="JSON output")
        sp.add_argument("--approx", type=int, metavar="D", help="print D-digit decimals")
        return sp

    sp = add("qm", cmd_qm, "?(x) for rational x")
    sp.add_argument("x")
    sp = add("qm-inv", cmd_qm_inv, "inverse of ? on dyadic rationals")
    sp.add_argument("d")
    sp = add("qm-trace", cmd_qm_trace, "nested Farey/Bary intervals and length ratios")
    sp.add_argument("x")
    sp.add_argument("depth", type=int)
    sp.add_argument("--radius", help="treat x as known only to within this radius")

    for name, fn, with_w in (("wdelta", cmd_wdelta, True), ("cdelta", cmd_cdelta, False)):
        sp = add(name, fn, "the Farey-Bary map at a point")
        sp.add_argument("x")
        sp.add_argument("y")
        sp.add_argument("--tol", default="1e-12")
        if with_w:
            sp.add_argument("--weights", type=_weights, default=weighted.UNIT)
    for name, fn, with_w in (("wencode", cmd_wencode, True), ("cencode", cmd_cencode, False)):
        sp = add(name, fn, "run-length move sequence of a point")
        sp.add_argument("x")
        sp.add_argument("y")
        sp.add_argument("--depth", type=int, default=20, help="number of raw moves")
        if with_w:
            sp.add_argument("--weights", type=_weights, default=weighted.UNIT)
    for name, fn, with_w in (("wpartition", cmd_wpartition, True), ("cpartition", cmd_cpartition, False)):
        sp = add(name, fn, "list the cells of a partition level")
        sp.add_argument("--depth", type=int, default=1)
        sp.add_argument("--side", choices=("farey", "bary"), default="farey")
        if with_w:
            sp.add_argument("--weights", type=_weights, default=weighted.UNIT)

    sp = add("periodic", cmd_periodic, "evaluate an eventually periodic sequence (JSON spec or file)")
    sp.add_argument("spec")
    sp.add_argument("--side", choices=("farey", "bary", "both"), default="both")
    sp.add_argument("--tol", default="1e-10")
    sp.add_argument("--digits", type=int, default=30)

    sp = add("demo-nonconvergence", cmd_demo, "repeat the move that fixes v1")
    sp.add_argument("-n", type=int, default=40)

    sp = add("stats", cmd_stats, "seeded experiments")
    sp.add_argument("--experiment", choices=("ratio", "sn", "type1", "failure", "salem"), default="ratio")
    sp.add_argument("--map", choices=("weighted", "continuous"), default="weighted")
    sp.add_argument("--weights", type=_weights)
    sp.add_argument("--samples", type=int, default=200)
    sp.add_argument("--depth", type=int, default=60)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--csv", help="write per-run trace rows here")
    sp.add_argument("--json-out", help="also write the JSON summary here")

    sp = add("render", cmd_render, "SVG picture of a partition")
    sp.add_argument("--map", choices=("weighted", "continuous"), default="continuous")
    sp.add_argument("--side", choices=("farey", "bary"), default="farey")
    sp.add_argument("--depth", type=int, default=3)
    sp.add_argument("--weights", type=_weights)
    sp.add_argument("--width", type=int, default=800)
    sp.add_argument("--height", type=int, default=800)
    sp.add_argument("--stroke", type=float, default=0.5)
    sp.add_argument("--fill", choices=("none", "depth-shaded"), default="none")
    sp.add_argument("-o", "--output")
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if getattr(args, "weights", None) is None and args.command in ("stats",) and args.map == "weighted":
            args.weights = weighted.UNIT if args.experiment != "failure" else None
        args.fn(args)
        return 0
    except (FareyBaryError, UsageError, ValueError, TypeError, ZeroDivisionError, OSError) as exc:
        msg = " ".join(str(exc).split()) or type(exc).__name__
        print(f"error: {type(exc).__name__}: {msg}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
