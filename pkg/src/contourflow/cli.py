"""Command-line interface.

JSON results go to stdout; human-readable notes go to stderr. Exit codes:
0 success, 1 usage error, 2 I/O error, 3 numeric or domain error.
"""
from __future__ import annotations

import argparse
import pathlib
import sys
import time

import numpy as np

from . import io as cfio
from .distance import signed_distance
from .fields import map_sigmoid, threshold
from .flow import ContourFlow, contour_flow, flow_metrics, perturb_flow
from .losses import combined_loss, shape_loss_2d, shape_loss_3d
from .metrics import segmentation_report
from .refine import refine
from .synth import corrupt, kmeans_features, synthesize


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # route argparse failures to exit code 1
        raise _UsageError(message)


def _flow_from_file(path) -> ContourFlow:
    field = cfio.read_field(path, ndim=2, nchan=2)
    defined = (np.abs(field) > 0).any(axis=-1)
    return ContourFlow(field=field, defined_mask=defined.astype(np.uint8))


def _loss_json(value) -> dict:
    return {
        "loss_total": value.total,
        "per_term": dict(value.per_term),
        "pixel_count": value.pixel_count,
        "per_pixel_mean": value.per_pixel(),
    }


def _emit(obj) -> None:
    sys.stdout.write(cfio.report_json(obj) + "\n")


# ------------------------------------------------------------- subcommands

def _cmd_sdt(args) -> int:
    mask = cfio.read_mask_pgm(args.infile)
    phi = signed_distance(mask)
    cfio.write_field(args.out, phi, ndim=2)
    print(f"wrote {args.out}", file=sys.stderr)
    return 0


def _cmd_flow(args) -> int:
    phi = cfio.read_field(args.phi, ndim=2, nchan=1)
    f = contour_flow(phi, zero_border=args.border_zero)
    cfio.write_field(args.out, f.field, ndim=2)
    print(f"wrote {args.out} ({int(f.defined_mask.sum())} defined pixels)",
          file=sys.stderr)
    return 0


def _cmd_refine(args) -> int:
    o = cfio.read_field(args.feature, ndim=2, nchan=1)
    f = _flow_from_file(args.flow)
    u, trace = refine(o, f, eps=args.eps, tau=args.tau, iters=args.iters,
                      record_trace=args.trace is not None)
    cfio.write_field(args.out, u, ndim=2)
    if args.mask_out:
        cfio.write_mask_pgm(args.mask_out, threshold(u, args.threshold))
    if args.trace:
        cfio.write_report(trace, args.trace)
    print(f"wrote {args.out}", file=sys.stderr)
    return 0


def _cmd_loss(args) -> int:
    if (args.flow is None) == (args.phi is None):
        raise _UsageError("pass exactly one of --flow (2D) or --phi (3D)")
    if args.flow is not None:
        u = cfio.read_field(args.u, ndim=2, nchan=1)
        f = _flow_from_file(args.flow)
        if args.gt is not None:
            gt = cfio.read_mask_pgm(args.gt)
            value = combined_loss(u, gt, f, alpha=args.alpha, beta=args.beta,
                                  base=args.base)
        else:
            value = shape_loss_2d(u, f)
    else:
        if args.gt is not None:
            raise _UsageError("--gt applies to the 2D (--flow) form only")
        u = cfio.read_field(args.u, ndim=3, nchan=1)
        phi = cfio.read_field(args.phi, ndim=3, nchan=1)
        value = shape_loss_3d(u, phi)
    _emit(_loss_json(value))
    return 0


def _cmd_metrics(args) -> int:
    pred = cfio.read_mask_pgm(args.pred)
    gt = cfio.read_mask_pgm(args.gt)
    _emit(segmentation_report(pred, gt))
    return 0


def _cmd_flow_metrics(args) -> int:
    pred = _flow_from_file(args.pred)
    gt = _flow_from_file(args.gt)
    _emit(flow_metrics(pred, gt))
    return 0


def _cmd_synth(args) -> int:
    kind = args.shape.replace("-", "_")
    kwargs = {}
    if args.cx is not None or args.cy is not None:
        if args.cx is None or args.cy is None:
            raise _UsageError("pass both --cx and --cy or neither")
        kwargs["center"] = (args.cy, args.cx)
    if args.radius is not None:
        kwargs["radius"] = args.radius
    if args.thickness is not None:
        kwargs["thickness"] = args.thickness
    if args.opening_deg is not None:
        kwargs["opening_deg"] = args.opening_deg
    if args.half_side is not None:
        kwargs["half_side"] = args.half_side
    image, gt = synthesize(kind, size=args.size, **kwargs)
    cfio.write_pgm(args.out, image)
    cfio.write_mask_pgm(args.gt, gt)
    print(f"wrote {args.out} and {args.gt}", file=sys.stderr)
    return 0


def _cmd_corrupt(args) -> int:
    image = cfio.read_pgm(args.infile)
    mode = {"gaussian": "gaussian", "saltpepper": "salt_pepper",
            "patches": "patches"}[args.mode]
    out = corrupt(image, mode, sigma=args.sigma, sp_ratio=args.ratio,
                  patch_count=args.patches, patch_size=args.patch_size,
                  seed=args.seed)
    cfio.write_pgm(args.out, out)
    print(f"wrote {args.out}", file=sys.stderr)
    return 0


def _cmd_features(args) -> int:
    image = cfio.read_pgm(args.infile)
    o = kmeans_features(image, k=args.k, seed=args.seed)
    cfio.write_field(args.out, o, ndim=2)
    print(f"wrote {args.out}", file=sys.stderr)
    return 0


# ------------------------------------------------------------------- demo

DEMO_SHAPE = "letter_c"
DEMO_SIZE = 128
DEMO_NOISE_SIGMA = 110.0
DEMO_PATCH_COUNT = 48
DEMO_PATCH_SIZE = 8


def _cmd_demo(args) -> int:
    wd = pathlib.Path(args.workdir)
    wd.mkdir(parents=True, exist_ok=True)
    t_start = time.perf_counter()

    iters = args.iters if args.iters is not None else (100 if args.case == "noise" else 1000)
    flow_seed = 1000 + args.seed

    image, gt = synthesize(DEMO_SHAPE, size=DEMO_SIZE)
    cfio.write_pgm(wd / "image.pgm", image)
    cfio.write_mask_pgm(wd / "gt.pgm", gt)

    image = cfio.read_pgm(wd / "image.pgm")
    if args.case == "noise":
        damaged = corrupt(image, "gaussian", sigma=args.sigma, seed=args.seed)
        corruption = {"mode": "gaussian", "sigma": args.sigma}
    else:
        damaged = corrupt(image, "patches", patch_count=args.patches,
                          patch_size=args.patch_size, seed=args.seed)
        corruption = {"mode": "patches", "patch_count": args.patches,
                      "patch_size": args.patch_size}
    cfio.write_pgm(wd / "corrupted.pgm", damaged)

    o = kmeans_features(cfio.read_pgm(wd / "corrupted.pgm"), k=2, seed=args.seed)
    cfio.write_field(wd / "o.cff", o, ndim=2)

    phi = signed_distance(cfio.read_mask_pgm(wd / "gt.pgm"))
    cfio.write_field(wd / "phi.cff", phi, ndim=2)

    # the full grid participates in the constraint, so keep border tangents
    f = contour_flow(cfio.read_field(wd / "phi.cff", ndim=2, nchan=1),
                     zero_border=False)
    cfio.write_field(wd / "flow.cff", f.field, ndim=2)

    flow_path = wd / "flow.cff"
    if args.flow_delta > 0.0:
        perturbed = perturb_flow(_flow_from_file(flow_path), args.flow_delta,
                                 seed=flow_seed)
        flow_path = wd / "flow_used.cff"
        cfio.write_field(flow_path, perturbed.field, ndim=2)

    o = cfio.read_field(wd / "o.cff", ndim=2, nchan=1)
    f_used = _flow_from_file(flow_path)
    u, trace = refine(o, f_used, eps=args.eps, tau=args.tau, iters=iters,
                      record_trace=True)
    cfio.write_field(wd / "u.cff", u, ndim=2)
    cfio.write_report(trace, wd / "trace.json")

    seg = threshold(u, args.threshold)
    cfio.write_mask_pgm(wd / "seg.pgm", seg)
    unrefined = threshold(map_sigmoid(o, args.eps), args.threshold)
    cfio.write_mask_pgm(wd / "unrefined.pgm", unrefined)

    gt = cfio.read_mask_pgm(wd / "gt.pgm")
    before = segmentation_report(unrefined, gt)
    after = segmentation_report(threshold(cfio.read_field(wd / "u.cff", ndim=2,
                                                          nchan=1), args.threshold), gt)
    elapsed = time.perf_counter() - t_start

    res = trace.orthogonality
    summary = {
        "case": args.case,
        "shape": DEMO_SHAPE,
        "size": DEMO_SIZE,
        "flow_delta": args.flow_delta,
        "config": {
            "eps": args.eps, "tau": args.tau, "iters": iters,
            "threshold": args.threshold, "seed": args.seed,
            "flow_seed": flow_seed, **corruption,
        },
        "unrefined": before,
        "refined": after,
        "improvement": {
            "dice": after["dice_percent"] - before["dice_percent"],
            "bd": before["bd"] - after["bd"],
            "bdsd": before["bdsd"] - after["bdsd"],
        },
        "orthogonality": {
            "first": res[0],
            "at_100": res[99] if len(res) >= 100 else None,
            "final": res[-1],
        },
        "elapsed_seconds": elapsed,
    }
    cfio.write_report(summary, wd / "summary.json")
    _emit(summary)
    print(
        f"{args.case}: dice {before['dice_percent']:.2f} -> "
        f"{after['dice_percent']:.2f}, bdsd {before['bdsd']:.3f} -> "
        f"{after['bdsd']:.3f} in {elapsed:.2f}s",
        file=sys.stderr,
    )
    return 0


# ------------------------------------------------------------------ parser

def build_parser() -> _Parser:
    p = _Parser(prog="contourflow",
                description="Shape-aligned segmentation refinement toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("sdt", help="signed distance field of a mask")
    s.add_argument("--in", dest="infile", required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=_cmd_sdt)

    s = sub.add_parser("flow", help="tangent flow of a signed distance field")
    s.add_argument("--phi", required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--border-zero", action=argparse.BooleanOptionalAction,
                   default=True, help="zero the flow on the grid border")
    s.set_defaults(func=_cmd_flow)

    s = sub.add_parser("refine", help="flow-constrained refinement of a feature field")
    s.add_argument("--feature", required=True)
    s.add_argument("--flow", required=True)
    s.add_argument("--eps", type=float, default=10.0)
    s.add_argument("--tau", type=float, default=10.0)
    s.add_argument("--iters", type=int, default=100)
    s.add_argument("--out", required=True)
    s.add_argument("--mask-out", default=None)
    s.add_argument("--threshold", type=float, default=0.5)
    s.add_argument("--trace", default=None)
    s.set_defaults(func=_cmd_refine)

    s = sub.add_parser("loss", help="loss of a segmentation field")
    s.add_argument("--u", required=True)
    s.add_argument("--flow", default=None)
    s.add_argument("--phi", default=None)
    s.add_argument("--gt", default=None)
    s.add_argument("--base", choices=("ce", "dice"), default="ce")
    s.add_argument("--alpha", type=float, default=1.0)
    s.add_argument("--beta", type=float, default=1.0)
    s.set_defaults(func=_cmd_loss)

    s = sub.add_parser("metrics", help="Dice / BD / BDSD of a segmentation")
    s.add_argument("--pred", required=True)
    s.add_argument("--gt", required=True)
    s.set_defaults(func=_cmd_metrics)

    s = sub.add_parser("flow-metrics", help="ACS / EPE / ADE between two flows")
    s.add_argument("--pred", required=True)
    s.add_argument("--gt", required=True)
    s.set_defaults(func=_cmd_flow_metrics)

    s = sub.add_parser("synth", help="synthetic two-level image and mask")
    s.add_argument("--shape", required=True,
                   choices=("disk", "letter-c", "two-blobs", "square"))
    s.add_argument("--size", type=int, default=128)
    s.add_argument("--out", required=True)
    s.add_argument("--gt", required=True)
    s.add_argument("--cx", type=float, default=None)
    s.add_argument("--cy", type=float, default=None)
    s.add_argument("--radius", type=float, default=None)
    s.add_argument("--thickness", type=float, default=None)
    s.add_argument("--opening-deg", type=float, default=None)
    s.add_argument("--half-side", type=float, default=None)
    s.set_defaults(func=_cmd_synth)

    s = sub.add_parser("corrupt", help="damage an image reproducibly")
    s.add_argument("--in", dest="infile", required=True)
    s.add_argument("--mode", required=True,
                   choices=("gaussian", "saltpepper", "patches"))
    s.add_argument("--sigma", type=float, default=20.0)
    s.add_argument("--ratio", type=float, default=0.02)
    s.add_argument("--patches", type=int, default=12)
    s.add_argument("--patch-size", type=int, default=16)
    s.add_argument("--seed", type=int, default=42)
    s.add_argument("--out", required=True)
    s.set_defaults(func=_cmd_corrupt)

    s = sub.add_parser("features", help="two-cluster feature field of an image")
    s.add_argument("--in", dest="infile", required=True)
    s.add_argument("--k", type=int, default=2)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True)
    s.set_defaults(func=_cmd_features)

    s = sub.add_parser("demo", help="end-to-end corruption/recovery experiment")
    s.add_argument("--case", required=True, choices=("noise", "patch"))
    s.add_argument("--workdir", required=True)
    s.add_argument("--flow-delta", type=float, default=0.0)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--iters", type=int, default=None,
                   help="default 100 for noise, 1000 for patch")
    s.add_argument("--eps", type=float, default=10.0)
    s.add_argument("--tau", type=float, default=10.0)
    s.add_argument("--threshold", type=float, default=0.5)
    s.add_argument("--sigma", type=float, default=DEMO_NOISE_SIGMA)
    s.add_argument("--patches", type=int, default=DEMO_PATCH_COUNT)
    s.add_argument("--patch-size", type=int, default=DEMO_PATCH_SIZE)
    s.set_defaults(func=_cmd_demo)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except cfio.FileFormatError as exc:
        print(f"file format error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, FloatingPointError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
