"""Command-line front end: restore, transmission, degrade, stats, eval."""

import argparse
import json
import sys
import time
from pathlib import Path

import cv2
import numpy as np

from . import __version__, evaluate, priors, simulate
from .ambient import DEFAULT_SOG_P, parse_ambient_spec, resolve_ambient
from .image_io import (ImageIOError, load_image, save_image, save_scalar_csv,
                       save_scalar_map)
from .refine import MattingConfig
from .restore import PipelineConfig, restore_pipeline

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NONCONVERGED = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


# Per-subcommand defaults; CLI flags override --config, which overrides these.
DEFAULTS = {
    "restore": {
        "ambient": "auto", "sog_p": DEFAULT_SOG_P, "t0": 0.15, "patch": 15,
        "refine": "matting", "matting_fidelity": 1e-4, "matting_eps": 1e-6,
        "matting_window": 3, "matting_tol": 1e-5, "matting_max_iters": 2000,
        "matting_downsample": 800, "refine_full": False,
        "guided_radius": 30, "guided_eps": 1e-3, "no_clamp": False,
        "emit_intermediates": None, "report": None, "threads": 0,
    },
    "transmission": {
        "prior": "composite", "ambient": "auto", "sog_p": DEFAULT_SOG_P,
        "patch": 15, "csv": None, "threads": 0,
    },
    "degrade": {
        "ambient": "0.8,0.9,1.0", "tau": None, "tau_ramp": None,
        "ladder": None, "manifest": None, "threads": 0,
    },
    "stats": {
        "prior": "composite", "patch": 15, "bins": 256, "max_side": 1024,
        "sog_p": DEFAULT_SOG_P, "every5": None, "manifest": None, "threads": 0,
    },
    "eval": {
        "reference": None, "method": "none", "ambient": None,
        "estimate_ambient": False, "sog_p": DEFAULT_SOG_P, "t0": 0.15,
        "patch": 15, "refine": "guided", "guided_radius": 30,
        "guided_eps": 1e-3, "report": None, "threads": 0,
    },
}


def _merge_config(args, subcommand):
    """flags > config file > defaults; returns the effective option dict."""
    effective = dict(DEFAULTS[subcommand])
    if getattr(args, "config", None):
        with open(args.config) as fh:
            loaded = json.load(fh)
        for key, value in loaded.items():
            key = key.replace("-", "_")
            if key not in effective:
                raise ValueError(f"unknown config key: {key}")
            effective[key] = value
    for key in effective:
        value = getattr(args, key, None)
        if value is not None:
            effective[key] = value
    return effective


def _write_report(path, payload):
    payload = {"version": __version__, **payload}
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _pipeline_config(opts):
    matting = MattingConfig(
        window_side=int(opts["matting_window"]),
        epsilon=float(opts["matting_eps"]),
        fidelity=float(opts["matting_fidelity"]),
        solver_tol=float(opts["matting_tol"]),
        max_iters=int(opts["matting_max_iters"]),
        downsample=None if opts["refine_full"]
        else int(opts["matting_downsample"]),
    )
    return PipelineConfig(
        ambient=parse_ambient_spec(opts["ambient"]),
        sog_p=float(opts["sog_p"]),
        patch=int(opts["patch"]),
        refine=opts["refine"],
        matting=matting,
        guided_radius=int(opts["guided_radius"]),
        guided_eps=float(opts["guided_eps"]),
        t0=float(opts["t0"]),
        clamp_output=not opts["no_clamp"],
    )


def _cmd_restore(args):
    opts = _merge_config(args, "restore")
    start = time.perf_counter()
    image = load_image(args.input)
    result = restore_pipeline(image, _pipeline_config(opts))
    save_image(result.restored, args.output)

    if opts["emit_intermediates"]:
        outdir = Path(opts["emit_intermediates"])
        outdir.mkdir(parents=True, exist_ok=True)
        for name, smap in (("t_v", result.t_v), ("t_c", result.t_c),
                           ("t_v_rough", result.t_v_rough),
                           ("t_c_rough", result.t_c_rough),
                           ("t_final", result.t_final)):
            save_scalar_map(smap, outdir / f"{name}.png")
            save_scalar_csv(smap, outdir / f"{name}.csv")
        save_scalar_map(result.contribution.astype(np.float64),
                        outdir / "contribution.png")

    report_path = opts["report"] or (str(args.output) + ".report.json")
    _write_report(report_path, {
        "subcommand": "restore",
        "input": str(args.input),
        "output": str(args.output),
        "config": {k: v for k, v in opts.items()},
        **result.report,
        "total_seconds": time.perf_counter() - start,
    })
    if not result.report["converged"]:
        print("warning: refinement solver did not converge; "
              "best iterate kept", file=sys.stderr)
        return EXIT_NONCONVERGED
    return EXIT_OK


def _cmd_transmission(args):
    opts = _merge_config(args, "transmission")
    image = load_image(args.input)
    kind = opts["prior"]
    patch = int(opts["patch"])
    if kind in ("vdp", "composite"):
        amb = resolve_ambient(image, parse_ambient_spec(opts["ambient"]),
                              float(opts["sog_p"]))
    else:
        amb = None
    if kind == "vdp":
        smap = priors.veil_difference_transmission(image, amb, patch)
    elif kind == "contrast":
        smap = priors.contrast_transmission(image, patch)
    elif kind == "dcp":
        smap = priors.dark_channel(image, patch)
    elif kind == "udcp":
        smap = priors.udcp(image, patch)
    elif kind == "composite":
        smap = priors.composite_rough(image, amb, patch)
    else:
        raise ValueError(f"unknown prior: {kind!r}")
    save_scalar_map(smap, args.output)
    if opts["csv"]:
        save_scalar_csv(smap, opts["csv"])
    return EXIT_OK


def _cmd_degrade(args):
    opts = _merge_config(args, "degrade")
    image = load_image(args.input)
    kind, amb = parse_ambient_spec(opts["ambient"])
    if kind != "literal":
        raise ValueError("degrade needs a literal ambient: r,g,b")
    modes = [opts["tau"], opts["tau_ramp"], opts["ladder"]]
    if sum(m is not None for m in modes) != 1:
        raise ValueError("give exactly one of --tau, --tau-ramp, --ladder")
    outdir = Path(args.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    h, w = image.shape[:2]

    frames = []
    if opts["tau"] is not None:
        tau = float(opts["tau"])
        frames.append(("frame_000.png", tau,
                       simulate.degrade(image, amb, tau=tau)))
    elif opts["tau_ramp"] is not None:
        parts = str(opts["tau_ramp"]).split(",")
        tau_min, tau_max = float(parts[0]), float(parts[1])
        axis = parts[2] if len(parts) > 2 else "x"
        field = simulate.depth_ramp(w, h, tau_min, tau_max, axis)
        frames.append(("frame_000.png", [tau_min, tau_max, axis],
                       simulate.degrade(image, amb, tau=field)))
    else:
        taus = [float(v) for v in str(opts["ladder"]).split(",")]
        ladder = simulate.turbid_ladder(image, amb, taus)
        frames = [(f"frame_{i:03d}.png", tau, frame)
                  for i, (tau, frame) in enumerate(zip(taus, ladder))]

    manifest = {"version": __version__, "ambient": [float(v) for v in amb],
                "frames": []}
    for name, tau, frame in frames:
        save_image(frame, outdir / name)
        entry = {"path": name, "tau": tau}
        if isinstance(tau, float):
            entry["transmission"] = float(np.exp(-tau))
        manifest["frames"].append(entry)
    manifest_path = opts["manifest"] or str(outdir / "manifest.json")
    with open(manifest_path, "w") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")
    return EXIT_OK


def _cmd_stats(args):
    opts = _merge_config(args, "stats")
    bins = int(opts["bins"])
    hist = evaluate.prior_histogram_corpus(
        args.corpus, opts["prior"], patch=int(opts["patch"]), bins=bins,
        max_side=int(opts["max_side"]), sog_p=float(opts["sog_p"]))
    with open(args.output, "w") as fh:
        fh.write("bin,frequency\n")
        for i, freq in enumerate(hist):
            fh.write(f"{i},{float(freq)!r}\n")
    if opts["every5"]:
        with open(opts["every5"], "w") as fh:
            fh.write("bin,frequency\n")
            for i in range(0, bins, 5):
                fh.write(f"{i},{float(hist[i])!r}\n")
    manifest_path = opts["manifest"] or (str(args.output) + ".manifest.json")
    _write_report(manifest_path, {
        "subcommand": "stats", "corpus": str(args.corpus),
        "prior": opts["prior"], "patch": int(opts["patch"]), "bins": bins,
        "max_side": int(opts["max_side"]), "sog_p": float(opts["sog_p"]),
    })
    return EXIT_OK


def _cmd_eval(args):
    opts = _merge_config(args, "eval")
    with open(args.manifest) as fh:
        manifest = json.load(fh)
    root = Path(args.manifest).parent
    frames, levels = [], []
    for i, entry in enumerate(manifest["frames"]):
        frames.append(load_image(root / entry["path"]))
        levels.append(entry.get("tau", i) if isinstance(entry.get("tau"), (int, float)) else i)
    reference = (load_image(opts["reference"]) if opts["reference"]
                 else frames[0])

    if opts["method"] == "none":
        curve = evaluate.mse_curve(frames, reference, levels)
    elif opts["method"] == "restore":
        ambient = opts["ambient"] or ",".join(
            str(v) for v in manifest.get("ambient", []))
        if not ambient and not opts["estimate_ambient"]:
            raise ValueError("eval --method restore needs an ambient "
                             "(flag, manifest, or --estimate-ambient)")
        cfg = PipelineConfig(
            ambient=parse_ambient_spec(ambient) if ambient else ("sog", None),
            sog_p=float(opts["sog_p"]), patch=int(opts["patch"]),
            refine=opts["refine"], guided_radius=int(opts["guided_radius"]),
            guided_eps=float(opts["guided_eps"]), t0=float(opts["t0"]))
        curve = evaluate.mse_curve(frames, reference, levels,
                                   pipeline_config=cfg,
                                   estimate_ambient=opts["estimate_ambient"])
    else:
        raise ValueError(f"unknown eval method: {opts['method']!r}")

    with open(args.output, "w") as fh:
        fh.write("level,mse\n")
        for level, err in curve:
            fh.write(f"{float(level)!r},{float(err)!r}\n")
    report_path = opts["report"] or (str(args.output) + ".report.json")
    _write_report(report_path, {
        "subcommand": "eval", "manifest": str(args.manifest),
        "method": opts["method"],
        "estimate_ambient": bool(opts["estimate_ambient"]),
        "config": {k: v for k, v in opts.items()},
    })
    return EXIT_OK


def build_parser():
    parser = _Parser(prog="unveil",
                     description="Restoration of images degraded by "
                                 "scattering media, with a simulator and "
                                 "evaluation tools.")
    parser.add_argument("--version", action="version",
                        version=f"unveil {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p):
        p.add_argument("--config", help="JSON file with flag overrides")
        p.add_argument("--threads", type=int,
                       help="worker-thread cap (0 = auto); results are "
                            "identical for any value")

    p = sub.add_parser("restore", help="restore a degraded image")
    common(p)
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--ambient", help="auto | bright:<q> | r,g,b")
    p.add_argument("--sog-p", type=float, dest="sog_p")
    p.add_argument("--t0", type=float)
    p.add_argument("--patch", type=int)
    p.add_argument("--refine", choices=["matting", "guided", "none"])
    p.add_argument("--matting-fidelity", type=float, dest="matting_fidelity")
    p.add_argument("--matting-eps", type=float, dest="matting_eps")
    p.add_argument("--matting-window", type=int, dest="matting_window")
    p.add_argument("--matting-tol", type=float, dest="matting_tol")
    p.add_argument("--matting-max-iters", type=int, dest="matting_max_iters")
    p.add_argument("--matting-downsample", type=int,
                   dest="matting_downsample")
    p.add_argument("--refine-full", action="store_true", default=None,
                   dest="refine_full", help="solve at full resolution")
    p.add_argument("--guided-radius", type=int, dest="guided_radius")
    p.add_argument("--guided-eps", type=float, dest="guided_eps")
    p.add_argument("--no-clamp", action="store_true", default=None,
                   dest="no_clamp")
    p.add_argument("--emit-intermediates", dest="emit_intermediates")
    p.add_argument("--report")
    p.set_defaults(func=_cmd_restore)

    p = sub.add_parser("transmission", help="emit a prior transmission map")
    common(p)
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--prior", choices=list(evaluate.PRIOR_KINDS))
    p.add_argument("--ambient")
    p.add_argument("--sog-p", type=float, dest="sog_p")
    p.add_argument("--patch", type=int)
    p.add_argument("--csv")
    p.set_defaults(func=_cmd_transmission)

    p = sub.add_parser("degrade", help="synthesize degraded frames")
    common(p)
    p.add_argument("--input", required=True)
    p.add_argument("--output-dir", required=True, dest="output_dir")
    p.add_argument("--ambient", help="r,g,b literal")
    p.add_argument("--tau", type=float)
    p.add_argument("--tau-ramp", dest="tau_ramp", help="min,max[,axis]")
    p.add_argument("--ladder", help="comma-separated taus starting at 0")
    p.add_argument("--manifest")
    p.set_defaults(func=_cmd_degrade)

    p = sub.add_parser("stats", help="corpus prior histograms")
    common(p)
    p.add_argument("--corpus", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--prior", choices=list(evaluate.PRIOR_KINDS))
    p.add_argument("--patch", type=int)
    p.add_argument("--bins", type=int)
    p.add_argument("--max-side", type=int, dest="max_side")
    p.add_argument("--sog-p", type=float, dest="sog_p")
    p.add_argument("--every5", help="every-5th-bin downsampled CSV path")
    p.add_argument("--manifest")
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("eval", help="MSE curve over a degraded sequence")
    common(p)
    p.add_argument("--manifest", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--reference", help="reference image (default: frame 0)")
    p.add_argument("--method", choices=["none", "restore"])
    p.add_argument("--ambient", help="fixed ambient r,g,b for restoration")
    p.add_argument("--estimate-ambient", action="store_true", default=None,
                   dest="estimate_ambient")
    p.add_argument("--sog-p", type=float, dest="sog_p")
    p.add_argument("--t0", type=float)
    p.add_argument("--patch", type=int)
    p.add_argument("--refine", choices=["matting", "guided", "none"])
    p.add_argument("--guided-radius", type=int, dest="guided_radius")
    p.add_argument("--guided-eps", type=float, dest="guided_eps")
    p.add_argument("--report")
    p.set_defaults(func=_cmd_eval)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code
    threads = getattr(args, "threads", None)
    if threads:
        cv2.setNumThreads(int(threads))
    try:
        return args.func(args)
    except (ImageIOError, FileNotFoundError, ValueError,
            json.JSONDecodeError, KeyError) as exc:
        print(f"unveil: error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
