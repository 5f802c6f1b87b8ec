"""Command-line entry point: ``gaborvfd <subcommand> ...``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__, bench, cda, descriptors, pipeline, vfd
from .gabor import BankConfig, build_bank, bank_manifest, parse_grid
from .imaging import extract_windows, list_images, load_dataset, load_image, quantize, save_pgm


def _add_bank_flags(p: argparse.ArgumentParser, multi_grid: bool = False) -> None:
    if multi_grid:
        p.add_argument("--grid", action="append", type=parse_grid, metavar="MxN",
                       help="scales x orientations; repeat for several grids")
    else:
        p.add_argument("--grid", type=parse_grid, metavar="MxN", help="scales x orientations (default 4x6)")
    p.add_argument("--u-low", type=float, help="lowest center frequency (default 0.05)")
    p.add_argument("--u-high", type=float, help="highest center frequency (default 0.4)")
    p.add_argument("--sigma-v-form", choices=("printed", "classic"))


def _add_model_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--rmax", type=int, help=f"maximum dilation radius (default {vfd.DEFAULT_R_MAX})")
    p.add_argument("--components", type=int, help=f"canonical variables per CDA (default {cda.DEFAULT_COMPONENTS})")
    p.add_argument("--jobs", type=int, help="worker processes for feature extraction")


def _config(args) -> bench.BenchConfig:
    """Defaults, then ``--config``, then explicit flags."""
    cfg = bench.BenchConfig()
    if getattr(args, "config", None):
        cfg = bench.load_config(args.config, cfg)
    overrides = {
        "grid": "grids", "u_low": "u_low", "u_high": "u_high", "sigma_v_form": "sigma_v_form",
        "rmax": "r_max", "components": "n_components", "folds": "folds", "seed": "seed",
        "jobs": "jobs", "kinds": "kinds", "data": "dataset", "out": "output",
    }
    for flag, attr in overrides.items():
        val = getattr(args, flag, None)
        if val is None:
            continue
        if flag == "grid" and not isinstance(val, list):
            val = [val]
        if flag == "kinds":
            val = bench._list(val)
        setattr(cfg, attr, val)
    if getattr(args, "leaky_cda", False):
        cfg.leaky_cda = True
    return cfg


def _single_bank(cfg: bench.BenchConfig) -> BankConfig:
    if len(cfg.grids) != 1:
        raise ValueError("this subcommand takes exactly one grid")
    return cfg.bank(*cfg.grids[0])


def cmd_filters(args) -> int:
    cfg = _config(args)
    bank_cfg = _single_bank(cfg)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "manifest.txt").write_text(bank_manifest(bank_cfg))
    for k in build_bank(bank_cfg):
        save_pgm(quantize(np.abs(k.taps), 256), out / f"kernel_{k.m}_{k.n}.pgm")
    print(f"wrote {bank_cfg.n_channels} kernel previews to {out}")
    return 0


def cmd_vfd(args) -> int:
    sig = vfd.fractal_signature(load_image(args.input), args.rmax if args.rmax else vfd.DEFAULT_R_MAX)
    text = sig.to_csv()
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_extract(args) -> int:
    cfg = _config(args)
    ds = load_dataset(args.data)
    if args.kind == "enhanced_fractal":
        if not args.model:
            raise ValueError("enhanced_fractal extraction needs --model (a trained model directory)")
        model = pipeline.PipelineModel.load(args.model)
        fvs = [model.features(img) for img in ds.images]
    else:
        bank_cfg = _single_bank(cfg)
        fvs = [pipeline.extract(args.kind, img, bank_cfg) for img in ds.images]
    rows = [(name, ds.class_names[lab], fv) for name, lab, fv in zip(ds.names, ds.labels, fvs)]
    descriptors.write_feature_csv(args.out, rows)
    print(f"wrote {len(rows)} feature rows to {args.out}")
    return 0


def cmd_train(args) -> int:
    cfg = _config(args)
    ds = load_dataset(args.data)
    model = pipeline.fit_pipeline(ds, args.kind, _single_bank(cfg), cfg.r_max, cfg.n_components,
                                  cfg.ridge_scale, cfg.cap_components, cfg.final_cda, cfg.jobs)
    model.save(args.out)
    print(f"trained {args.kind} on {len(ds)} samples, model in {args.out}")
    return 0


def cmd_eval(args) -> int:
    model = pipeline.PipelineModel.load(args.model)
    ds = load_dataset(args.data)
    index = {name: i for i, name in enumerate(model.class_names)}
    missing = [c for c in ds.class_names if c not in index]
    if missing:
        raise ValueError(f"class {missing[0]!r} is unknown to the model")
    truth = np.array([index[ds.class_names[lab]] for lab in ds.labels])
    raw = pipeline.raw_feature_table(model.kind, ds.images, model.config, model.r_max, args.jobs or 1)
    pred = model.predict_raw(raw)
    acc = float(np.mean(pred == truth))
    print(f"accuracy={100 * acc:.2f}% ({int(np.sum(pred == truth))}/{len(truth)})")
    if args.out:
        with open(args.out, "w") as fh:
            fh.write("sample_id,label,predicted\n")
            for name, t, p in zip(ds.names, truth, pred):
                fh.write(f"{name},{model.class_names[t]},{model.class_names[p]}\n")
    return 0


def cmd_bench(args) -> int:
    cfg = _config(args)
    report = bench.run_benchmark(cfg)
    sys.stdout.write(report.table())
    failed = [c for c in report.cells if c.error]
    print(f"report written to {Path(cfg.output) / 'report.csv'}"
          + (f" ({len(failed)} failed cells)" if failed else ""))
    return 0


def cmd_windows(args) -> int:
    src = Path(args.input)
    files = list_images(src) if src.is_dir() else [src]
    if not files:
        raise ValueError(f"no PNG/PGM images in {src}")
    out = Path(args.out)
    seed = args.seed if args.seed is not None else 0
    total = 0
    for i, f in enumerate(files):
        img = load_image(f)
        # one independent placement stream per source image
        wins = extract_windows(img, args.count, args.size, args.size, seed + i)
        cdir = out / f.stem
        cdir.mkdir(parents=True, exist_ok=True)
        for j, w in enumerate(wins):
            save_pgm(w, cdir / f"{f.stem}_{j:02d}.pgm")
        total += len(wins)
    print(f"wrote {total} windows from {len(files)} images to {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gaborvfd", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("filters", help="dump bank parameters and kernel magnitude previews")
    p.add_argument("--config")
    _add_bank_flags(p)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_filters)

    p = sub.add_parser("vfd", help="fractal signature of one image as CSV")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--rmax", type=int)
    p.add_argument("--out", help="CSV path (default stdout)")
    p.set_defaults(func=cmd_vfd)

    p = sub.add_parser("extract", help="feature CSV for a dataset")
    p.add_argument("--config")
    p.add_argument("--data", required=True, help="dataset root (one directory per class)")
    p.add_argument("--kind", default="energy", choices=pipeline.KINDS)
    p.add_argument("--model", help="trained model directory (required for enhanced_fractal)")
    p.add_argument("--out", required=True)
    _add_bank_flags(p)
    _add_model_flags(p)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("train", help="fit and save a pipeline model")
    p.add_argument("--config")
    p.add_argument("--data", required=True)
    p.add_argument("--kind", default="enhanced_fractal", choices=pipeline.KINDS)
    p.add_argument("--out", required=True, help="model directory")
    _add_bank_flags(p)
    _add_model_flags(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="score a dataset against a saved model")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--out", help="optional per-sample prediction CSV")
    p.add_argument("--jobs", type=int)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("bench", help="cross-validated sweep over kinds and grids")
    p.add_argument("--config")
    p.add_argument("--data", help="dataset root, or synthetic:brodatz / synthetic:sinusoid")
    p.add_argument("--kinds", help="comma-separated descriptor kinds")
    p.add_argument("--folds", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--leaky-cda", action="store_true", help="fit CDA stages on all samples (reproduces label leakage)")
    p.add_argument("--out", help="output directory")
    _add_bank_flags(p, multi_grid=True)
    _add_model_flags(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("windows", help="cut non-overlapping random windows into a class-per-directory tree")
    p.add_argument("--in", dest="input", required=True, help="source image or directory of images")
    p.add_argument("--out", required=True)
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--size", type=int, default=200)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_windows)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
