"""Command-line entry point for the full pipeline.

Subcommands: generate (dataset shards + manifest from a JSON spec), encode
(raw trajectory shard -> GAF image shard), export-png (image shard rows ->
grayscale PNGs), estimate (per-record taMSD exponent fits -> CSV), evaluate
(predictions CSV vs manifest -> report).

Exit codes: 0 success, 2 validation error, 3 I/O error. All paths are
explicit; fixed inputs and seeds give identical outputs (thread count never
changes a byte).
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__, estimators, gaf, metrics, pipeline

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_IO = 3


class _CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _load_npy(path, expect_ndim: int) -> np.ndarray:
    try:
        arr = np.load(path)
    except FileNotFoundError as exc:
        raise _CliError(f"cannot read {path}: {exc}", EXIT_IO) from exc
    except (OSError, ValueError) as exc:
        raise _CliError(f"cannot parse {path}: {exc}", EXIT_IO) from exc
    if arr.ndim != expect_ndim:
        raise _CliError(
            f"{path}: expected a {expect_ndim}-d array, got shape {arr.shape}",
            EXIT_VALIDATION,
        )
    return arr


def _emit(summary: dict, as_json: bool, lines: list[str]) -> None:
    if as_json:
        print(json.dumps(summary))
    else:
        for line in lines:
            print(line)


def _cmd_generate(args) -> int:
    try:
        spec = pipeline.DatasetSpec.from_file(args.spec)
    except pipeline.SpecError as exc:
        raise _CliError(f"invalid spec: {exc}", EXIT_VALIDATION) from exc
    except OSError as exc:
        raise _CliError(f"cannot read spec: {exc}", EXIT_IO) from exc
    overrides = {}
    if args.count is not None:
        overrides["count"] = args.count
    if args.master_seed is not None:
        overrides["master_seed"] = args.master_seed
    if args.snr is not None:
        snr = None if args.snr.lower() in ("none", "noiseless", "inf") else float(args.snr)
        overrides["noise"] = pipeline.NoiseSpec(snr)
    if overrides:
        try:
            from dataclasses import replace

            spec = replace(spec, **overrides)
        except pipeline.SpecError as exc:
            raise _CliError(f"invalid spec override: {exc}", EXIT_VALIDATION) from exc
    try:
        summary = pipeline.build_dataset(spec, args.out, threads=args.threads)
    except OSError as exc:
        raise _CliError(f"I/O failure while writing dataset: {exc}", EXIT_IO) from exc
    lines = [
        f"wrote {summary['count']} records to {summary['out_dir']}",
        "files: " + ", ".join(summary["files"]),
        "per model: " + ", ".join(f"{k}={v}" for k, v in summary["by_model"].items()),
        "per split: " + ", ".join(f"{k}={v}" for k, v in summary["by_split"].items()),
    ]
    _emit(summary, args.json, lines)
    return EXIT_OK


def _cmd_encode(args) -> int:
    trajs = _load_npy(args.infile, expect_ndim=2)
    images = gaf.encode_batch(trajs.astype(np.float64), args.kind)
    try:
        np.save(args.out, images)
    except OSError as exc:
        raise _CliError(f"cannot write {args.out}: {exc}", EXIT_IO) from exc
    summary = {
        "records": int(images.shape[0]),
        "image_shape": list(images.shape[1:]),
        "kind": args.kind,
        "out": str(args.out),
    }
    _emit(summary, args.json, [f"encoded {images.shape[0]} x {images.shape[1]}x{images.shape[2]} {args.kind} images to {args.out}"])
    return EXIT_OK


def _parse_ids(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part != ""]
    except ValueError as exc:
        raise _CliError(f"bad --ids list {text!r}: {exc}", EXIT_VALIDATION) from exc


def _cmd_export_png(args) -> int:
    images = _load_npy(args.infile, expect_ndim=3)
    ids = _parse_ids(args.ids)
    for i in ids:
        if not 0 <= i < images.shape[0]:
            raise _CliError(
                f"id {i} out of range for shard with {images.shape[0]} records",
                EXIT_VALIDATION,
            )
    out_dir = Path(args.out)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        stem = Path(args.infile).stem
        paths = []
        for i in ids:
            path = out_dir / f"{stem}_{i:06d}.png"
            gaf.to_png(images[i].astype(np.float64), path)
            paths.append(str(path))
    except OSError as exc:
        raise _CliError(f"cannot write PNGs: {exc}", EXIT_IO) from exc
    _emit({"written": paths}, args.json, [f"wrote {len(paths)} PNGs to {out_dir}"])
    return EXIT_OK


def _cmd_estimate(args) -> int:
    trajs = _load_npy(args.infile, expect_ndim=2)
    try:
        records = pipeline.load_manifest(args.manifest)
    except FileNotFoundError as exc:
        raise _CliError(f"cannot read manifest: {exc}", EXIT_IO) from exc
    except pipeline.SpecError as exc:
        raise _CliError(str(exc), EXIT_VALIDATION) from exc
    if len(records) != trajs.shape[0]:
        raise _CliError(
            f"manifest has {len(records)} rows but shard has {trajs.shape[0]}",
            EXIT_VALIDATION,
        )
    n_degenerate = 0
    try:
        with open(args.out, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["id", "alpha_hat", "residual", "flag"])
            for rec in records:
                x = trajs[rec.id].astype(np.float64)[-rec.raw_length :]
                row = _estimate_row(x)
                if row is None:
                    n_degenerate += 1
                    w.writerow([rec.id, "nan", "nan", "degenerate"])
                else:
                    w.writerow([rec.id, f"{row[0]:.6f}", f"{row[1]:.6f}", ""])
    except OSError as exc:
        raise _CliError(f"cannot write {args.out}: {exc}", EXIT_IO) from exc
    summary = {"records": len(records), "degenerate": n_degenerate, "out": str(args.out)}
    _emit(summary, args.json, [f"estimated {len(records)} records ({n_degenerate} degenerate) -> {args.out}"])
    return EXIT_OK


def _estimate_row(x: np.ndarray):
    curve = estimators.ta_msd(x, max_lag=max(1, len(x) // 4))
    if np.any(curve.values <= 0.0) or len(curve.lags) < 2:
        return None
    slope, _, resid = estimators.loglog_fit(curve.lags, curve.values)
    return slope, resid


def _cmd_evaluate(args) -> int:
    task = {"cls": "classification", "reg": "regression"}[args.task]
    try:
        records = pipeline.load_manifest(args.manifest)
        preds = metrics.load_predictions(args.pred, task)
    except FileNotFoundError as exc:
        raise _CliError(f"cannot read input: {exc}", EXIT_IO) from exc
    except pipeline.SpecError as exc:
        raise _CliError(str(exc), EXIT_VALIDATION) from exc
    try:
        report = metrics.evaluate(records, preds, task)
    except ValueError as exc:
        raise _CliError(f"evaluation failed: {exc}", EXIT_VALIDATION) from exc
    try:
        Path(args.out).write_text(report.to_json() + "\n", encoding="utf-8")
        if args.confusion_csv and report.confusion is not None:
            report.confusion_csv(args.confusion_csv)
    except OSError as exc:
        raise _CliError(f"cannot write report: {exc}", EXIT_IO) from exc
    if args.json:
        print(json.dumps(report.to_dict()))
    else:
        print(report.to_text())
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="gaftraj",
        description="Anomalous-diffusion trajectory datasets as Gramian Angular Field images",
    )
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="build shards + manifest from a JSON dataset spec")
    g.add_argument("spec", help="JSON dataset spec file")
    g.add_argument("--out", required=True, help="output directory")
    g.add_argument("--threads", type=int, default=1, help="worker threads (never changes output bytes)")
    g.add_argument("--count", type=int, default=None, help="override spec count")
    g.add_argument("--master-seed", type=int, default=None, help="override spec master_seed")
    g.add_argument("--snr", default=None, help="override spec noise snr (number or 'none')")
    g.add_argument("--json", action="store_true", help="machine-readable summary on stdout")
    g.set_defaults(func=_cmd_generate)

    e = sub.add_parser("encode", help="encode a [n, 50] trajectory shard to GAF images")
    e.add_argument("--in", dest="infile", required=True, help="input trajectories .npy")
    e.add_argument("--kind", required=True, choices=["gasf", "gadf"])
    e.add_argument("--out", required=True, help="output images .npy")
    e.add_argument("--json", action="store_true")
    e.set_defaults(func=_cmd_encode)

    x = sub.add_parser("export-png", help="write grayscale PNGs for selected shard rows")
    x.add_argument("--in", dest="infile", required=True, help="input images .npy")
    x.add_argument("--ids", required=True, help="comma-separated record ids")
    x.add_argument("--out", required=True, help="output directory")
    x.add_argument("--json", action="store_true")
    x.set_defaults(func=_cmd_export_png)

    s = sub.add_parser("estimate", help="per-record taMSD exponent estimates")
    s.add_argument("--in", dest="infile", required=True, help="input trajectories .npy")
    s.add_argument("--manifest", required=True, help="manifest.csv (for raw lengths)")
    s.add_argument("--out", required=True, help="output estimates .csv")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=_cmd_estimate)

    v = sub.add_parser("evaluate", help="score predictions against a manifest")
    v.add_argument("--manifest", required=True)
    v.add_argument("--pred", required=True, help="predictions .csv")
    v.add_argument("--task", required=True, choices=["cls", "reg"])
    v.add_argument("--out", required=True, help="output report .json")
    v.add_argument("--confusion-csv", default=None, help="also export the confusion matrix as CSV")
    v.add_argument("--json", action="store_true")
    v.set_defaults(func=_cmd_evaluate)
    return p


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
