"""Dataset generation at the short-trajectory protocol settings.

Per record, deterministically derived from (master_seed, record id):
model uniform over the five regimes, alpha uniform over the grid restricted
to the model's domain, raw length uniform in [10, 50], Gaussian localization
noise at fixed SNR, zero-prefix padding to length 50, GASF/GADF encoding,
and a stable train/validation split. Output is bit-identical for a fixed
spec regardless of worker count.

Shards are NPY v1.0 arrays (trajectories [count, 50] float32, images
[count, 50, 50] float32, row index = record id); the manifest is a CSV with
header id,model,model_code,alpha,raw_length,snr,split,seed_hi,seed_lo.
"""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from . import gaf
from .rng import RngStream
from .simulators import DiffusionModelKind, Trajectory, alpha_domain, simulate

__all__ = [
    "SpecError",
    "NoiseSpec",
    "DatasetSpec",
    "DatasetRecord",
    "default_alpha_grid",
    "add_noise",
    "displacement_std",
    "pad_to_fixed",
    "sample_spec_record",
    "generate_record",
    "build_dataset",
    "load_manifest",
    "write_manifest",
]

PADDED_LENGTH = 50
TASKS = ("classification", "regression")
SPLIT_ORDER = ("train", "validation", "test")
ENCODINGS = ("gasf", "gadf", "raw")
TRAJECTORY_SHARD = "trajectories.npy"
MANIFEST_NAME = "manifest.csv"
MANIFEST_FIELDS = (
    "id",
    "model",
    "model_code",
    "alpha",
    "raw_length",
    "snr",
    "split",
    "seed_hi",
    "seed_lo",
)

_CHUNK = 512

# substream tags off each record's stream
_TAG_PARAMS, _TAG_TRAJECTORY, _TAG_NOISE = 0, 1, 2


class SpecError(ValueError):
    """Invalid dataset spec or prediction/manifest input (CLI exit code 2)."""


def default_alpha_grid() -> np.ndarray:
    """alpha in 0.05 .. 1.95, step 0.05."""
    return np.round(np.arange(1, 40) * 0.05, 2)


@dataclass(frozen=True)
class NoiseSpec:
    """Localization noise level; snr = None means noiseless."""

    snr: float | None

    def __post_init__(self):
        if self.snr is not None and not self.snr > 0:
            raise SpecError(f"snr must be positive, got {self.snr}")

    @property
    def noiseless(self) -> bool:
        return self.snr is None or math.isinf(self.snr)


@dataclass(frozen=True)
class DatasetSpec:
    task: str
    count: int
    length_range: tuple[int, int]
    alpha_grid: tuple[float, ...]
    noise: NoiseSpec
    master_seed: int
    split_fractions: dict[str, float]
    encodings: tuple[str, ...] = ("gasf", "gadf")

    def __post_init__(self):
        if self.task not in TASKS:
            raise SpecError(f"task must be one of {TASKS}, got {self.task!r}")
        if self.count < 1:
            raise SpecError(f"count must be >= 1, got {self.count}")
        lo, hi = self.length_range
        if not (10 <= lo <= hi <= PADDED_LENGTH):
            raise SpecError(
                f"length_range must satisfy 10 <= lo <= hi <= {PADDED_LENGTH}, "
                f"got [{lo}, {hi}]"
            )
        if not self.alpha_grid:
            raise SpecError("alpha_grid must be nonempty")
        for a in self.alpha_grid:
            if not 0.0 < a < 2.0:
                raise SpecError(f"alpha grid value {a} outside (0, 2)")
        for model in DiffusionModelKind:
            if len(_domain_filter(self.alpha_grid, model)) == 0:
                raise SpecError(f"alpha grid has no value in the {model.name} domain")
        for enc in self.encodings:
            if enc not in ENCODINGS:
                raise SpecError(f"unknown encoding {enc!r} (expected {ENCODINGS})")
        bad = set(self.split_fractions) - set(SPLIT_ORDER)
        if bad:
            raise SpecError(f"unknown split names {sorted(bad)}")
        total = sum(self.split_fractions.values())
        if any(f < 0 for f in self.split_fractions.values()) or abs(total - 1.0) > 1e-9:
            raise SpecError(f"split fractions must be >= 0 and sum to 1, got {total}")

    @classmethod
    def from_dict(cls, doc: dict) -> "DatasetSpec":
        required = {
            "task",
            "count",
            "length_range",
            "alpha_grid",
            "noise",
            "master_seed",
            "split_fractions",
        }
        missing = required - set(doc)
        if missing:
            raise SpecError(f"spec missing required fields: {sorted(missing)}")
        unknown = set(doc) - required - {"encodings"}
        if unknown:
            raise SpecError(f"spec has unknown fields: {sorted(unknown)}")
        noise_doc = doc["noise"]
        if not isinstance(noise_doc, dict) or "snr" not in noise_doc:
            raise SpecError('spec "noise" must be an object with an "snr" field')
        try:
            return cls(
                task=doc["task"],
                count=int(doc["count"]),
                length_range=tuple(int(v) for v in doc["length_range"]),
                alpha_grid=tuple(float(a) for a in doc["alpha_grid"]),
                noise=NoiseSpec(
                    None if noise_doc["snr"] is None else float(noise_doc["snr"])
                ),
                master_seed=int(doc["master_seed"]),
                split_fractions={
                    str(k): float(v) for k, v in doc["split_fractions"].items()
                },
                encodings=tuple(
                    str(e).lower() for e in doc.get("encodings", ("gasf", "gadf"))
                ),
            )
        except (TypeError, ValueError) as exc:
            if isinstance(exc, SpecError):
                raise
            raise SpecError(f"malformed spec: {exc}") from exc

    @classmethod
    def from_file(cls, path) -> "DatasetSpec":
        try:
            doc = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise SpecError(f"spec file is not valid JSON: {exc}") from exc
        return cls.from_dict(doc)


@dataclass
class DatasetRecord:
    id: int
    model: DiffusionModelKind
    alpha: float
    raw_length: int
    snr: float  # inf marks noiseless / degenerate (noise omitted)
    split: str
    seed_hi: int
    seed_lo: int

    @property
    def model_code(self) -> int:
        return int(self.model)


def displacement_std(traj: Trajectory | np.ndarray) -> float:
    """Sample standard deviation of the trajectory's unit-step displacements."""
    x = traj.positions if isinstance(traj, Trajectory) else np.asarray(traj)
    return float(np.std(np.diff(x), ddof=1))


def add_noise(traj: Trajectory, noise: NoiseSpec, rng: RngStream) -> Trajectory:
    """Add iid Gaussian localization noise to every position.

    sigma_noise = sigma_D / snr with sigma_D the clean displacement std.
    Noiseless spec or a degenerate (immobile) trajectory returns the input
    unchanged with snr staying at inf, which flags the record downstream.
    """
    if noise.noiseless:
        return traj
    sigma_d = displacement_std(traj)
    if sigma_d == 0.0:
        return traj
    g = rng.generator()
    noisy = traj.positions + (sigma_d / noise.snr) * g.standard_normal(traj.length)
    return replace(traj, positions=noisy, snr=float(noise.snr))


def pad_to_fixed(traj: Trajectory | np.ndarray, target_length: int = PADDED_LENGTH) -> np.ndarray:
    """Zero-prefix pad to the fixed image length (trailing values unchanged)."""
    x = traj.positions if isinstance(traj, Trajectory) else np.asarray(traj)
    if len(x) > target_length:
        raise ValueError(f"trajectory length {len(x)} exceeds target {target_length}")
    out = np.zeros(target_length, dtype=np.float64)
    out[target_length - len(x) :] = x
    return out


def _domain_filter(grid, model: DiffusionModelKind) -> np.ndarray:
    lo, hi, lo_open, hi_open = alpha_domain(model)
    g = np.asarray(grid, dtype=np.float64)
    mask = (g > lo if lo_open else g >= lo) & (g < hi if hi_open else g <= hi)
    return g[mask]


def sample_spec_record(spec: DatasetSpec, index: int) -> DatasetRecord:
    """Derive a record's (model, alpha, length, split) from (master_seed, index).

    Fixed draw order: model, alpha (uniform over the domain-restricted grid),
    length, split uniform. The snr field carries the spec value; build_dataset
    replaces it with inf when noise ends up omitted for a degenerate record.
    """
    if index >= spec.count:
        raise SpecError(f"record index {index} out of range for count {spec.count}")
    g = RngStream(spec.master_seed, index).child(_TAG_PARAMS).generator()
    model = DiffusionModelKind(int(g.integers(len(DiffusionModelKind))))
    filtered = _domain_filter(spec.alpha_grid, model)
    alpha = float(filtered[int(g.integers(len(filtered)))])
    lo, hi = spec.length_range
    raw_length = int(g.integers(lo, hi + 1))
    u = float(g.random())
    split = SPLIT_ORDER[-1]
    acc = 0.0
    for name in SPLIT_ORDER:
        acc += spec.split_fractions.get(name, 0.0)
        if u < acc:
            split = name
            break
    snr = math.inf if spec.noise.noiseless else float(spec.noise.snr)
    return DatasetRecord(
        id=index,
        model=model,
        alpha=alpha,
        raw_length=raw_length,
        snr=snr,
        split=split,
        seed_hi=spec.master_seed,
        seed_lo=index,
    )


def generate_record(spec: DatasetSpec, index: int) -> tuple[DatasetRecord, np.ndarray]:
    """Simulate, noise, and pad one record; returns (record, float32 row).

    The padded row is cast to float32 before encoding so that re-encoding the
    stored shard row reproduces the stored images bit-for-bit.
    """
    record = sample_spec_record(spec, index)
    stream = RngStream(spec.master_seed, index)
    traj = simulate(record.model, record.alpha, record.raw_length, stream.child(_TAG_TRAJECTORY))
    noisy = add_noise(traj, spec.noise, stream.child(_TAG_NOISE))
    record.snr = noisy.snr
    return record, pad_to_fixed(noisy).astype(np.float32)


def _format_float(v: float) -> str:
    return str(float(v))


def write_manifest(records, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(MANIFEST_FIELDS)
        for r in records:
            w.writerow(
                [
                    r.id,
                    r.model.name,
                    r.model_code,
                    _format_float(r.alpha),
                    r.raw_length,
                    _format_float(r.snr),
                    r.split,
                    r.seed_hi,
                    r.seed_lo,
                ]
            )


def load_manifest(path) -> list[DatasetRecord]:
    records = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or tuple(reader.fieldnames) != MANIFEST_FIELDS:
            raise SpecError(
                f"manifest header mismatch: expected {','.join(MANIFEST_FIELDS)}"
            )
        for row in reader:
            records.append(
                DatasetRecord(
                    id=int(row["id"]),
                    model=DiffusionModelKind[row["model"]],
                    alpha=float(row["alpha"]),
                    raw_length=int(row["raw_length"]),
                    snr=float(row["snr"]),
                    split=row["split"],
                    seed_hi=int(row["seed_hi"]),
                    seed_lo=int(row["seed_lo"]),
                )
            )
    return records


def build_dataset(spec: DatasetSpec, out_dir, threads: int = 1) -> dict:
    """Generate all records and write shards plus manifest into out_dir.

    Record content depends only on (master_seed, record id), chunks are
    written back in id order, so shard bytes do not depend on `threads`.
    Returns a summary dict (paths, per-model and per-split counts).
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    image_kinds = [e for e in spec.encodings if e != "raw"]

    traj_mm = np.lib.format.open_memmap(
        out / TRAJECTORY_SHARD, mode="w+", dtype=np.float32, shape=(spec.count, PADDED_LENGTH)
    )
    image_mms = {
        kind: np.lib.format.open_memmap(
            out / f"{kind}.npy",
            mode="w+",
            dtype=np.float32,
            shape=(spec.count, PADDED_LENGTH, PADDED_LENGTH),
        )
        for kind in image_kinds
    }

    def produce(bounds):
        a, b = bounds
        rows = np.empty((b - a, PADDED_LENGTH), dtype=np.float32)
        recs = []
        for i in range(a, b):
            rec, row = generate_record(spec, i)
            rows[i - a] = row
            recs.append(rec)
        images = {k: gaf.encode_batch(rows, k) for k in image_kinds}
        return a, b, recs, rows, images

    chunks = [(a, min(a + _CHUNK, spec.count)) for a in range(0, spec.count, _CHUNK)]
    records: list[DatasetRecord] = []

    def consume(result):
        a, b, recs, rows, images = result
        traj_mm[a:b] = rows
        for k, arr in images.items():
            image_mms[k][a:b] = arr
        records.extend(recs)

    if threads <= 1:
        for bounds in chunks:
            consume(produce(bounds))
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for result in pool.map(produce, chunks):
                consume(result)

    traj_mm.flush()
    for mm in image_mms.values():
        mm.flush()
    write_manifest(records, out / MANIFEST_NAME)

    by_model = {k.name: 0 for k in DiffusionModelKind}
    by_split = {}
    for r in records:
        by_model[r.model.name] += 1
        by_split[r.split] = by_split.get(r.split, 0) + 1
    return {
        "count": spec.count,
        "out_dir": str(out),
        "files": [TRAJECTORY_SHARD]
        + [f"{k}.npy" for k in image_kinds]
        + [MANIFEST_NAME],
        "by_model": by_model,
        "by_split": by_split,
    }
