import json
import math

import numpy as np
import pytest

from gaftraj import DiffusionModelKind, RngStream, simulate_fbm
from gaftraj.gaf import encode_batch
from gaftraj.pipeline import (
    DatasetSpec,
    NoiseSpec,
    SpecError,
    add_noise,
    build_dataset,
    default_alpha_grid,
    displacement_std,
    generate_record,
    load_manifest,
    pad_to_fixed,
    sample_spec_record,
)
from gaftraj.simulators import Trajectory, alpha_domain


def make_spec(**overrides):
    base = dict(
        task="classification",
        count=100,
        length_range=(10, 50),
        alpha_grid=tuple(default_alpha_grid()),
        noise=NoiseSpec(1.0),
        master_seed=2024,
        split_fractions={"train": 0.95, "validation": 0.05},
    )
    base.update(overrides)
    return DatasetSpec(**base)


class TestSpecValidation:
    def test_happy_path(self):
        spec = make_spec()
        assert spec.encodings == ("gasf", "gadf")

    @pytest.mark.parametrize(
        "overrides",
        [
            dict(task="segmentation"),
            dict(count=0),
            dict(length_range=(5, 50)),
            dict(length_range=(10, 60)),
            dict(length_range=(40, 20)),
            dict(alpha_grid=()),
            dict(alpha_grid=(0.5, 2.0)),
            dict(alpha_grid=(0.0,)),
            dict(alpha_grid=(0.5,)),  # empty LW domain
            dict(split_fractions={"train": 0.5, "validation": 0.1}),
            dict(split_fractions={"train": 0.95, "holdout": 0.05}),
            dict(encodings=("gasf", "wavelet")),
        ],
    )
    def test_rejections(self, overrides):
        with pytest.raises(SpecError):
            make_spec(**overrides)

    def test_noise_spec_positive(self):
        with pytest.raises(SpecError):
            NoiseSpec(0.0)
        with pytest.raises(SpecError):
            NoiseSpec(-2.0)
        assert NoiseSpec(None).noiseless
        assert NoiseSpec(math.inf).noiseless
        assert not NoiseSpec(2.0).noiseless

    def test_from_file_round_trip(self, tmp_path):
        doc = {
            "task": "regression",
            "count": 12,
            "length_range": [10, 50],
            "alpha_grid": [0.5, 1.0, 1.5],
            "noise": {"snr": None},
            "master_seed": 7,
            "split_fractions": {"train": 0.95, "validation": 0.05},
            "encodings": ["gasf"],
        }
        path = tmp_path / "spec.json"
        path.write_text(json.dumps(doc))
        spec = DatasetSpec.from_file(path)
        assert spec.count == 12
        assert spec.noise.noiseless
        assert spec.encodings == ("gasf",)

    def test_from_dict_missing_and_unknown_fields(self):
        with pytest.raises(SpecError, match="missing"):
            DatasetSpec.from_dict({"task": "classification"})
        doc = {
            "task": "classification",
            "count": 5,
            "length_range": [10, 50],
            "alpha_grid": [1.0],
            "noise": {"snr": 1},
            "master_seed": 0,
            "split_fractions": {"train": 1.0},
            "typo_field": True,
        }
        with pytest.raises(SpecError, match="unknown"):
            DatasetSpec.from_dict(doc)

    def test_bad_json_file(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        with pytest.raises(SpecError):
            DatasetSpec.from_file(path)


class TestAddNoise:
    def test_noiseless_sentinel_identity(self):
        traj = simulate_fbm(1.0, 30, RngStream(1, 1))
        out = add_noise(traj, NoiseSpec(None), RngStream(1, 2))
        assert out is traj

    @pytest.mark.parametrize("snr", [1.0, 2.0])
    def test_noise_calibration(self, snr):
        # pooled std of (noisy - clean)/sigma_D over many records -> 1/snr
        ratios = []
        for i in range(5000):
            traj = simulate_fbm(1.0, 20, RngStream(77, i))
            sigma_d = displacement_std(traj)
            noisy = add_noise(traj, NoiseSpec(snr), RngStream(78, i))
            ratios.append((noisy.positions - traj.positions) / sigma_d)
        pooled = np.std(np.concatenate(ratios))
        assert pooled == pytest.approx(1.0 / snr, abs=0.01)

    def test_noise_marks_snr(self):
        traj = simulate_fbm(1.0, 20, RngStream(2, 0))
        noisy = add_noise(traj, NoiseSpec(2.0), RngStream(2, 1))
        assert noisy.snr == 2.0
        assert traj.snr == math.inf

    def test_degenerate_trajectory_skips_noise(self):
        flat = Trajectory(np.zeros(20), DiffusionModelKind.CTRW, 0.5, 0)
        out = add_noise(flat, NoiseSpec(1.0), RngStream(3, 0))
        assert out is flat
        assert out.snr == math.inf


class TestPadding:
    def test_full_length_unchanged(self):
        x = np.arange(50.0)
        assert np.array_equal(pad_to_fixed(x), x)

    def test_short_zero_prefix(self):
        x = np.arange(1.0, 11.0)
        padded = pad_to_fixed(x)
        assert len(padded) == 50
        assert np.all(padded[:40] == 0.0)
        assert np.array_equal(padded[40:], x)

    def test_too_long_rejected(self):
        with pytest.raises(ValueError):
            pad_to_fixed(np.zeros(51))

    def test_noise_applied_before_padding(self):
        # pad prefix stays exactly zero even for noisy records
        spec = make_spec(count=50)
        for i in range(50):
            rec, row = generate_record(spec, i)
            pad = 50 - rec.raw_length
            assert np.all(row[:pad] == 0.0)


class TestSampleSpecRecord:
    def test_deterministic(self):
        spec = make_spec(count=1000)
        a = sample_spec_record(spec, 123)
        b = sample_spec_record(spec, 123)
        assert (a.model, a.alpha, a.raw_length, a.split) == (b.model, b.alpha, b.raw_length, b.split)

    def test_out_of_range_index(self):
        with pytest.raises(SpecError):
            sample_spec_record(make_spec(count=10), 10)

    def test_model_alpha_domain_respected(self):
        spec = make_spec(count=3000)
        for i in range(3000):
            rec = sample_spec_record(spec, i)
            lo, hi, lo_open, hi_open = alpha_domain(rec.model)
            assert (rec.alpha > lo if lo_open else rec.alpha >= lo)
            assert (rec.alpha < hi if hi_open else rec.alpha <= hi)
            if rec.model is DiffusionModelKind.LW:
                assert rec.alpha >= 1.0
            assert 10 <= rec.raw_length <= 50

    def test_model_frequencies_uniform(self):
        # 0.20 +- 0.01 per model; verified at 1e6 during development, run at
        # 2e5 here (binomial sigma 0.0009)
        spec = make_spec(count=200_000)
        counts = np.zeros(5)
        for i in range(spec.count):
            counts[sample_spec_record(spec, i).model_code] += 1
        assert np.all(np.abs(counts / spec.count - 0.2) < 0.01)

    def test_split_fractions(self):
        spec = make_spec(count=20_000)
        splits = [sample_spec_record(spec, i).split for i in range(spec.count)]
        frac_val = splits.count("validation") / len(splits)
        assert frac_val == pytest.approx(0.05, abs=0.01)
        assert set(splits) == {"train", "validation"}

    def test_test_only_split(self):
        spec = make_spec(split_fractions={"test": 1.0})
        assert sample_spec_record(spec, 0).split == "test"


class TestBuildDataset:
    def test_outputs_and_manifest(self, tmp_path):
        spec = make_spec(count=60)
        summary = build_dataset(spec, tmp_path / "d")
        for name in ("trajectories.npy", "gasf.npy", "gadf.npy", "manifest.csv"):
            assert (tmp_path / "d" / name).exists()
        trajs = np.load(tmp_path / "d" / "trajectories.npy")
        gasf_shard = np.load(tmp_path / "d" / "gasf.npy")
        assert trajs.shape == (60, 50) and trajs.dtype == np.float32
        assert gasf_shard.shape == (60, 50, 50) and gasf_shard.dtype == np.float32
        records = load_manifest(tmp_path / "d" / "manifest.csv")
        assert len(records) == 60
        assert [r.id for r in records] == list(range(60))
        assert summary["by_model"] and sum(summary["by_model"].values()) == 60

    def test_thread_count_does_not_change_bytes(self, tmp_path):
        spec = make_spec(count=70)
        build_dataset(spec, tmp_path / "a", threads=1)
        build_dataset(spec, tmp_path / "b", threads=4)
        for name in ("trajectories.npy", "gasf.npy", "gadf.npy", "manifest.csv"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_shard_roundtrip_reencoding(self, tmp_path):
        # stored images = re-encoding of the stored raw rows, byte for byte
        spec = make_spec(count=40)
        build_dataset(spec, tmp_path / "d")
        trajs = np.load(tmp_path / "d" / "trajectories.npy")
        for kind in ("gasf", "gadf"):
            stored = np.load(tmp_path / "d" / f"{kind}.npy")
            again = encode_batch(trajs.astype(np.float64), kind)
            assert stored.tobytes() == again.tobytes()

    def test_manifest_fields_round_trip(self, tmp_path):
        spec = make_spec(count=25, noise=NoiseSpec(None))
        build_dataset(spec, tmp_path / "d")
        records = load_manifest(tmp_path / "d" / "manifest.csv")
        for rec in records:
            assert rec.seed_hi == spec.master_seed
            assert rec.seed_lo == rec.id
            assert math.isinf(rec.snr)
            ref = sample_spec_record(spec, rec.id)
            assert rec.model is ref.model
            assert rec.alpha == ref.alpha
            assert rec.raw_length == ref.raw_length
            assert rec.split == ref.split

    def test_raw_only_encoding(self, tmp_path):
        spec = make_spec(count=10, encodings=("raw",))
        summary = build_dataset(spec, tmp_path / "d")
        assert (tmp_path / "d" / "trajectories.npy").exists()
        assert not (tmp_path / "d" / "gasf.npy").exists()
        assert summary["files"] == ["trajectories.npy", "manifest.csv"]

    def test_gasf_only_encoding(self, tmp_path):
        spec = make_spec(count=100, encodings=("gasf",))
        build_dataset(spec, tmp_path / "d")
        imgs = np.load(tmp_path / "d" / "gasf.npy")
        assert imgs.shape == (100, 50, 50) and imgs.dtype == np.float32
        assert not (tmp_path / "d" / "gadf.npy").exists()
        assert len(load_manifest(tmp_path / "d" / "manifest.csv")) == 100
