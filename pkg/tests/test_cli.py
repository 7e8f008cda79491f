import csv
import json
import math

import numpy as np
import pytest
from PIL import Image

from gaftraj import RngStream, simulate_fbm
from gaftraj.cli import main
from gaftraj.gaf import encode_batch
from gaftraj.pipeline import DatasetRecord, write_manifest
from gaftraj.simulators import DiffusionModelKind


def write_spec(tmp_path, **overrides):
    doc = {
        "task": "classification",
        "count": 30,
        "length_range": [10, 50],
        "alpha_grid": [round(0.05 * k, 2) for k in range(1, 40)],
        "noise": {"snr": 1.0},
        "master_seed": 99,
        "split_fractions": {"train": 0.95, "validation": 0.05},
    }
    doc.update(overrides)
    path = tmp_path / "spec.json"
    path.write_text(json.dumps(doc))
    return path


def fbm_manifest(tmp_path, n, length=50, alpha=0.5, seed=4242):
    """Hand-built shard + manifest of FBM records (manifest format is the
    external interface, so writing it directly is fair game)."""
    rows = np.zeros((n, 50), dtype=np.float32)
    records = []
    for i in range(n):
        traj = simulate_fbm(alpha, length, RngStream(seed, i))
        rows[i, 50 - length :] = traj.positions.astype(np.float32)
        records.append(
            DatasetRecord(
                id=i, model=DiffusionModelKind.FBM, alpha=alpha,
                raw_length=length, snr=math.inf, split="train",
                seed_hi=seed, seed_lo=i,
            )
        )
    np.save(tmp_path / "trajs.npy", rows)
    write_manifest(records, tmp_path / "manifest.csv")
    return tmp_path / "trajs.npy", tmp_path / "manifest.csv"


class TestTopLevel:
    def test_version(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["--version"])
        assert exc.value.code == 0
        assert "gaftraj" in capsys.readouterr().out


class TestGenerate:
    def test_produces_files_and_summary(self, tmp_path, capsys):
        spec = write_spec(tmp_path)
        rc = main(["generate", str(spec), "--out", str(tmp_path / "d"), "--json"])
        assert rc == 0
        summary = json.loads(capsys.readouterr().out)
        assert summary["count"] == 30
        for name in ("trajectories.npy", "gasf.npy", "gadf.npy", "manifest.csv"):
            assert (tmp_path / "d" / name).exists()

    def test_rerun_identical_bytes(self, tmp_path):
        spec = write_spec(tmp_path)
        assert main(["generate", str(spec), "--out", str(tmp_path / "a")]) == 0
        assert main(["generate", str(spec), "--out", str(tmp_path / "b")]) == 0
        for name in ("trajectories.npy", "gasf.npy", "gadf.npy", "manifest.csv"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_invalid_alpha_grid_exit_2(self, tmp_path):
        spec = write_spec(tmp_path, alpha_grid=[0.0, 2.5])
        assert main(["generate", str(spec), "--out", str(tmp_path / "d")]) == 2

    def test_missing_spec_exit_3(self, tmp_path):
        assert main(["generate", str(tmp_path / "nope.json"), "--out", str(tmp_path / "d")]) == 3

    def test_overrides(self, tmp_path, capsys):
        spec = write_spec(tmp_path)
        rc = main(
            ["generate", str(spec), "--out", str(tmp_path / "d"), "--count", "10",
             "--snr", "none", "--json"]
        )
        assert rc == 0
        assert json.loads(capsys.readouterr().out)["count"] == 10


class TestEncode:
    def test_shape_and_symmetry(self, tmp_path):
        g = np.random.default_rng(0)
        rows = g.standard_normal((6, 50)).astype(np.float32)
        np.save(tmp_path / "t.npy", rows)
        rc = main(["encode", "--in", str(tmp_path / "t.npy"), "--kind", "gasf",
                   "--out", str(tmp_path / "img.npy")])
        assert rc == 0
        img = np.load(tmp_path / "img.npy")
        assert img.shape == (6, 50, 50) and img.dtype == np.float32
        assert np.array_equal(img[0], img[0].T)

    def test_deterministic_bytes(self, tmp_path):
        rows = np.random.default_rng(1).standard_normal((4, 50))
        np.save(tmp_path / "t.npy", rows)
        main(["encode", "--in", str(tmp_path / "t.npy"), "--kind", "gadf", "--out", str(tmp_path / "a.npy")])
        main(["encode", "--in", str(tmp_path / "t.npy"), "--kind", "gadf", "--out", str(tmp_path / "b.npy")])
        assert (tmp_path / "a.npy").read_bytes() == (tmp_path / "b.npy").read_bytes()

    def test_shape_mismatch_exit_2(self, tmp_path):
        np.save(tmp_path / "t.npy", np.zeros((2, 3, 4)))
        rc = main(["encode", "--in", str(tmp_path / "t.npy"), "--kind", "gasf",
                   "--out", str(tmp_path / "o.npy")])
        assert rc == 2

    def test_missing_input_exit_3(self, tmp_path):
        rc = main(["encode", "--in", str(tmp_path / "missing.npy"), "--kind", "gasf",
                   "--out", str(tmp_path / "o.npy")])
        assert rc == 3


class TestExportPng:
    def test_constant_series_uniform_midgray(self, tmp_path):
        rows = np.full((3, 50), 2.5)
        imgs = encode_batch(rows, "gadf")
        np.save(tmp_path / "img.npy", imgs)
        rc = main(["export-png", "--in", str(tmp_path / "img.npy"), "--ids", "0,2",
                   "--out", str(tmp_path / "png")])
        assert rc == 0
        px = np.asarray(Image.open(tmp_path / "png" / "img_000000.png"))
        assert px.shape == (50, 50)
        assert np.all(px == 128)

    def test_id_out_of_range_exit_2(self, tmp_path):
        np.save(tmp_path / "img.npy", np.zeros((2, 5, 5), dtype=np.float32))
        rc = main(["export-png", "--in", str(tmp_path / "img.npy"), "--ids", "5",
                   "--out", str(tmp_path / "png")])
        assert rc == 2

    def test_missing_file_exit_3(self, tmp_path):
        rc = main(["export-png", "--in", str(tmp_path / "none.npy"), "--ids", "0",
                   "--out", str(tmp_path / "png")])
        assert rc == 3


class TestEstimate:
    def test_ballistic_and_immobile_fixtures(self, tmp_path):
        rows = np.zeros((2, 50), dtype=np.float32)
        rows[0] = np.arange(50.0)  # ballistic
        np.save(tmp_path / "t.npy", rows)
        records = [
            DatasetRecord(id=i, model=DiffusionModelKind.SBM, alpha=1.0,
                          raw_length=50, snr=math.inf, split="train", seed_hi=0, seed_lo=i)
            for i in range(2)
        ]
        write_manifest(records, tmp_path / "m.csv")
        rc = main(["estimate", "--in", str(tmp_path / "t.npy"), "--manifest",
                   str(tmp_path / "m.csv"), "--out", str(tmp_path / "est.csv")])
        assert rc == 0
        with open(tmp_path / "est.csv") as fh:
            out = list(csv.DictReader(fh))
        assert float(out[0]["alpha_hat"]) == pytest.approx(2.0, abs=1e-6)
        assert out[1]["flag"] == "degenerate"
        assert math.isnan(float(out[1]["alpha_hat"]))

    def test_fbm_batch_median(self, tmp_path):
        # spec example: 1e4 FBM alpha=0.5 records -> median alpha_hat 0.5 +- 0.1
        # (oracle at this seed: 0.463)
        traj_path, man_path = fbm_manifest(tmp_path, 10_000, length=50, alpha=0.5)
        rc = main(["estimate", "--in", str(traj_path), "--manifest", str(man_path),
                   "--out", str(tmp_path / "est.csv")])
        assert rc == 0
        with open(tmp_path / "est.csv") as fh:
            alphas = [float(r["alpha_hat"]) for r in csv.DictReader(fh) if r["flag"] == ""]
        assert abs(float(np.median(alphas)) - 0.5) <= 0.1

    def test_respects_raw_length_trimming(self, tmp_path):
        traj_path, man_path = fbm_manifest(tmp_path, 5, length=20, alpha=1.0)
        rc = main(["estimate", "--in", str(traj_path), "--manifest", str(man_path),
                   "--out", str(tmp_path / "est.csv")])
        assert rc == 0
        with open(tmp_path / "est.csv") as fh:
            rows = list(csv.DictReader(fh))
        # padded zeros would make every row degenerate-looking; trimmed rows fit fine
        assert all(r["flag"] == "" for r in rows)

    def test_row_count_mismatch_exit_2(self, tmp_path):
        traj_path, man_path = fbm_manifest(tmp_path, 4)
        np.save(tmp_path / "extra.npy", np.zeros((9, 50), dtype=np.float32))
        rc = main(["estimate", "--in", str(tmp_path / "extra.npy"), "--manifest",
                   str(man_path), "--out", str(tmp_path / "est.csv")])
        assert rc == 2


class TestEvaluate:
    def _manifest(self, tmp_path, codes):
        records = [
            DatasetRecord(id=i, model=DiffusionModelKind(c), alpha=1.0,
                          raw_length=50, snr=1.0, split="train", seed_hi=0, seed_lo=i)
            for i, c in enumerate(codes)
        ]
        write_manifest(records, tmp_path / "m.csv")
        return tmp_path / "m.csv"

    def test_perfect_classification(self, tmp_path, capsys):
        codes = [0, 1, 2, 3, 4] * 4
        man = self._manifest(tmp_path, codes)
        with open(tmp_path / "p.csv", "w") as fh:
            fh.write("id,pred_code\n")
            for i, c in enumerate(codes):
                fh.write(f"{i},{c}\n")
        rc = main(["evaluate", "--manifest", str(man), "--pred", str(tmp_path / "p.csv"),
                   "--task", "cls", "--out", str(tmp_path / "r.json"), "--json"])
        assert rc == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["micro_f1"] == 1.0
        saved = json.loads((tmp_path / "r.json").read_text())
        assert saved["micro_f1"] == 1.0

    def test_constant_class_floor(self, tmp_path, capsys):
        codes = [0, 1, 2, 3, 4] * 10
        man = self._manifest(tmp_path, codes)
        with open(tmp_path / "p.csv", "w") as fh:
            fh.write("id,pred_code\n")
            for i in range(len(codes)):
                fh.write(f"{i},2\n")
        rc = main(["evaluate", "--manifest", str(man), "--pred", str(tmp_path / "p.csv"),
                   "--task", "cls", "--out", str(tmp_path / "r.json"), "--json"])
        assert rc == 0
        assert json.loads(capsys.readouterr().out)["micro_f1"] == pytest.approx(0.2)

    def test_regression_identity_and_confusion_csv(self, tmp_path, capsys):
        records = [
            DatasetRecord(id=i, model=DiffusionModelKind.FBM, alpha=0.1 * (i + 1),
                          raw_length=50, snr=1.0, split="train", seed_hi=0, seed_lo=i)
            for i in range(5)
        ]
        write_manifest(records, tmp_path / "m.csv")
        with open(tmp_path / "p.csv", "w") as fh:
            fh.write("id,pred_alpha\n")
            for i in range(5):
                fh.write(f"{i},{0.1 * (i + 1)}\n")
        rc = main(["evaluate", "--manifest", str(tmp_path / "m.csv"), "--pred",
                   str(tmp_path / "p.csv"), "--task", "reg", "--out", str(tmp_path / "r.json"),
                   "--json"])
        assert rc == 0
        assert json.loads(capsys.readouterr().out)["mae"] == pytest.approx(0.0, abs=1e-12)

    def test_id_mismatch_exit_2(self, tmp_path):
        man = self._manifest(tmp_path, [0, 1])
        with open(tmp_path / "p.csv", "w") as fh:
            fh.write("id,pred_code\n0,0\n9,1\n")
        rc = main(["evaluate", "--manifest", str(man), "--pred", str(tmp_path / "p.csv"),
                   "--task", "cls", "--out", str(tmp_path / "r.json")])
        assert rc == 2
