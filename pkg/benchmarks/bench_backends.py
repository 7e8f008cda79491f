"""Throughput comparison: compiled kernel core vs pure-numpy fallback.

Run after installing (the compiled extension must have built):

    python benchmarks/bench_backends.py

Forces each backend via GAFTRAJ_PURE_PYTHON in a subprocess so the import-time
selection is exercised the same way users hit it.
"""

import json
import os
import subprocess
import sys
import tempfile
import time
from pathlib import Path

WORKER = """
import json, sys, time
import numpy as np
import gaftraj
from gaftraj import RngStream, simulate
from gaftraj.gaf import encode_batch
from gaftraj.pipeline import DatasetSpec, NoiseSpec, build_dataset, default_alpha_grid

results = {"backend": gaftraj.backend_name()}

# batch GAF encoding of [n, 50] rows
g = np.random.default_rng(0)
rows = g.standard_normal((4000, 50))
t0 = time.time()
for kind in ("gasf", "gadf"):
    encode_batch(rows, kind)
results["encode_rows_per_s"] = 2 * len(rows) / (time.time() - t0)

# event-driven simulators (step/ramp sampling kernels)
for model, alpha in (("CTRW", 0.5), ("LW", 1.5), ("ATTM", 0.5)):
    t0 = time.time()
    for i in range(3000):
        simulate(model, alpha, 50, RngStream(1, i))
    results[f"sim_{model.lower()}_per_s"] = 3000 / (time.time() - t0)

# end-to-end dataset build
spec = DatasetSpec(
    task="classification", count=3000, length_range=(10, 50),
    alpha_grid=tuple(default_alpha_grid()), noise=NoiseSpec(1.0),
    master_seed=5, split_fractions={"train": 0.95, "validation": 0.05},
)
t0 = time.time()
build_dataset(spec, sys.argv[1], threads=1)
results["build_records_per_s"] = spec.count / (time.time() - t0)

print(json.dumps(results))
"""


def run(pure: bool) -> dict:
    env = dict(os.environ)
    env["GAFTRAJ_PURE_PYTHON"] = "1" if pure else "0"
    with tempfile.TemporaryDirectory() as tmp:
        out = subprocess.run(
            [sys.executable, "-c", WORKER, str(Path(tmp) / "ds")],
            env=env,
            check=True,
            capture_output=True,
            text=True,
        )
    return json.loads(out.stdout.strip().splitlines()[-1])


def main():
    fast = run(pure=False)
    pure = run(pure=True)
    if fast["backend"] == pure["backend"]:
        print("compiled extension unavailable; both runs used the fallback")
    rows = [k for k in fast if k != "backend"]
    width = max(len(r) for r in rows)
    print(f"{'metric':<{width}}  {'compiled':>12}  {'python':>12}  {'speedup':>8}")
    for key in rows:
        ratio = fast[key] / pure[key]
        print(f"{key:<{width}}  {fast[key]:>12,.0f}  {pure[key]:>12,.0f}  {ratio:>7.2f}x")


if __name__ == "__main__":
    main()
