"""Timing comparison of the numba kernel path against the pure-numpy fallback.

Each scenario runs in a fresh subprocess so the two paths never share a
process (the env flag SPECSEP_NUMBA is read at import time). Usage:

    python benchmarks/bench_kernels.py
"""

from __future__ import annotations

import json
import os
import subprocess
import sys

SCENARIOS = {
    "fixed_point_200_points": """
import numpy as np
from specsep import JointSpectrum, ModelConfig, solve_at
cfg = ModelConfig(JointSpectrum.from_atoms(
    [(0.0, 1.0, 0.3), (2.0, 0.7, 0.3), (8.0, 1.3, 0.4)]), 0.2)
zs = [complex(x, 0.05) for x in np.linspace(0.3, 14.0, 200)]
def run():
    for z in zs:
        solve_at(z, cfg)
""",
    "branch_sweep_4000_points": """
import numpy as np
from specsep import JointSpectrum, ModelConfig
from specsep import _kernels as K
from specsep.spectrum import spectrum_arrays
cfg = ModelConfig(JointSpectrum.from_atoms(
    [(0.0, 1.0, 0.3), (2.0, 0.7, 0.3), (8.0, 1.3, 0.4)]), 0.2)
u, t, w = spectrum_arrays(cfg.spectrum)
gs = -np.logspace(4, -6, 4000)
def run():
    K.sweep(gs, u, t, w, cfg.y)
""",
    "density_100_points": """
import numpy as np
from specsep import JointSpectrum, ModelConfig, density
cfg = ModelConfig(JointSpectrum.from_atoms([(0.0, 1.0, 1.0)]), 0.25)
grid = np.linspace(0.3, 2.2, 100)
def run():
    density(cfg, grid)
""",
}

DRIVER = """
import json, time, sys
{setup}
run()  # warmup (includes jit compilation when enabled)
reps = {reps}
t0 = time.perf_counter()
for _ in range(reps):
    run()
dt = (time.perf_counter() - t0) / reps
from specsep import _kernels
print(json.dumps({{"seconds": dt, "numba": _kernels.NUMBA_ENABLED}}))
"""


def time_scenario(setup: str, numba: bool, reps: int) -> dict:
    env = dict(os.environ)
    env["SPECSEP_NUMBA"] = "1" if numba else "0"
    code = DRIVER.format(setup=setup, reps=reps)
    out = subprocess.run(
        [sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True
    )
    return json.loads(out.stdout.strip().splitlines()[-1])


def main() -> int:
    reps = int(os.environ.get("BENCH_REPS", "3"))
    print(f"{'scenario':<28} {'numba':>12} {'numpy':>12} {'speedup':>9}")
    for name, setup in SCENARIOS.items():
        fast = time_scenario(setup, numba=True, reps=reps)
        slow = time_scenario(setup, numba=False, reps=reps)
        if not fast["numba"]:
            print(f"{name:<28} numba unavailable; both paths identical")
            continue
        ratio = slow["seconds"] / fast["seconds"]
        print(
            f"{name:<28} {fast['seconds'] * 1e3:>10.2f}ms {slow['seconds'] * 1e3:>10.2f}ms "
            f"{ratio:>8.1f}x"
        )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
