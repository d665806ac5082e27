"""Time the numba kernels against their numpy twins.

Usage: python benchmarks/bench_kernels.py [--periods N] [--slots N] [--repeat K]

Each backend runs in its own interpreter because the backend flag is read at
import time. The numba timings exclude compilation (one warm-up call first).
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys

_CHILD = r"""
import json, sys, time
import numpy as np
from aoicov.sim import kernels, USE_NUMBA
from aoicov.channel import reference_params
from aoicov.sim.geometry import physical_field_radius

periods, slots, repeat = map(int, sys.argv[1:4])
rng = np.random.default_rng(0)
fs = rng.geometric(0.3, size=periods)
fs = np.where(fs <= 10, fs, 0)
thr = np.array([3.5, 7.0, 12.0])

sp = reference_params(tx_power=20.0)
r_out = physical_field_radius(sp)
dens = np.array([c.density for c in sp.interferers])
powers = np.array([c.power for c in sp.interferers])
counts = rng.poisson(dens * np.pi * r_out**2, size=(slots, dens.size))
tot = int(counts.sum())
r2u, fad = rng.random(tot), rng.standard_exponential(tot)

def best(fn):
    fn()
    times = []
    for _ in range(repeat):
        t = time.perf_counter(); fn(); times.append(time.perf_counter() - t)
    return min(times)

out = {
    "backend": "numba" if USE_NUMBA else "numpy",
    "aoi_path": best(lambda: kernels.aoi_path(fs, 10, 1.0, 1.0, thr)),
    "slot_interference": best(lambda: kernels.slot_interference(
        counts, r2u, fad, powers, 0.0, r_out, sp.pathloss_exp)),
    "points": tot,
}
print(json.dumps(out))
"""


def _run(no_numba: bool, periods: int, slots: int, repeat: int) -> dict:
    env = dict(os.environ)
    env["AOICOV_NO_NUMBA"] = "1" if no_numba else "0"
    res = subprocess.run([sys.executable, "-c", _CHILD, str(periods), str(slots), str(repeat)],
                         env=env, capture_output=True, text=True, check=True)
    return json.loads(res.stdout.strip().splitlines()[-1])


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--periods", type=int, default=2_000_000)
    ap.add_argument("--slots", type=int, default=20_000)
    ap.add_argument("--repeat", type=int, default=5)
    a = ap.parse_args()
    jit = _run(False, a.periods, a.slots, a.repeat)
    ref = _run(True, a.periods, a.slots, a.repeat)
    print(f"{'kernel':<34}{'numba [s]':>12}{'numpy [s]':>12}{'speedup':>10}")
    for k, label in (("aoi_path", f"aoi_path ({a.periods} periods)"),
                     ("slot_interference", f"interference ({jit['points']} pts)")):
        print(f"{label:<34}{jit[k]:>12.4f}{ref[k]:>12.4f}{ref[k] / jit[k]:>9.1f}x")


if __name__ == "__main__":
    main()
