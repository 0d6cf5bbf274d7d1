"""
Throughput against per-link backhaul rate
=========================================

Simulate the default 1296-node network with 16 base stations of 4 antennas,
sweep the wired rate between base stations, and locate the knee beyond which
extra backhaul buys nothing.  A handful of trials keeps this under a minute;
the acceptance suite uses 200.
"""

import numpy as np

from hybridcap.montecarlo import SweepSpec, detect_knee, run_sweep
from hybridcap.topology import NetworkConfig

r_bs = np.round(np.arange(0.25, 8.01, 0.25), 2)
for alpha in (3.5, 3.75, 4.0):
    spec = SweepSpec(NetworkConfig(alpha=alpha), "r_bs", tuple(r_bs), trials=10, seed=0)
    res = run_sweep(spec)
    knee = detect_knee(res)
    print(f"alpha={alpha}: knee at r_bs={knee:.2f}, saturated T_n={res.t_n_mean.max():.1f}")

# the same trials at alpha=3.5, printed as the CSV the command line tool writes
spec = SweepSpec(NetworkConfig(), "r_bs", (0.1, 0.5, 1.0, 2.0, 5.0, 10.0), trials=10, seed=0)
print(run_sweep(spec).to_csv())
