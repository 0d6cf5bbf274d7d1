"""
Simulated growth against the predicted exponent
===============================================

Grow the network along a scaling path (m = n^beta base stations, l = n^gamma
antennas, backhaul n^eta) and fit the log-log slope of simulated throughput.
The slope should approach the closed-form exponent.
"""

from hybridcap.montecarlo import verify_exponent_empirical, verify_xki_scaling
from hybridcap.scaling import ScalingPoint

# first the pair counts on their own: sources spread uniformly over cells
rep = verify_xki_scaling(0.7, 0.4, [2**k for k in range(10, 15)], trials=50, seed=0)
print(f"mean pair count slope {rep.exponent.slope:.3f} (predicted 0.3, branch {rep.branch})")

# a backhaul-limited point and an unlimited one
for p in (ScalingPoint(3.5, 0.25, 0.25, -1), ScalingPoint(3.5, 0.25, 0.25, 2)):
    rep = verify_exponent_empirical(p, [256, 1024, 4096], trials=3, seed=0)
    print(f"eta={float(p.eta):+}: fitted {rep.fit.slope:.2f}, predicted {rep.predicted:.2f}")
