"""
Closed-form throughput and backhaul exponents
=============================================

Walk a few (alpha, beta, gamma) points through the exact scaling algebra:
regime, infinite-backhaul exponent, the backhaul exponent each routing
scheme needs, and how throughput degrades once the backhaul is starved.
"""

from fractions import Fraction as F

from hybridcap.scaling import (
    ScalingPoint,
    cbs_exponent,
    classify_regime,
    generalized_exponent,
    is_infrastructure_limited,
    throughput_exponent_infinite,
)

# exponents are kept as fractions, so ties between regimes are exact
points = [(3, F(3, 10), F(1, 5)), (F(11, 5), F(1, 2), F(2, 5)), (3, F(1, 2), F(2, 5))]
for a, b, g in points:
    p = ScalingPoint(a, b, g)
    value, scheme = throughput_exponent_infinite(p)
    print(f"alpha={float(a)} beta={float(b)} gamma={float(g)}: "
          f"regime {classify_regime(p)}, T ~ {value} via {scheme}, needs C_BS ~ {cbs_exponent(p)}")

# sweep the backhaul exponent for one point: throughput rises with eta until
# the wireless hops become the bottleneck, then stays flat
a, b, g = 3, F(1, 5), F(9, 20)
print(f"\nalpha={a} beta={float(b)} gamma={float(g)}")
for eta in (F(-1), F(-1, 2), 0, F(1, 10), F(1, 2), 1):
    p = ScalingPoint(a, b, g, eta)
    res = generalized_exponent(p)
    tag = "limited" if is_infrastructure_limited(p) else "saturated"
    print(f"  eta={float(eta):+.2f}: T ~ {res.value} via {res.scheme} ({tag})")
