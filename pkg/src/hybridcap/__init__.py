"""Capacity of hybrid wireless networks with rate-limited backhaul.

Closed-form scaling exponents live in :mod:`hybridcap.scaling`; finite
instances are drawn by :mod:`hybridcap.topology` and evaluated by
:mod:`hybridcap.protocols`; :mod:`hybridcap.montecarlo` runs sweeps.
"""

from .scaling import (
    DomainError,
    RegimeLabel,
    Scheme,
    ScalingPoint,
    ScalingValue,
    cbs_exponent,
    classify_regime,
    generalized_exponent,
    is_infrastructure_limited,
    throughput_exponent_infinite,
)
from .topology import ConfigurationError, NetworkConfig, Topology, generate

__version__ = "0.1.0"
