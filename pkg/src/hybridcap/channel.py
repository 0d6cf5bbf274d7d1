"""Random-phase power-law channel and link-budget conversions.

A coefficient between two elements at distance ``r`` meters is
``exp(j*theta) / r**(alpha/2)`` with ``theta`` uniform on ``[0, 2*pi)``;
the path-loss reference distance is 1 m.
"""

from __future__ import annotations

import functools
import math

import numpy as np

from .topology import NetworkConfig, Topology

__all__ = [
    "SingularityError",
    "dbm_to_watts",
    "noise_power_watts",
    "path_gain",
    "uplink_vector",
    "downlink_vector",
    "node_to_node",
    "ChannelRealization",
]


class SingularityError(ValueError):
    """Two channel elements coincide, so the power law diverges."""


def dbm_to_watts(dbm):
    return 10.0 ** ((np.asarray(dbm, dtype=float) - 30.0) / 10.0)


def noise_power_watts(config: NetworkConfig) -> float:
    """Thermal noise power over the configured bandwidth, in watts."""
    dbm = config.noise_density_dbm_hz + 10 * math.log10(config.bandwidth_hz) + config.noise_figure_db
    return float(dbm_to_watts(dbm))


def path_gain(distance, alpha: float) -> np.ndarray:
    """Power gain ``r**-alpha``; raises on zero distance."""
    d = np.asarray(distance, dtype=float)
    if np.any(d <= 0):
        raise SingularityError("zero distance between transmitter and receiver")
    return d ** (-alpha)


def _distances(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a = np.atleast_2d(np.asarray(a, dtype=float))
    b = np.atleast_2d(np.asarray(b, dtype=float))
    return np.hypot(a[:, None, 0] - b[None, :, 0], a[:, None, 1] - b[None, :, 1])


def _coefficients(dist: np.ndarray, alpha: float, rng: np.random.Generator) -> np.ndarray:
    if np.any(dist <= 0):
        raise SingularityError("zero distance between transmitter and receiver")
    amp = dist ** (-alpha / 2)
    theta = rng.uniform(0.0, 2 * np.pi, size=dist.shape)
    return amp * np.exp(1j * theta)


def uplink_vector(node, bs_antennas, alpha: float, rng: np.random.Generator) -> np.ndarray:
    """Channel from one node to the ``l`` antennas of a BS (length-``l`` vector)."""
    return _coefficients(_distances(node, bs_antennas)[0], alpha, rng)


def downlink_vector(bs_antennas, node, alpha: float, rng: np.random.Generator) -> np.ndarray:
    """Channel from the antennas of a BS to one node.

    Distances match :func:`uplink_vector`; phases are drawn independently.
    """
    return _coefficients(_distances(node, bs_antennas)[0], alpha, rng)


def node_to_node(a, b, alpha: float, rng: np.random.Generator) -> complex:
    return complex(_coefficients(_distances(a, b)[0], alpha, rng)[0])


class ChannelRealization:
    """Phases of one Monte-Carlo trial, generated lazily per BS.

    ``uplink(s)`` returns the ``n x l`` matrix whose row ``i`` is the channel
    from node ``i`` to the antennas of BS ``s``.  ``downlink(s, nodes)`` has
    the same magnitudes and independent phases.  Each block is derived from its own
    child of ``seed``, so blocks can be requested in any order.
    """

    def __init__(self, topo: Topology, alpha: float | None = None, seed: int = 0):
        self.topo = topo
        self.alpha = topo.config.alpha if alpha is None else alpha
        self.seed = int(seed)
        self._last = (None, None)

    def _rng(self, bs: int, direction: int) -> np.random.Generator:
        return np.random.default_rng(np.random.SeedSequence([self.seed, bs, direction]))

    def distances(self, bs: int) -> np.ndarray:
        # one-slot cache: rates are computed BS by BS
        if self._last[0] != bs:
            d = _distances(self.topo.node_positions, self.topo.antenna_positions[bs])
            d.flags.writeable = False
            self._last = (bs, d)
        return self._last[1]

    def uplink(self, bs: int) -> np.ndarray:
        return _coefficients(self.distances(bs), self.alpha, self._rng(bs, 0))

    def downlink(self, bs: int, nodes=None) -> np.ndarray:
        """Rows for ``nodes`` (default all); phases depend on the node set."""
        if nodes is None:
            d = self.distances(bs)
        else:
            d = _distances(self.topo.node_positions[np.asarray(nodes, dtype=int)],
                           self.topo.antenna_positions[bs])
        return _coefficients(d, self.alpha, self._rng(bs, 1))

    @functools.cached_property
    def received_gain_per_bs(self) -> np.ndarray:
        """``g[i, s] = sum_t r_{i,s,t}**-alpha`` over the antennas of BS ``s``."""
        out = np.empty((self.topo.n, self.topo.m))
        for s in range(self.topo.m):
            out[:, s] = path_gain(self.distances(s), self.alpha).sum(axis=1)
        return out
