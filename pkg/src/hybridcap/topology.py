"""Finite network instances: nodes, cells, BS antennas and S-D pairing."""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "ConfigurationError",
    "NetworkConfig",
    "Topology",
    "TrafficMatrix",
    "generate",
    "count_traffic",
    "imh_active_set",
    "imh_paths_per_cell",
]


class ConfigurationError(ValueError):
    """A finite network configuration cannot be realized."""


@dataclass(frozen=True)
class NetworkConfig:
    """Parameters of one finite network instance.

    Defaults are the simulation constants used for the desk-scale study:
    100 m nearest-neighbour spacing, -10 dBm node power, -174 dBm/Hz noise
    density, 5 dB noise figure and 40 MHz bandwidth.  ``r_bs`` is the rate
    of every BS-to-BS link in b/s/Hz; ``math.inf`` means unlimited backhaul.
    """

    n: int = 1296
    m: int = 16
    l: int = 4
    alpha: float = 3.5
    node_spacing_m: float = 100.0
    tx_power_dbm: float = -10.0
    noise_density_dbm_hz: float = -174.0
    noise_figure_db: float = 5.0
    bandwidth_hz: float = 40e6
    r_bs: float = math.inf
    epsilon0: float = 0.1
    seed: int = 0

    def __post_init__(self):
        for name in ("n", "m", "l", "seed"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, (int, np.integer)):
                raise ConfigurationError(f"{name} must be an integer, got {v!r}")
            object.__setattr__(self, name, int(v))
        if self.n < 1:
            raise ConfigurationError(f"n must be positive (got {self.n})")
        if self.m < 1 or math.isqrt(self.m) ** 2 != self.m:
            raise ConfigurationError(f"m must be a positive perfect square (got {self.m})")
        if self.l < 1:
            raise ConfigurationError(f"l must be at least 1 (got {self.l})")
        if self.m * self.l > self.n:
            raise ConfigurationError(
                f"m*l = {self.m * self.l} exceeds n = {self.n}; antennas must scale at most linearly"
            )
        if not self.alpha > 2:
            raise ConfigurationError(f"alpha must exceed 2 (got {self.alpha})")
        if not self.node_spacing_m > 0:
            raise ConfigurationError("node_spacing_m must be positive")
        if not self.bandwidth_hz > 0:
            raise ConfigurationError("bandwidth_hz must be positive")
        if not 0 < self.epsilon0 < 1:
            raise ConfigurationError(f"epsilon0 must lie in (0, 1) (got {self.epsilon0})")
        if math.isnan(self.r_bs) or self.r_bs < 0:
            raise ConfigurationError(f"r_bs must be nonnegative (got {self.r_bs})")
        if not 0 <= self.seed < 2**64:
            raise ConfigurationError("seed must be a 64-bit unsigned integer")

    # derived geometry
    @property
    def side_m(self) -> float:
        return self.node_spacing_m * math.sqrt(self.n)

    @property
    def cells_per_side(self) -> int:
        return math.isqrt(self.m)

    @property
    def cell_side_m(self) -> float:
        return self.node_spacing_m * math.sqrt(self.n / self.m)

    @property
    def bs_radius_m(self) -> float:
        return self.epsilon0 * self.cell_side_m

    @property
    def tx_power_w(self) -> float:
        return 10 ** ((self.tx_power_dbm - 30) / 10)

    @property
    def bs_power_w(self) -> float:
        """Average BS power budget ``nP/m``."""
        return self.n * self.tx_power_w / self.m

    def replace(self, **changes) -> "NetworkConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        if math.isinf(d["r_bs"]):
            d["r_bs"] = "inf"
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "NetworkConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - names
        if unknown:
            raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
        d = dict(d)
        if "r_bs" in d:
            d["r_bs"] = float(d["r_bs"])
        return cls(**d)


@dataclass(frozen=True, eq=False)
class Topology:
    """Realized positions (meters), cell assignment and S-D pairing.

    ``antenna_positions[s]`` lists the antennas of BS ``s``; the first
    ``boundary_counts[s]`` of them sit on the BS boundary circle.
    ``sd_pairing[i]`` is the destination of source ``i``.
    """

    node_positions: np.ndarray
    bs_positions: np.ndarray
    antenna_positions: tuple
    boundary_counts: np.ndarray
    cell_of_node: np.ndarray
    sd_pairing: np.ndarray
    config: NetworkConfig

    @property
    def n(self) -> int:
        return len(self.node_positions)

    @property
    def m(self) -> int:
        return len(self.bs_positions)

    def nodes_in_cell(self, cell: int) -> np.ndarray:
        return np.flatnonzero(self.cell_of_node == cell)

    def cell_counts(self) -> np.ndarray:
        return np.bincount(self.cell_of_node, minlength=self.m)

    def boundary_antennas(self, bs: int) -> np.ndarray:
        return self.antenna_positions[bs][: self.boundary_counts[bs]]

    def to_json(self) -> str:
        doc = {
            "config": self.config.to_dict(),
            "node_positions": self.node_positions.tolist(),
            "bs_positions": self.bs_positions.tolist(),
            "antenna_positions": [a.tolist() for a in self.antenna_positions],
            "boundary_counts": self.boundary_counts.tolist(),
            "cell_of_node": self.cell_of_node.tolist(),
            "sd_pairing": self.sd_pairing.tolist(),
        }
        return json.dumps(doc)

    @classmethod
    def from_json(cls, text: str) -> "Topology":
        doc = json.loads(text)
        return cls(
            node_positions=np.asarray(doc["node_positions"], dtype=float).reshape(-1, 2),
            bs_positions=np.asarray(doc["bs_positions"], dtype=float).reshape(-1, 2),
            antenna_positions=tuple(
                np.asarray(a, dtype=float).reshape(-1, 2) for a in doc["antenna_positions"]
            ),
            boundary_counts=np.asarray(doc["boundary_counts"], dtype=int),
            cell_of_node=np.asarray(doc["cell_of_node"], dtype=int),
            sd_pairing=np.asarray(doc["sd_pairing"], dtype=int),
            config=NetworkConfig.from_dict(doc["config"]),
        )


@dataclass(frozen=True)
class TrafficMatrix:
    """``x[k, i]`` counts flows from cell ``i`` to cell ``k``."""

    x: np.ndarray

    def column_sums(self) -> np.ndarray:
        return self.x.sum(axis=0)

    def off_diagonal(self) -> np.ndarray:
        m = self.x.shape[0]
        return self.x[~np.eye(m, dtype=bool)]

    def max_off_diagonal(self) -> int:
        off = self.off_diagonal()
        return int(off.max()) if off.size else 0


def _streams(seed: int) -> dict[str, np.random.Generator]:
    # independent child streams so that changing l leaves nodes and pairing intact
    children = np.random.SeedSequence(seed).spawn(3)
    return {
        "nodes": np.random.default_rng(children[0]),
        "pairing": np.random.default_rng(children[1]),
        "antennas": np.random.default_rng(children[2]),
    }


def _cell_index(points: np.ndarray, cell_side: float, k: int) -> np.ndarray:
    ij = np.clip(np.floor(points / cell_side).astype(int), 0, k - 1)
    return ij[:, 1] * k + ij[:, 0]


def _place_nodes(config: NetworkConfig, centers: np.ndarray, rng) -> np.ndarray:
    k = config.cells_per_side
    side, cs, radius = config.side_m, config.cell_side_m, config.bs_radius_m
    out = []
    need = config.n
    while need > 0:
        batch = rng.uniform(0.0, side, size=(max(2 * need, 64), 2))
        c = _cell_index(batch, cs, k)
        d2 = np.sum((batch - centers[c]) ** 2, axis=1)
        keep = batch[d2 > radius**2]
        out.append(keep[:need])
        need -= len(out[-1])
    return np.concatenate(out)


def _derangement(n: int, rng) -> np.ndarray:
    if n == 1:
        return np.zeros(1, dtype=int)
    idx = np.arange(n)
    while True:
        perm = rng.permutation(n)
        if not np.any(perm == idx):
            return perm


def _antennas(config: NetworkConfig, center: np.ndarray, rng) -> tuple[np.ndarray, int]:
    l = config.l
    radius = config.bs_radius_m
    root = math.sqrt(config.n / config.m)
    n_boundary = l if l <= root else max(1, math.floor(root))
    theta = 2 * np.pi * np.arange(n_boundary) / n_boundary
    ring = center + radius * np.column_stack([np.cos(theta), np.sin(theta)])
    n_inner = l - n_boundary
    if n_inner == 0:
        return ring, n_boundary
    r = radius * np.sqrt(rng.uniform(0.0, 1.0, n_inner))
    phi = rng.uniform(0.0, 2 * np.pi, n_inner)
    inner = center + np.column_stack([r * np.cos(phi), r * np.sin(phi)])
    return np.concatenate([ring, inner]), n_boundary


def generate(config: NetworkConfig) -> Topology:
    """Draw a network instance; identical configs give identical topologies.

    Nodes are uniform on the square of side ``spacing*sqrt(n)`` outside every
    BS disc (rejection sampling).  BSs sit at the cell centres.  When
    ``l <= sqrt(n/m)`` all antennas are evenly spaced on the BS boundary;
    otherwise ``floor(sqrt(n/m))`` are on the boundary and the rest are
    uniform inside the disc.
    """
    if math.pi * config.epsilon0**2 >= 0.5:
        raise ConfigurationError(
            f"BS discs would cover at least half of each cell (epsilon0={config.epsilon0})"
        )
    rng = _streams(config.seed)
    k = config.cells_per_side
    cs = config.cell_side_m
    grid = (np.arange(k) + 0.5) * cs
    gx, gy = np.meshgrid(grid, grid)
    centers = np.column_stack([gx.ravel(), gy.ravel()])

    nodes = _place_nodes(config, centers, rng["nodes"])
    cells = _cell_index(nodes, cs, k)
    pairing = _derangement(config.n, rng["pairing"])
    placed = [_antennas(config, c, rng["antennas"]) for c in centers]
    return Topology(
        node_positions=nodes,
        bs_positions=centers,
        antenna_positions=tuple(a for a, _ in placed),
        boundary_counts=np.array([b for _, b in placed], dtype=int),
        cell_of_node=cells,
        sd_pairing=pairing,
        config=config,
    )


def count_traffic(topo: Topology, active_sources=None) -> TrafficMatrix:
    """Count flows between cells among the active sources.

    ``active_sources`` is an iterable of per-cell index arrays (or a flat
    array of node indices); ``None`` means every node is an active source.
    """
    m = topo.m
    if active_sources is None:
        src = np.arange(topo.n)
    elif isinstance(active_sources, np.ndarray):
        src = active_sources.astype(int).ravel()
    else:
        parts = [np.asarray(a, dtype=int).ravel() for a in active_sources]
        src = np.concatenate(parts) if parts else np.zeros(0, dtype=int)
    x = np.zeros((m, m), dtype=np.int64)
    if src.size:
        i = topo.cell_of_node[src]
        k = topo.cell_of_node[topo.sd_pairing[src]]
        np.add.at(x, (k, i), 1)
    return TrafficMatrix(x)


def imh_paths_per_cell(config: NetworkConfig) -> int:
    """Number of simultaneous multihop paths, ``min(l, floor(sqrt(n/m)))``."""
    return min(config.l, math.isqrt(config.n // config.m))


def imh_active_set(topo: Topology, config: NetworkConfig | None = None) -> list[np.ndarray]:
    """Sources transmitting simultaneously under IMH, per cell.

    The first ``min(l, floor(sqrt(n/m)))`` nodes of each cell (by node index)
    are selected; empty cells give empty arrays.
    """
    config = config or topo.config
    if config.l < 1:
        raise ConfigurationError("l must be at least 1")
    p = imh_paths_per_cell(config)
    return [topo.nodes_in_cell(c)[:p] for c in range(topo.m)]
