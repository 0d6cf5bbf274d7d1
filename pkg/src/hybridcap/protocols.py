"""Achievable rates of the single-hop (ISH) and multihop (IMH) protocols.

Both protocols move a packet in three stages: access from the source to
its home BS, a wired hop between BSs, and exit from the destination's BS.
Every node is a source with one destination; all flows receive the same
long-run rate, which is the smallest of

* the access capacity of a cell divided by the flows originating there,
* the exit capacity of a cell divided by the flows terminating there,
* ``r_bs`` divided by the per-unit-rate load of the busiest backhaul link.

Flows whose source and destination share a cell never use the backhaul.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import zeta

from .channel import ChannelRealization, noise_power_watts, path_gain
from .mimo import bc_dual_sum_rate, mac_sum_rate, sic_stream_rates
from .scaling import Scheme
from .topology import (
    ConfigurationError,
    NetworkConfig,
    Topology,
    TrafficMatrix,
    count_traffic,
    imh_active_set,
    imh_paths_per_cell,
)

__all__ = [
    "Bottleneck",
    "REUSE_FACTOR",
    "CellRates",
    "SchemeCapacity",
    "ThroughputReport",
    "ish_uplink_sumrate",
    "ish_uplink_stream_rates",
    "ish_downlink_sumrate",
    "routing_cell_side_m",
    "hop_distance_m",
    "hop_sinr",
    "hop_rate",
    "imh_cell_rate",
    "cell_rates",
    "ish_capacity",
    "imh_capacity",
    "evaluate_wireless",
    "scheme_throughput",
    "end_to_end_throughput",
    "report_from_capacities",
]

REUSE_FACTOR = 9


class Bottleneck(str, enum.Enum):
    UPLINK = "wireless-uplink"
    DOWNLINK = "wireless-downlink"
    BACKHAUL = "backhaul"
    HOP = "wireless-hop"

    def __str__(self) -> str:
        return self.value


# -- ISH ------------------------------------------------------------------
def _uplink_parts(cell, topo, channel, config):
    h = channel.uplink(cell)
    inside = topo.cell_of_node == cell
    p = config.tx_power_w
    h_in = h[inside].T
    h_out = h[~inside].T
    k = noise_power_watts(config) * np.eye(h.shape[1]) + p * (h_out @ h_out.conj().T)
    return h_in, k, p


def ish_uplink_sumrate(cell: int, topo: Topology, channel: ChannelRealization,
                       config: NetworkConfig | None = None) -> float:
    """MMSE-SIC sum rate at BS ``cell`` with all of its nodes transmitting.

    Signals from nodes of other cells are treated as noise.
    """
    config = config or topo.config
    h_in, k, p = _uplink_parts(cell, topo, channel, config)
    return mac_sum_rate(h_in, p, k)


def ish_uplink_stream_rates(cell, topo, channel, config=None) -> np.ndarray:
    """Per-node rates for the cancelling order of increasing node index."""
    config = config or topo.config
    h_in, k, p = _uplink_parts(cell, topo, channel, config)
    return sic_stream_rates(h_in, p, k)


def ish_downlink_sumrate(cell: int, topo: Topology, channel: ChannelRealization,
                         config: NetworkConfig | None = None,
                         power_budget: float | None = None) -> float:
    """DPC sum rate from BS ``cell`` to the nodes of its cell.

    The budget (default ``nP/m``) is split evenly over the served nodes in
    the dual uplink.  Every other BS radiates its full budget isotropically
    and is treated as noise at the receiving node.
    """
    config = config or topo.config
    budget = config.bs_power_w if power_budget is None else power_budget
    users = topo.nodes_in_cell(cell)
    if users.size == 0 or budget <= 0:
        return 0.0
    g = channel.downlink(cell, users)
    gains = channel.received_gain_per_bs[users]
    per_antenna = config.bs_power_w / config.l
    interference = per_antenna * (gains.sum(axis=1) - gains[:, cell])
    noise = noise_power_watts(config) + interference
    return bc_dual_sum_rate(g, budget / users.size, noise)


# -- IMH ------------------------------------------------------------------
def routing_cell_side_m(config: NetworkConfig) -> float:
    """Side of a routing cell of area ``2 ln n`` node areas."""
    side = math.sqrt(2 * math.log(config.n)) * config.node_spacing_m
    if side > config.cell_side_m:
        raise ConfigurationError(
            f"routing cells ({side:.1f} m) exceed the cell side ({config.cell_side_m:.1f} m); "
            "increase n or decrease m"
        )
    return side


def hop_distance_m(config: NetworkConfig) -> float:
    """Longest hop between adjacent routing cells, ``sqrt(5)`` sides."""
    return math.sqrt(5) * routing_cell_side_m(config)


def hop_sinr(config: NetworkConfig) -> float:
    """SINR of a worst-case hop under 9-cell spatial reuse.

    Co-channel routing cells form rings; ring ``k`` holds ``8k``
    transmitters at distance ``3k`` routing-cell sides, which sums to
    ``8 P (3 s)**-alpha * zeta(alpha - 1)``.
    """
    s = routing_cell_side_m(config)
    p = config.tx_power_w
    a = config.alpha
    signal = p * float(path_gain(hop_distance_m(config), a))
    interference = 8 * p * (3 * s) ** (-a) * float(zeta(a - 1))
    return signal / (noise_power_watts(config) + interference)


def hop_rate(config: NetworkConfig) -> float:
    return math.log2(1 + hop_sinr(config))


def _cell_paths(topo: Topology, config: NetworkConfig) -> np.ndarray:
    return np.minimum(imh_paths_per_cell(config), topo.cell_counts())


def imh_cell_rate(cell: int, topo: Topology, config: NetworkConfig | None = None,
                  direction: str = "access") -> float:
    """Multihop rate into (``access``) or out of (``exit``) a BS.

    ``min(l, floor(sqrt(n/m)))`` paths run in parallel, each active for a
    ``1/9`` share of time at the hop rate.  The geometry is symmetric, so
    both directions get the same rate.
    """
    if direction not in ("access", "exit"):
        raise ValueError(f"direction must be 'access' or 'exit', not {direction!r}")
    config = config or topo.config
    paths = _cell_paths(topo, config)[cell]
    return float(paths) * hop_rate(config) / REUSE_FACTOR


# -- capacities and throughput --------------------------------------------
@dataclass(frozen=True)
class CellRates:
    """Per-cell wireless rates in b/s/Hz."""

    uplink: np.ndarray
    downlink: np.ndarray
    imh_access: np.ndarray
    imh_exit: np.ndarray


def cell_rates(topo: Topology, channel: ChannelRealization,
               config: NetworkConfig | None = None) -> CellRates:
    config = config or topo.config
    counts = topo.cell_counts()
    up = np.zeros(topo.m)
    down = np.zeros(topo.m)
    channel.received_gain_per_bs  # fill before the per-BS loop reuses distances
    for c in range(topo.m):
        if counts[c]:
            up[c] = ish_uplink_sumrate(c, topo, channel, config)
            down[c] = ish_downlink_sumrate(c, topo, channel, config)
    try:
        imh = _cell_paths(topo, config) * hop_rate(config) / REUSE_FACTOR
    except ConfigurationError:
        imh = np.zeros(topo.m)
    return CellRates(up, down, imh, imh.copy())


@dataclass(frozen=True)
class SchemeCapacity:
    """Wireless capacities and backhaul load of one protocol on one instance.

    ``link_load[k, i]`` is the load of link ``i -> k`` per unit of per-flow
    rate; the diagonal is zero.
    """

    scheme: Scheme
    access: np.ndarray
    exit: np.ndarray
    sources: np.ndarray
    destinations: np.ndarray
    link_load: np.ndarray
    traffic: TrafficMatrix
    access_kind: Bottleneck
    exit_kind: Bottleneck

    @property
    def n_flows(self) -> int:
        return int(self.sources.sum())

    def wireless_limit(self) -> tuple[float, Bottleneck]:
        with np.errstate(divide="ignore", invalid="ignore"):
            a = np.where(self.sources > 0, self.access / self.sources, np.inf)
            e = np.where(self.destinations > 0, self.exit / self.destinations, np.inf)
        ra, re = float(a.min(initial=np.inf)), float(e.min(initial=np.inf))
        if ra <= re:
            return ra, self.access_kind
        return re, self.exit_kind

    def max_link_load(self) -> float:
        return float(self.link_load.max(initial=0.0))

    def saturation_rbs(self) -> float:
        """Smallest backhaul rate at which the wireless limit binds."""
        return self.wireless_limit()[0] * self.max_link_load()


def _off_diagonal(x: np.ndarray) -> np.ndarray:
    x = np.array(x, dtype=float)
    np.fill_diagonal(x, 0.0)
    return x


def ish_capacity(topo, channel, config=None, rates: CellRates | None = None) -> SchemeCapacity:
    config = config or topo.config
    rates = rates or cell_rates(topo, channel, config)
    counts = topo.cell_counts()
    traffic = count_traffic(topo)
    return SchemeCapacity(
        Scheme.ISH, rates.uplink, rates.downlink, counts, counts,
        _off_diagonal(traffic.x), traffic, Bottleneck.UPLINK, Bottleneck.DOWNLINK,
    )


def imh_capacity(topo, config=None, rates: CellRates | None = None) -> SchemeCapacity:
    """IMH capacities; backhaul load follows the simultaneously active sources.

    With ``p_i`` paths in cell ``i`` carrying its ``n_i`` flows, an active
    source sends at ``n_i / p_i`` times the per-flow rate, so link ``i -> k``
    carries ``X_ki * n_i / p_i`` per unit rate, ``X_ki`` counting active
    sources only.
    """
    config = config or topo.config
    counts = topo.cell_counts()
    paths = _cell_paths(topo, config)
    if rates is None:
        try:
            imh = paths * hop_rate(config) / REUSE_FACTOR
        except ConfigurationError:
            imh = np.zeros(topo.m)
        access, exit_ = imh, imh
    else:
        access, exit_ = rates.imh_access, rates.imh_exit
    traffic = count_traffic(topo, imh_active_set(topo, config))
    with np.errstate(divide="ignore", invalid="ignore"):
        burst = np.where(paths > 0, counts / np.maximum(paths, 1), 0.0)
    load = _off_diagonal(traffic.x) * burst[None, :]
    return SchemeCapacity(
        Scheme.IMH, access, exit_, counts, counts, load, traffic,
        Bottleneck.HOP, Bottleneck.HOP,
    )


def evaluate_wireless(topo: Topology, channel: ChannelRealization,
                      config: NetworkConfig | None = None) -> dict[Scheme, SchemeCapacity]:
    """Backhaul-independent part of a trial, reusable across ``r_bs`` values."""
    config = config or topo.config
    rates = cell_rates(topo, channel, config)
    return {
        Scheme.ISH: ish_capacity(topo, channel, config, rates),
        Scheme.IMH: imh_capacity(topo, config, rates),
    }


@dataclass(frozen=True)
class SchemeThroughput:
    scheme: Scheme
    throughput: float
    per_flow_rate: float
    bottleneck: Bottleneck


def scheme_throughput(cap: SchemeCapacity, r_bs: float) -> SchemeThroughput:
    rate, kind = cap.wireless_limit()
    load = cap.max_link_load()
    if load > 0:
        limit = r_bs / load if math.isfinite(r_bs) else math.inf
        if limit < rate:
            rate, kind = limit, Bottleneck.BACKHAUL
    if not math.isfinite(rate):
        rate = 0.0
    return SchemeThroughput(cap.scheme, rate * cap.n_flows, rate, kind)


@dataclass(frozen=True)
class ThroughputReport:
    t_ish: float
    t_imh: float
    t_n: float
    scheme: Scheme
    bottleneck: Bottleneck
    per_flow_rate: float
    traffic: TrafficMatrix
    bottleneck_ish: Bottleneck
    bottleneck_imh: Bottleneck

    def to_dict(self, with_traffic: bool = False) -> dict:
        d = {
            "t_ish": self.t_ish,
            "t_imh": self.t_imh,
            "t_n": self.t_n,
            "scheme": str(self.scheme),
            "bottleneck": str(self.bottleneck),
            "per_flow_rate": self.per_flow_rate,
            "bottleneck_ish": str(self.bottleneck_ish),
            "bottleneck_imh": str(self.bottleneck_imh),
        }
        if with_traffic:
            d["traffic"] = self.traffic.x.tolist()
        return d


def report_from_capacities(caps: dict[Scheme, SchemeCapacity], r_bs: float) -> ThroughputReport:
    ish = scheme_throughput(caps[Scheme.ISH], r_bs)
    imh = scheme_throughput(caps[Scheme.IMH], r_bs)
    best = ish if ish.throughput >= imh.throughput else imh
    return ThroughputReport(
        t_ish=ish.throughput,
        t_imh=imh.throughput,
        t_n=max(ish.throughput, imh.throughput),
        scheme=best.scheme,
        bottleneck=best.bottleneck,
        per_flow_rate=best.per_flow_rate,
        traffic=caps[best.scheme].traffic,
        bottleneck_ish=ish.bottleneck,
        bottleneck_imh=imh.bottleneck,
    )


def end_to_end_throughput(topo: Topology, channel: ChannelRealization,
                          config: NetworkConfig | None = None) -> ThroughputReport:
    """Aggregate throughput of both protocols and of the better one."""
    config = config or topo.config
    return report_from_capacities(evaluate_wireless(topo, channel, config), config.r_bs)
