"""Per-slot traffic routing as an exact integer max-flow problem.

Every slot is routed independently against its formed topology: a virtual
source feeds each core (fiber) node with unbounded capacity, every node drains
into a virtual sink at its demand, and each formed link contributes capacity in
both directions. The deliverable traffic is the max-flow value, so the slot's
loss is total demand minus delivered (equivalently, the min cut). All rates are
integer kbps, so results are exact and platform-independent.

Loss is accounted in two units: Mbps-slots (demand-rate slots, exact rationals
with three decimals) and bytes (rate x slot duration / 8).
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import Link, Scenario, prepare

INF = 1 << 62


class _Dinic:
    """Textbook Dinic max-flow on integer capacities."""

    def __init__(self, n: int):
        self.n = n
        self.graph: list[list[list[int]]] = [[] for _ in range(n)]

    def add_edge(self, u: int, v: int, cap: int) -> int:
        """Add directed edge u->v; returns its index in u's adjacency."""
        self.graph[u].append([v, cap, len(self.graph[v])])
        self.graph[v].append([u, 0, len(self.graph[u]) - 1])
        return len(self.graph[u]) - 1

    def _bfs(self, s: int, t: int) -> bool:
        self.level = [-1] * self.n
        self.level[s] = 0
        queue = [s]
        for u in queue:
            for v, cap, _ in self.graph[u]:
                if cap > 0 and self.level[v] < 0:
                    self.level[v] = self.level[u] + 1
                    queue.append(v)
        return self.level[t] >= 0

    def _dfs(self, u: int, t: int, pushed: int) -> int:
        if u == t:
            return pushed
        while self.it[u] < len(self.graph[u]):
            edge = self.graph[u][self.it[u]]
            v, cap, rev = edge
            if cap > 0 and self.level[v] == self.level[u] + 1:
                flow = self._dfs(v, t, min(pushed, cap))
                if flow > 0:
                    edge[1] -= flow
                    self.graph[v][rev][1] += flow
                    return flow
            self.it[u] += 1
        return 0

    def max_flow(self, s: int, t: int) -> int:
        total = 0
        while self._bfs(s, t):
            self.it = [0] * self.n
            while True:
                flow = self._dfs(s, t, INF)
                if flow == 0:
                    break
                total += flow
        return total


@dataclass(frozen=True)
class FlowSolution:
    """One slot's routing outcome, all in kbps."""

    delivered_kbps: int
    total_demand_kbps: int
    per_node_loss_kbps: tuple[int, ...]

    @property
    def loss_kbps(self) -> int:
        return self.total_demand_kbps - self.delivered_kbps


def min_loss_routing(edges, rho_kbps, core_nodes) -> FlowSolution:
    """Route demand over an arbitrary undirected topology.

    ``edges`` is an iterable of (d, d2, capacity_kbps); parallel entries stack.
    Returns the delivered flow and a per-node loss split (the split is one
    optimal assignment; only the totals are uniquely determined).
    """
    rho = [int(x) for x in rho_kbps]
    d_count = len(rho)
    src, sink = d_count, d_count + 1
    net = _Dinic(d_count + 2)
    for c in core_nodes:
        net.add_edge(src, int(c), INF)
    demand_edge = []
    for d in range(d_count):
        demand_edge.append(net.add_edge(d, sink, rho[d]) if rho[d] > 0 else None)
    for d, d2, cap in edges:
        cap = int(cap)
        if cap <= 0:
            continue
        net.add_edge(int(d), int(d2), cap)
        net.add_edge(int(d2), int(d), cap)
    delivered = net.max_flow(src, sink)
    per_node = []
    for d in range(d_count):
        if demand_edge[d] is None:
            per_node.append(0)
        else:
            remaining = net.graph[d][demand_edge[d]][1]
            per_node.append(remaining)  # capacity left on d->sink = unserved demand
    return FlowSolution(delivered_kbps=delivered,
                        total_demand_kbps=sum(rho),
                        per_node_loss_kbps=tuple(per_node))


def _topology_key(links) -> tuple:
    """Routing only sees node pairs and multiplicity, not interface ids."""
    return tuple(sorted((l[0], l[2]) for l in links))


def route_links(links, s: Scenario) -> FlowSolution:
    """Route one slot of the scenario over its formed links."""
    prep = prepare(s)
    edges = [(d, d2, int(prep.r_kbps[d, d2])) for d, _, d2, _ in links]
    return min_loss_routing(edges, prep.rho_kbps.tolist(), s.core_nodes)


@dataclass(frozen=True)
class LossReport:
    """Reconfiguration loss aggregated over all slots."""

    per_slot_loss_kbps: tuple[int, ...]
    per_node_loss_kbps_slots: tuple[int, ...]
    total_loss_kbps_slots: int
    slot_duration_s: float

    @property
    def total_loss_bytes(self) -> int:
        return kbps_slots_to_bytes(self.total_loss_kbps_slots, self.slot_duration_s)

    @property
    def per_node_loss_bytes(self) -> tuple[int, ...]:
        return tuple(kbps_slots_to_bytes(v, self.slot_duration_s)
                     for v in self.per_node_loss_kbps_slots)


def kbps_slots_to_bytes(kbps_slots: int, tau_s: float) -> int:
    """kbps sustained for tau seconds -> bytes (1000 bits per kb, 8 bits per byte)."""
    return int(round(kbps_slots * tau_s * 125.0))


def mbps_slots_str(kbps_slots: int) -> str:
    """Exact decimal string for kbps-slots expressed in Mbps-slots."""
    whole, frac = divmod(int(kbps_slots), 1000)
    if frac == 0:
        return str(whole)
    return f"{whole}.{frac:03d}".rstrip("0")


def total_reconfig_loss(per_slot_links, s: Scenario,
                        cache: dict | None = None) -> LossReport:
    """Sum routing losses across all slots, caching repeated topologies.

    A caller evaluating many schedules of one scenario can pass a shared
    ``cache`` dict to reuse per-topology solutions across calls.
    """
    if cache is None:
        cache = {}
    per_slot = []
    per_node = [0] * s.node_count
    for links in per_slot_links:
        key = _topology_key(links)
        sol = cache.get(key)
        if sol is None:
            sol = route_links(links, s)
            cache[key] = sol
        per_slot.append(sol.loss_kbps)
        for d, loss in enumerate(sol.per_node_loss_kbps):
            per_node[d] += loss
    return LossReport(per_slot_loss_kbps=tuple(per_slot),
                      per_node_loss_kbps_slots=tuple(per_node),
                      total_loss_kbps_slots=sum(per_slot),
                      slot_duration_s=s.slot_duration_s)
