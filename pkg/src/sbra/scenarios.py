"""Instance generators: grid and hexagon layouts, demands, states, fixtures.

Layouts follow the benchmark parametrization: a jittered 4x4 grid with 180 m
pitch and hexagonal lattices of 19 or 37 nodes at 140 m spacing. User demands
are drawn from a 50/75/100 Mbps mix (70%/20%/10% of users) and assigned to
nodes uniformly at random; the canonical configurations repair the rounded mix
deterministically so the aggregate demand hits the published totals exactly
(6400 / 6650 / 14150 Mbps).

Initial and final states are spanning trees grown from the core nodes with a
capacity-aware randomized preference (high-rate edges first, lightly loaded
subtrees favored). The two states use independent demand draws and independent
preference jitter, so they differ materially; edges present in both keep the
same interface labels. This construction stands in for the reference
experiments' LP-based state synthesis, so absolute loss numbers are not
comparable to published ones, only orderings and trends.

All generators are pure functions of their seed.
"""

from __future__ import annotations

import importlib.resources
import math
from dataclasses import dataclass

import numpy as np

from .geometry import build_adjacency, build_align_angles, distance
from .linkbudget import DEFAULT_PARAMS, LinkBudgetParams, link_rate
from .model import (Link, Scenario, ScenarioError, canon_link,
                    scenario_from_json, validate_scenario)

# Stream tags: every random draw hangs off SeedSequence([seed, tag, ...]) so
# the individual draws are independent and stable against code reordering.
_S_POSITIONS = 0
_S_DEMAND_INIT = 1
_S_DEMAND_FINAL = 2
_S_TREE_INIT = 3
_S_TREE_FINAL = 4
_S_IDLE_ANGLES = 5
_S_TINY = 6

DEFAULT_MIX = ((50.0, 0.70), (75.0, 0.20), (100.0, 0.10))
SWEEP_K_VALUES = (19, 20, 21, 25, 30, 35)
TOPOLOGIES = ("grid", "hex-small", "hex-large")


@dataclass(frozen=True)
class Skeleton:
    """Node layout plus the canonical demand parametrization attached to it."""
    name: str
    positions: tuple[tuple[float, float], ...]
    core_nodes: tuple[int, ...]
    user_count: int
    demand_target_mbps: float


def gen_grid(seed: int, pitch_m: float = 180.0,
             jitter_sigma: float | None = None) -> Skeleton:
    """4x4 grid, each node shifted by independent N(0, sigma) on both axes.

    sigma defaults to pitch/8; pass 0 for the exact lattice. The core is the
    node closest to the layout centroid.
    """
    rng = np.random.default_rng(np.random.SeedSequence([seed, _S_POSITIONS]))
    sigma = pitch_m / 8.0 if jitter_sigma is None else float(jitter_sigma)
    base = np.array([[ix * pitch_m, iy * pitch_m]
                     for iy in range(4) for ix in range(4)])
    pts = base + rng.normal(0.0, sigma, size=base.shape) if sigma > 0 else base
    centroid = pts.mean(axis=0)
    core = int(np.argmin(((pts - centroid) ** 2).sum(axis=1)))
    return Skeleton("grid", tuple((float(x), float(y)) for x, y in pts),
                    (core,), 100, 6400.0)


def _hex_positions(rings: int, spacing_m: float) -> list[tuple[float, float]]:
    pts = []
    for q in range(-rings, rings + 1):
        for r in range(-rings, rings + 1):
            if max(abs(q), abs(r), abs(q + r)) > rings:
                continue
            x = spacing_m * (q + r / 2.0)
            y = spacing_m * (math.sqrt(3.0) / 2.0) * r
            pts.append((q, r, x, y))
    # center first, then ring by ring, ties by axial coordinates
    pts.sort(key=lambda t: (max(abs(t[0]), abs(t[1]), abs(t[0] + t[1])), t[0], t[1]))
    return [(round(x, 9), round(y, 9)) for _, _, x, y in pts]


def gen_hexagon(size: str, seed: int, spacing_m: float = 140.0) -> Skeleton:
    """Hexagonal lattice: 19 nodes (small, 2 rings) or 37 (large, 3 rings).

    No positional jitter. Cores: the center node; the large layout adds the
    ring-2 node at (2*spacing, 0) as a second gateway. seed is accepted for
    interface symmetry with gen_grid but does not affect positions.
    """
    del seed
    if size == "small":
        pos = _hex_positions(2, spacing_m)
        return Skeleton("hex-small", tuple(pos), (0,), 105, 6650.0)
    if size == "large":
        pos = _hex_positions(3, spacing_m)
        second = pos.index((round(2 * spacing_m, 9), 0.0))
        return Skeleton("hex-large", tuple(pos), (0, second), 210, 14150.0)
    raise ValueError(f"unknown hexagon size {size!r} (want 'small' or 'large')")


def _mix_counts(user_count: int, mix) -> list[int]:
    """Largest-remainder apportionment of users over the rate mix."""
    raw = [user_count * share for _, share in mix]
    counts = [int(math.floor(x)) for x in raw]
    order = sorted(range(len(mix)), key=lambda i: (-(raw[i] - counts[i]), i))
    for i in order[: user_count - sum(counts)]:
        counts[i] += 1
    return counts


def mix_user_rates(user_count: int, mix=DEFAULT_MIX,
                   target_total_mbps: float | None = None) -> list[float]:
    """Per-user rates implementing the mix, optionally repaired to a target.

    The largest-remainder rounding can land below the published aggregate;
    the repair upgrades 50->100 users while at least 50 Mbps is missing and
    finishes with a single 50->75 upgrade for a 25 Mbps remainder.
    """
    counts = dict(zip([r for r, _ in mix], _mix_counts(user_count, mix)))
    if target_total_mbps is not None:
        deficit = target_total_mbps - sum(r * c for r, c in counts.items())
        while deficit >= 50.0 and counts.get(50.0, 0) > 0:
            counts[50.0] -= 1
            counts[100.0] = counts.get(100.0, 0) + 1
            deficit -= 50.0
        if deficit == 25.0 and counts.get(50.0, 0) > 0:
            counts[50.0] -= 1
            counts[75.0] = counts.get(75.0, 0) + 1
            deficit = 0.0
        if deficit != 0.0:
            raise ValueError(
                f"cannot repair user mix to target ({deficit} Mbps left over)")
    rates = []
    for rate in sorted(counts):
        rates.extend([rate] * counts[rate])
    return rates


def assign_demands(node_count: int, user_count: int, seed: int,
                   mix=DEFAULT_MIX, target_total_mbps: float | None = None,
                   stream: int = _S_DEMAND_FINAL) -> tuple[float, ...]:
    """Draw per-node demand: users get mixed rates and uniform random nodes."""
    rng = np.random.default_rng(np.random.SeedSequence([seed, stream]))
    rho = [0.0] * node_count
    rates = mix_user_rates(user_count, mix, target_total_mbps)
    homes = rng.integers(0, node_count, size=len(rates))
    for rate, d in zip(rates, homes):
        rho[int(d)] += rate
    return tuple(rho)


def _grow_tree(adjacency, rates, cores, n_ifaces, demand, rng) -> list[tuple[int, int]]:
    """Prim-style spanning forest from the cores under the interface budget.

    Edge preference: jittered rate (descending), then the least-loaded core
    subtree, then lexicographic. Retries with stronger load balancing before
    giving up, since degree caps can strand nodes under a purely greedy order.
    """
    node_count = len(adjacency)
    for attempt in range(4):
        jitter = rng.random((node_count, node_count))
        in_tree = set(cores)
        deg = [0] * node_count
        root_of = {c: c for c in cores}
        load = {c: 0.0 for c in cores}
        edges: list[tuple[int, int]] = []
        balance = 1 + attempt  # load balancing escalates across retries
        while len(in_tree) < node_count:
            best = None
            best_key = None
            for u in sorted(in_tree):
                if deg[u] >= n_ifaces:
                    continue
                for v in range(node_count):
                    if v in in_tree or not adjacency[u][v]:
                        continue
                    jit = jitter[min(u, v)][max(u, v)]
                    key = (rates[u][v] * (0.85 + 0.3 * jit)
                           - balance * 0.4 * load[root_of[u]],
                           -deg[u], -u, -v)
                    if best_key is None or key > best_key:
                        best_key = key
                        best = (u, v)
            if best is None:
                break
            u, v = best
            edges.append((u, v))
            in_tree.add(v)
            deg[u] += 1
            deg[v] += 1
            root_of[v] = root_of[u]
            load[root_of[u]] += demand[v]
        if len(in_tree) == node_count:
            return edges
    raise ScenarioError(
        f"cannot connect all {node_count} nodes from cores {cores} "
        f"with {n_ifaces} interfaces per node")


def _label_edges(edges, reuse: dict | None, node_count: int, n_ifaces: int
                 ) -> list[Link]:
    """Assign interface indices per node; reuse carries labels between states."""
    used: list[set[int]] = [set() for _ in range(node_count)]
    links: list[Link] = []
    pending = []
    if reuse:
        for u, v in edges:
            lab = reuse.get((min(u, v), max(u, v)))
            if lab is None:
                pending.append((u, v))
                continue
            nu, nv = lab if u < v else (lab[1], lab[0])
            used[u].add(nu)
            used[v].add(nv)
            links.append(canon_link(u, nu, v, nv))
    else:
        pending = list(edges)

    def next_free(d: int) -> int:
        for i in range(n_ifaces):
            if i not in used[d]:
                used[d].add(i)
                return i
        raise ScenarioError(f"node {d} has no free interface")

    for u, v in pending:
        links.append(canon_link(u, next_free(u), v, next_free(v)))
    return sorted(links)


def gen_states(skeleton: Skeleton, n_ifaces: int, seed: int, adjacency,
               align_angles, rates, theta_deg: float,
               demand_init, demand_final):
    """Initial/final link sets plus initial alignment for a skeleton.

    Both states are spanning trees; edges shared by the two trees keep their
    initial-state interface labels. Idle interfaces point at uniform random
    grid angles.
    """
    node_count = len(skeleton.positions)
    rng1 = np.random.default_rng(np.random.SeedSequence([seed, _S_TREE_INIT]))
    rng2 = np.random.default_rng(np.random.SeedSequence([seed, _S_TREE_FINAL]))
    tree1 = _grow_tree(adjacency, rates, skeleton.core_nodes, n_ifaces,
                       demand_init, rng1)
    tree2 = _grow_tree(adjacency, rates, skeleton.core_nodes, n_ifaces,
                       demand_final, rng2)
    initial_links = _label_edges(tree1, None, node_count, n_ifaces)
    labels = {}
    for d, nu, d2, nv in initial_links:
        labels[(d, d2)] = (nu, nv)
    final_links = _label_edges(tree2, labels, node_count, n_ifaces)

    spr = int(round(360.0 / theta_deg))
    rng_idle = np.random.default_rng(np.random.SeedSequence([seed, _S_IDLE_ANGLES]))
    a0 = [[None] * n_ifaces for _ in range(node_count)]
    for d, nu, d2, nv in initial_links:
        a0[d][nu] = align_angles[d][d2]
        a0[d2][nv] = align_angles[d2][d]
    for d in range(node_count):
        for i in range(n_ifaces):
            if a0[d][i] is None:
                a0[d][i] = float(rng_idle.integers(0, spr)) * theta_deg
    return (tuple(initial_links), tuple(final_links),
            tuple(tuple(row) for row in a0))


def make_scenario(topology: str, n_ifaces: int, slot_count: int, seed: int,
                  theta_deg: float = 10.0, slot_duration_s: float = 0.2,
                  jitter_sigma: float | None = None, range_m: float = 300.0,
                  budget: LinkBudgetParams = DEFAULT_PARAMS) -> Scenario:
    """Full scenario for one of the canonical topologies."""
    if topology == "grid":
        skel = gen_grid(seed, jitter_sigma=jitter_sigma)
    elif topology == "hex-small":
        skel = gen_hexagon("small", seed)
    elif topology == "hex-large":
        skel = gen_hexagon("large", seed)
    else:
        raise ValueError(f"unknown topology {topology!r} (want one of {TOPOLOGIES})")

    node_count = len(skel.positions)
    adjacency = build_adjacency(skel.positions, range_m,
                                usable=lambda dist: link_rate(dist, budget) is not None)
    align = build_align_angles(skel.positions, theta_deg, adjacency)
    rates = [[0.0] * node_count for _ in range(node_count)]
    for u in range(node_count):
        for v in range(node_count):
            if adjacency[u][v]:
                rates[u][v] = link_rate(distance(skel.positions[u],
                                                 skel.positions[v]), budget)
    demand_init = assign_demands(node_count, skel.user_count, seed,
                                 target_total_mbps=skel.demand_target_mbps,
                                 stream=_S_DEMAND_INIT)
    demand_final = assign_demands(node_count, skel.user_count, seed,
                                  target_total_mbps=skel.demand_target_mbps,
                                  stream=_S_DEMAND_FINAL)
    init_links, final_links, a0 = gen_states(
        skel, n_ifaces, seed, adjacency, align, rates, theta_deg,
        demand_init, demand_final)
    s = Scenario(
        node_count=node_count, iface_count=n_ifaces, slot_count=slot_count,
        rotation_step_deg=theta_deg, slot_duration_s=slot_duration_s,
        positions=skel.positions, core_nodes=skel.core_nodes,
        adjacency=tuple(tuple(row) for row in adjacency),
        align_angles=tuple(tuple(row) for row in align),
        link_rate=tuple(tuple(row) for row in rates),
        demand=demand_final,
        initial_alignment=a0,
        initial_links=init_links, final_links=final_links,
        link_budget=budget.as_pairs(),
    )
    problems = validate_scenario(s)
    if problems:
        raise ScenarioError("generated scenario failed validation: "
                            + "; ".join(problems))
    return s


def gen_tiny(seed: int, node_count: int | None = None, slot_count: int = 8,
             theta_deg: float = 45.0, slot_duration_s: float = 0.2) -> Scenario:
    """Small single-interface instance for the exhaustive-oracle tests.

    3 or 4 nodes, one interface each, complete adjacency, matching-shaped
    states. Demand sits only on nodes the final state serves, so the final
    topology routes losslessly and the instance suits nested-horizon
    comparisons (an extra slot at the end adds zero loss).
    """
    rng = np.random.default_rng(np.random.SeedSequence([seed, _S_TINY]))
    d_count = int(node_count) if node_count else int(rng.integers(3, 5))
    spr = int(round(360.0 / theta_deg))

    while True:
        pts = rng.uniform(0.0, 300.0, size=(d_count, 2))
        ok = all(distance(pts[i], pts[j]) >= 60.0
                 for i in range(d_count) for j in range(i + 1, d_count))
        if not ok:
            continue
        positions = tuple((round(float(x), 3), round(float(y), 3)) for x, y in pts)
        adjacency = build_adjacency(positions, 600.0)
        align = build_align_angles(positions, theta_deg, adjacency)
        rates = [[0.0] * d_count for _ in range(d_count)]
        for u in range(d_count):
            for v in range(d_count):
                if adjacency[u][v]:
                    rates[u][v] = link_rate(distance(positions[u], positions[v]),
                                            DEFAULT_PARAMS)
        break

    others = list(range(1, d_count))
    rng.shuffle(others)
    init_links = [canon_link(0, 0, others[0], 0)]
    if d_count == 4 and rng.random() < 0.5:
        init_links.append(canon_link(others[1], 0, others[2], 0))
    others2 = list(range(1, d_count))
    rng.shuffle(others2)
    final_links = [canon_link(0, 0, others2[0], 0)]
    if d_count == 4 and rng.random() < 0.5:
        final_links.append(canon_link(others2[1], 0, others2[2], 0))

    served = {0}
    for d, _, d2, _ in final_links:
        served.update((d, d2))
    # only core-adjacent final nodes route losslessly in the end state
    final_core_partner = {d2 if d == 0 else d
                          for d, _, d2, _ in final_links if 0 in (d, d2)}
    demand = [0.0] * d_count
    for d in final_core_partner:
        demand[d] = float(rng.integers(1, 5) * 25)

    a0 = [[None] for _ in range(d_count)]
    for d, nu, d2, nv in init_links:
        a0[d][nu] = align[d][d2]
        a0[d2][nv] = align[d2][d]
    for d in range(d_count):
        if a0[d][0] is None:
            a0[d][0] = float(rng.integers(0, spr)) * theta_deg

    s = Scenario(
        node_count=d_count, iface_count=1, slot_count=slot_count,
        rotation_step_deg=theta_deg, slot_duration_s=slot_duration_s,
        positions=positions, core_nodes=(0,),
        adjacency=tuple(tuple(row) for row in adjacency),
        align_angles=tuple(tuple(row) for row in align),
        link_rate=tuple(tuple(row) for row in rates),
        demand=tuple(demand),
        initial_alignment=tuple(tuple(row) for row in a0),
        initial_links=tuple(sorted(init_links)),
        final_links=tuple(sorted(final_links)),
        link_budget=DEFAULT_PARAMS.as_pairs(),
    )
    problems = validate_scenario(s)
    if problems:
        raise ScenarioError("generated tiny scenario failed validation: "
                            + "; ".join(problems))
    return s


def load_fig2() -> Scenario:
    """The worked star example: one core, four spokes, one link to relocate."""
    text = (importlib.resources.files("sbra") / "fixtures" / "fig2.json").read_text()
    return scenario_from_json(text)
