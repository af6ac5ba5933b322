"""Shared fixtures and independent reference oracles for the test suite.

The oracles here deliberately re-derive results from first principles
(step-by-step simulation, subset enumeration) rather than calling back into
the library, so a bug in the implementation cannot hide in its own test.
"""

import numpy as np
import pytest

from sbra.model import Scenario, canon_link
from sbra.scenarios import load_fig2


@pytest.fixture(scope="session")
def fig2() -> Scenario:
    return load_fig2()


@pytest.fixture(scope="session")
def s3() -> Scenario:
    """Line of three nodes where one relay hop avoids all reconfiguration loss.

    Node 1 (demand 100) starts linked to the core node 0 and must end linked
    to node 2 instead, while node 0 swings its first interface from node 1 to
    node 2. Node 2 owns two interfaces and can bridge 1 -> 2 -> 0 while the
    swing is in flight; without that bridge exactly one slot of demand is lost.
    """
    return Scenario(
        node_count=3, iface_count=2, slot_count=4,
        rotation_step_deg=90.0, slot_duration_s=0.2,
        positions=((100.0, 0.0), (0.0, 0.0), (200.0, 0.0)),
        core_nodes=(0,),
        adjacency=((0, 1, 1), (1, 0, 1), (1, 1, 0)),
        align_angles=((None, 180.0, 0.0), (0.0, None, 0.0), (180.0, 180.0, None)),
        link_rate=((0.0, 1000.0, 1000.0), (1000.0, 0.0, 1000.0),
                   (1000.0, 1000.0, 0.0)),
        demand=(0.0, 100.0, 0.0),
        initial_alignment=((180.0, 270.0), (0.0, 0.0), (90.0, 90.0)),
        initial_links=(canon_link(0, 0, 1, 0),),
        final_links=(canon_link(0, 0, 2, 0), canon_link(1, 1, 2, 1)),
    )


def brute_force_delivered(edges, rho, cores) -> int:
    """Exhaustive min-cut reference for the routing network.

    The flow network is: source -> every core (unbounded), node -> sink at its
    demand, each undirected edge as two directed arcs. By max-flow = min-cut
    the deliverable traffic is the cheapest source/sink cut; any finite cut
    keeps all cores on the source side, so enumerating subsets A of non-core
    nodes (source side = cores + A) covers every finite cut. An edge crossing
    sides costs its capacity once per crossing direction represented, which
    for the undirected gadget is its capacity once; a node on the source side
    pays its demand edge.
    """
    n = len(rho)
    cores = set(cores)
    others = [d for d in range(n) if d not in cores]
    best = None
    for mask in range(1 << len(others)):
        side = set(cores)
        for i, d in enumerate(others):
            if mask >> i & 1:
                side.add(d)
        cut = sum(rho[d] for d in side)
        for u, v, cap in edges:
            if (u in side) != (v in side):
                cut += cap
        if best is None or cut < best:
            best = cut
    return best


def random_flow_case(rng: np.random.Generator):
    """One random routing instance: (edges, rho, cores), at most 12 nodes."""
    n = int(rng.integers(2, 13))
    core_count = 1 if n < 4 else int(rng.integers(1, 3))
    cores = sorted(rng.choice(n, size=core_count, replace=False).tolist())
    rho = [int(rng.integers(0, 500)) * 100 for _ in range(n)]
    edges = []
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < 0.35:
                edges.append((u, v, int(rng.integers(1, 400)) * 100))
    return edges, rho, cores


def simulate_alignment(a0_step: int, decisions, spr: int) -> list[int]:
    """Slot-by-slot alignment from per-slot direction decisions (+1 cw / -1 ccw).

    Independent reference for kinematics.unroll: the alignment during slot k
    reflects decisions 1..k-1 only, and clockwise decreases the angle.
    """
    out = [a0_step % spr]
    for dec in decisions[:-1]:
        out.append((out[-1] - dec) % spr)
    return out


def steps_by_walking(from_step: int, to_step: int, spr: int) -> tuple[int, int]:
    """(cw, ccw) rotation counts found by literally walking the grid."""
    cw = 0
    pos = from_step % spr
    while pos != to_step % spr:
        pos = (pos - 1) % spr
        cw += 1
    ccw = 0
    pos = from_step % spr
    while pos != to_step % spr:
        pos = (pos + 1) % spr
        ccw += 1
    return cw, ccw
