"""Core data model: the scenario container, validation, and canonical JSON I/O.

A scenario bundles everything one reconfiguration problem needs: node geometry,
which node pairs may ever link (adjacency), the bearing each interface must adopt
to point at a neighbor, per-pair capacities, per-node demand, the initial and
final link sets, and the time horizon. Angles live on the rotation grid (exact
multiples of the per-slot step) so all slot arithmetic is integral.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

FORMAT_VERSION = "sbra-scenario/1"

# A link is an interface pair (d, n, d2, n2), canonically ordered (d, n) < (d2, n2).
Link = tuple[int, int, int, int]


def canon_link(d: int, n: int, d2: int, n2: int) -> Link:
    """Return the canonical orientation of an interface-pair link."""
    if (d, n) <= (d2, n2):
        return (d, n, d2, n2)
    return (d2, n2, d, n)


@dataclass(frozen=True)
class Scenario:
    """Immutable reconfiguration problem instance.

    Field names match the JSON document keys one-to-one. Angles are degrees and
    must be exact multiples of ``rotation_step_deg``; ``align_angles`` uses None
    for non-adjacent pairs and the diagonal. Rates are Mbps, demand is Mbps.
    """

    node_count: int
    iface_count: int
    slot_count: int
    rotation_step_deg: float
    slot_duration_s: float
    positions: tuple[tuple[float, float], ...]
    core_nodes: tuple[int, ...]
    adjacency: tuple[tuple[int, ...], ...]
    align_angles: tuple[tuple[float | None, ...], ...]
    link_rate: tuple[tuple[float, ...], ...]
    demand: tuple[float, ...]
    initial_alignment: tuple[tuple[float, ...], ...]
    initial_links: tuple[Link, ...]
    final_links: tuple[Link, ...]
    link_budget: tuple[tuple[str, float], ...] | None = None

    @property
    def steps_per_rev(self) -> int:
        return int(round(360.0 / self.rotation_step_deg))

    def with_slot_count(self, k: int) -> "Scenario":
        """Same instance with a different horizon (states are K-independent)."""
        return replace(self, slot_count=k)


class ScenarioError(ValueError):
    """Raised when a scenario fails validation or cannot be parsed."""


def _grid_steps(value: float, theta: float) -> int | None:
    """Angle in degrees -> grid steps, or None if off-grid/out of range."""
    if not (0.0 <= value < 360.0):
        return None
    steps = value / theta
    rounded = round(steps)
    if abs(steps - rounded) > 1e-9:
        return None
    return int(rounded)


def validate_scenario(s: Scenario) -> list[str]:
    """Check every structural invariant; return human-readable violations.

    An empty list means the scenario is safe for every algorithm in the package.
    """
    v: list[str] = []
    d_count, n_count = s.node_count, s.iface_count
    if d_count < 1:
        v.append("node_count must be >= 1")
    if n_count < 1:
        v.append("iface_count must be >= 1")
    if s.slot_count < 1:
        v.append("slot_count must be >= 1")
    if s.slot_duration_s <= 0:
        v.append("slot_duration_s must be > 0")
    theta = s.rotation_step_deg
    if theta <= 0 or abs(360.0 / theta - round(360.0 / theta)) > 1e-9:
        v.append(f"rotation_step_deg={theta} must divide 360")
        return v  # grid checks below are meaningless without a valid step

    if len(s.positions) != d_count:
        v.append(f"positions has {len(s.positions)} rows, expected {d_count}")
    for mat, name in ((s.adjacency, "adjacency"), (s.align_angles, "align_angles"),
                      (s.link_rate, "link_rate")):
        if len(mat) != d_count or any(len(row) != d_count for row in mat):
            v.append(f"{name} is not {d_count}x{d_count}")
    if len(s.demand) != d_count:
        v.append(f"demand has {len(s.demand)} entries, expected {d_count}")
    if len(s.initial_alignment) != d_count or any(
            len(row) != n_count for row in s.initial_alignment):
        v.append(f"initial_alignment is not {d_count}x{n_count}")
    if v:
        return v

    for c in s.core_nodes:
        if not 0 <= c < d_count:
            v.append(f"core node {c} out of range")
    if len(set(s.core_nodes)) != len(s.core_nodes):
        v.append("core_nodes contains duplicates")

    for d in range(d_count):
        if s.adjacency[d][d] != 0:
            v.append(f"adjacency diagonal nonzero at node {d}")
        for d2 in range(d_count):
            a = s.adjacency[d][d2]
            if a not in (0, 1):
                v.append(f"adjacency[{d}][{d2}]={a} is not binary")
            elif a != s.adjacency[d2][d]:
                v.append(f"adjacency asymmetric at ({d},{d2})")
            if a == 1:
                if s.link_rate[d][d2] <= 0:
                    v.append(f"link_rate[{d}][{d2}] must be > 0 where adjacent")
                ang = s.align_angles[d][d2]
                if ang is None:
                    v.append(f"align_angles[{d}][{d2}] missing for adjacent pair")
                elif _grid_steps(ang, theta) is None:
                    v.append(f"align_angles[{d}][{d2}]={ang} off the {theta} deg grid")
        for n in range(n_count):
            ang = s.initial_alignment[d][n]
            if _grid_steps(ang, theta) is None:
                v.append(f"initial_alignment[{d}][{n}]={ang} off the {theta} deg grid")

    # The two bearings of one segment face each other: differ by 180 within theta.
    for d in range(d_count):
        for d2 in range(d, d_count):
            if s.adjacency[d][d2] != 1:
                continue
            a, b = s.align_angles[d][d2], s.align_angles[d2][d]
            if a is None or b is None:
                continue
            diff = (a - b) % 360.0
            if abs(diff - 180.0) > theta + 1e-9:
                v.append(f"align_angles ({d},{d2}) not opposite bearings: {a} vs {b}")

    for rho, d in zip(s.demand, range(d_count)):
        if rho < 0:
            v.append(f"demand[{d}]={rho} must be >= 0")

    for name, links in (("initial_links", s.initial_links),
                        ("final_links", s.final_links)):
        used: set[tuple[int, int]] = set()
        for link in links:
            d, n, d2, n2 = link
            ok_range = (0 <= d < d_count and 0 <= d2 < d_count
                        and 0 <= n < n_count and 0 <= n2 < n_count)
            if not ok_range:
                v.append(f"{name} {link} out of range")
                continue
            if d == d2:
                v.append(f"{name} {link} is a self-link")
                continue
            if link != canon_link(*link):
                v.append(f"{name} {link} not in canonical order")
            if s.adjacency[d][d2] != 1:
                v.append(f"{name} {link} joins non-adjacent nodes")
            for iface in ((d, n), (d2, n2)):
                if iface in used:
                    v.append(f"{name}: interface {iface} appears in two links")
                used.add(iface)
        if len(set(links)) != len(links):
            v.append(f"{name} contains duplicates")

    for d, n, d2, n2 in s.initial_links:
        if s.adjacency[d][d2] != 1:
            continue
        va, vb = s.align_angles[d][d2], s.align_angles[d2][d]
        if (va is None or vb is None
                or abs(s.initial_alignment[d][n] - va) > 1e-9
                or abs(s.initial_alignment[d2][n2] - vb) > 1e-9):
            v.append(f"initial link ({d},{n},{d2},{n2}) not aligned in initial_alignment")

    # A final link first exists at slot f+1 after f rotation slots starting at
    # k=1, so it is realizable at slot K only when f <= K-1.
    if not v:
        prep = prepare(s)
        for link in s.final_links:
            d, n, d2, n2 = link
            f = max(
                min(_rot_pair(prep.a0_steps[d][n], prep.v_steps[d][d2], prep.steps_per_rev)),
                min(_rot_pair(prep.a0_steps[d2][n2], prep.v_steps[d2][d], prep.steps_per_rev)),
            )
            if f > s.slot_count - 1:
                v.append(
                    f"final link {link} needs {f} rotation slots and can first exist "
                    f"at slot {f + 1} > K={s.slot_count}")
    return v


def _rot_pair(from_step: int, to_step: int, steps_per_rev: int) -> tuple[int, int]:
    cw = (from_step - to_step) % steps_per_rev
    ccw = (to_step - from_step) % steps_per_rev
    return cw, ccw


@dataclass(frozen=True)
class Prepared:
    """Integer working arrays derived from a validated scenario.

    Angles are grid steps, rates/demands are exact kbps. Shared by every
    algorithm module; built once per scenario via ``prepare``.
    """

    steps_per_rev: int
    delta: np.ndarray           # (D, D) bool
    v_steps: np.ndarray         # (D, D) int, -1 where undefined
    a0_steps: np.ndarray        # (D, N) int
    r_kbps: np.ndarray          # (D, D) int
    rho_kbps: np.ndarray        # (D,) int
    init_set: frozenset
    end_set: frozenset
    init_by_iface: dict
    end_by_iface: dict
    neighbor_pairs: tuple[tuple[int, int], ...]  # d < d2 with delta=1

    def __post_init__(self):
        for arr in (self.delta, self.v_steps, self.a0_steps, self.r_kbps, self.rho_kbps):
            arr.setflags(write=False)


@lru_cache(maxsize=64)
def prepare(s: Scenario) -> Prepared:
    """Convert a (valid) scenario to integer working form."""
    theta = s.rotation_step_deg
    spr = s.steps_per_rev
    d_count, n_count = s.node_count, s.iface_count
    delta = np.array(s.adjacency, dtype=bool)
    v_steps = np.full((d_count, d_count), -1, dtype=np.int64)
    for d in range(d_count):
        for d2 in range(d_count):
            ang = s.align_angles[d][d2]
            if ang is not None and delta[d][d2]:
                st = _grid_steps(float(ang), theta)
                if st is None:
                    raise ScenarioError(f"align_angles[{d}][{d2}]={ang} off grid")
                v_steps[d, d2] = st
    a0_steps = np.empty((d_count, n_count), dtype=np.int64)
    for d in range(d_count):
        for n in range(n_count):
            st = _grid_steps(float(s.initial_alignment[d][n]), theta)
            if st is None:
                raise ScenarioError(f"initial_alignment[{d}][{n}] off grid")
            a0_steps[d, n] = st
    r_kbps = np.array(
        [[int(round(x * 1000.0)) for x in row] for row in s.link_rate], dtype=np.int64)
    rho_kbps = np.array([int(round(x * 1000.0)) for x in s.demand], dtype=np.int64)
    init_by_iface = {}
    for link in s.initial_links:
        d, n, d2, n2 = link
        init_by_iface[(d, n)] = link
        init_by_iface[(d2, n2)] = link
    end_by_iface = {}
    for link in s.final_links:
        d, n, d2, n2 = link
        end_by_iface[(d, n)] = link
        end_by_iface[(d2, n2)] = link
    pairs = tuple(
        (d, d2) for d in range(d_count) for d2 in range(d + 1, d_count) if delta[d, d2])
    return Prepared(
        steps_per_rev=spr,
        delta=delta,
        v_steps=v_steps,
        a0_steps=a0_steps,
        r_kbps=r_kbps,
        rho_kbps=rho_kbps,
        init_set=frozenset(s.initial_links),
        end_set=frozenset(s.final_links),
        init_by_iface=init_by_iface,
        end_by_iface=end_by_iface,
        neighbor_pairs=pairs,
    )


def _num(x: float):
    """Emit ints without a trailing .0 so serialization is stable."""
    if isinstance(x, bool):
        return x
    f = float(x)
    return int(f) if f.is_integer() and abs(f) < 1e15 else f


def scenario_to_dict(s: Scenario) -> dict:
    return {
        "format": FORMAT_VERSION,
        "node_count": s.node_count,
        "iface_count": s.iface_count,
        "slot_count": s.slot_count,
        "rotation_step_deg": _num(s.rotation_step_deg),
        "slot_duration_s": _num(s.slot_duration_s),
        "positions": [[float(x), float(y)] for x, y in s.positions],
        "core_nodes": list(s.core_nodes),
        "adjacency": [list(row) for row in s.adjacency],
        "align_angles": [[None if a is None else _num(a) for a in row]
                         for row in s.align_angles],
        "link_rate": [[_num(x) for x in row] for row in s.link_rate],
        "demand": [_num(x) for x in s.demand],
        "initial_alignment": [[_num(a) for a in row] for row in s.initial_alignment],
        "initial_links": [list(l) for l in s.initial_links],
        "final_links": [list(l) for l in s.final_links],
        "link_budget": None if s.link_budget is None else dict(s.link_budget),
    }


def scenario_from_dict(doc: dict) -> Scenario:
    if doc.get("format") != FORMAT_VERSION:
        raise ScenarioError(
            f"unsupported scenario format {doc.get('format')!r}, expected {FORMAT_VERSION!r}")
    try:
        lb = doc.get("link_budget")
        return Scenario(
            node_count=int(doc["node_count"]),
            iface_count=int(doc["iface_count"]),
            slot_count=int(doc["slot_count"]),
            rotation_step_deg=float(doc["rotation_step_deg"]),
            slot_duration_s=float(doc["slot_duration_s"]),
            positions=tuple((float(x), float(y)) for x, y in doc["positions"]),
            core_nodes=tuple(int(c) for c in doc["core_nodes"]),
            adjacency=tuple(tuple(int(a) for a in row) for row in doc["adjacency"]),
            align_angles=tuple(
                tuple(None if a is None else float(a) for a in row)
                for row in doc["align_angles"]),
            link_rate=tuple(tuple(float(x) for x in row) for row in doc["link_rate"]),
            demand=tuple(float(x) for x in doc["demand"]),
            initial_alignment=tuple(
                tuple(float(a) for a in row) for row in doc["initial_alignment"]),
            initial_links=tuple(canon_link(*map(int, l)) for l in doc["initial_links"]),
            final_links=tuple(canon_link(*map(int, l)) for l in doc["final_links"]),
            link_budget=None if lb is None else tuple(sorted(
                (str(k), float(val)) for k, val in lb.items())),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ScenarioError(f"malformed scenario document: {exc}") from exc


def scenario_to_json(s: Scenario) -> str:
    return json.dumps(scenario_to_dict(s), indent=1, sort_keys=True)


def scenario_from_json(text: str) -> Scenario:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"not valid JSON: {exc}") from exc
    return scenario_from_dict(doc)


def load_scenario(path: str) -> Scenario:
    with open(path, "r", encoding="utf-8") as fh:
        return scenario_from_json(fh.read())


def save_scenario(s: Scenario, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(scenario_to_json(s))
        fh.write("\n")


def scenario_digest(s: Scenario) -> str:
    """Stable content hash used to stamp every result file."""
    canonical = json.dumps(scenario_to_dict(s), sort_keys=True,
                           separators=(",", ":")).encode("utf-8")
    return hashlib.sha256(canonical).hexdigest()
