"""Interface rotation kinematics: schedules, alignment timelines, link detection.

Slots are 1-based (k = 1..K). A movement decision during slot k changes the
interface's alignment as of slot k+1, so the alignment at slot k reflects the
decisions of slots 1..k-1 and an interface needing f rotation slots that starts
at k=1 first points at its target at slot f+1. Decisions in slot K can never
matter inside the horizon and are kept zero.

A link exists at a slot when both interfaces point at each other's node bearing
and the nodes are adjacent; the link is usable at the very slot the angles
first match. Each interface can serve one link per slot, so coincidental
alignments are resolved by a deterministic greedy matching (final links first,
then ascending lexicographic order).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import Link, Prepared, Scenario, canon_link, prepare


def rotation_slots(from_deg: float, to_deg: float, theta_deg: float) -> tuple[int, int]:
    """Slots needed to rotate from one grid angle to another, (cw, ccw).

    Angles grow counter-clockwise (bearings are measured from +x towards +y),
    so clockwise rotation decreases the angle. Both counts sum to 360/theta
    whenever the angles differ, and are (0, 0) when equal.
    """
    spr = int(round(360.0 / theta_deg))
    f = round(from_deg / theta_deg)
    t = round(to_deg / theta_deg)
    if abs(from_deg / theta_deg - f) > 1e-9 or abs(to_deg / theta_deg - t) > 1e-9:
        raise ValueError("angles must be multiples of the rotation step")
    return rotation_steps(int(f), int(t), spr)


def rotation_steps(from_step: int, to_step: int, spr: int) -> tuple[int, int]:
    """Grid-step counterpart of rotation_slots: (cw, ccw)."""
    cw = (from_step - to_step) % spr
    ccw = (to_step - from_step) % spr
    return cw, ccw


def shortest_direction(from_step: int, to_step: int, spr: int) -> tuple[int, int]:
    """(direction, slots) for the shorter rotation; ties break clockwise.

    direction is +1 for clockwise, -1 for counter-clockwise, 0 when aligned.
    """
    cw, ccw = rotation_steps(from_step, to_step, spr)
    if cw == 0:
        return 0, 0
    if cw <= ccw:
        return +1, cw
    return -1, ccw


@dataclass
class RotationSchedule:
    """Per-interface, per-slot binary movement decisions.

    ``cw`` and ``ccw`` have shape (D, N, K); entry k-1 is the decision taken
    during slot k. The two are mutually exclusive per (interface, slot).
    """

    cw: np.ndarray
    ccw: np.ndarray

    @classmethod
    def zeros(cls, d_count: int, n_count: int, k_count: int) -> "RotationSchedule":
        return cls(cw=np.zeros((d_count, n_count, k_count), dtype=np.uint8),
                   ccw=np.zeros((d_count, n_count, k_count), dtype=np.uint8))

    def set_run(self, d: int, n: int, direction: int, start_slot: int, length: int) -> None:
        """Mark ``length`` consecutive decisions starting at 1-based start_slot."""
        if length <= 0 or direction == 0:
            return
        k_count = self.cw.shape[2]
        if start_slot < 1 or start_slot + length - 1 > k_count:
            raise ValueError(
                f"run for interface ({d},{n}) slots [{start_slot},"
                f"{start_slot + length - 1}] outside horizon 1..{k_count}")
        arr = self.cw if direction > 0 else self.ccw
        other = self.ccw if direction > 0 else self.cw
        sl = slice(start_slot - 1, start_slot - 1 + length)
        if arr[d, n, sl].any() or other[d, n, sl].any():
            raise ValueError(f"overlapping movement runs for interface ({d},{n})")
        arr[d, n, sl] = 1

    def exclusive(self) -> bool:
        return not np.any((self.cw == 1) & (self.ccw == 1))

    def to_rle(self) -> list[dict]:
        """Serialize as per-interface direction segments with 1-based slots."""
        segments = []
        d_count, n_count, k_count = self.cw.shape
        for d in range(d_count):
            for n in range(n_count):
                for name, arr in (("cw", self.cw), ("ccw", self.ccw)):
                    run_start = None
                    for k in range(k_count + 1):
                        on = k < k_count and arr[d, n, k]
                        if on and run_start is None:
                            run_start = k
                        elif not on and run_start is not None:
                            segments.append({"iface": [d, n], "dir": name,
                                             "from_slot": run_start + 1, "to_slot": k})
                            run_start = None
        return segments

    @classmethod
    def from_rle(cls, segments: list[dict], d_count: int, n_count: int,
                 k_count: int) -> "RotationSchedule":
        sched = cls.zeros(d_count, n_count, k_count)
        for seg in segments:
            d, n = seg["iface"]
            direction = +1 if seg["dir"] == "cw" else -1
            sched.set_run(d, n, direction, seg["from_slot"],
                          seg["to_slot"] - seg["from_slot"] + 1)
        return sched


def min_slots_to_form(link: Link, s: Scenario) -> int:
    """Fewest rotation slots before both endpoints point at each other.

    Each interface takes the shorter of its two rotation directions; the link
    needs the slower endpoint, so the maximum of the two governs.
    """
    prep = prepare(s)
    d, n, d2, n2 = link
    if not prep.delta[d, d2]:
        raise ValueError(f"link {link} joins non-adjacent nodes")
    own = min(rotation_steps(prep.a0_steps[d, n], prep.v_steps[d, d2], prep.steps_per_rev))
    other = min(rotation_steps(prep.a0_steps[d2, n2], prep.v_steps[d2, d], prep.steps_per_rev))
    return max(own, other)


def unroll(schedule: RotationSchedule, s: Scenario) -> np.ndarray:
    """Alignment timeline, shape (K, D, N), in grid steps.

    timeline[k-1] is the alignment during slot k; slot 1 equals the initial
    alignment and each slot adds theta x (CCW - CW) of the previous slot.
    """
    prep = prepare(s)
    k_count = s.slot_count
    moves = schedule.ccw.astype(np.int64) - schedule.cw.astype(np.int64)
    csum = np.cumsum(moves, axis=2)
    timeline = np.empty((k_count, s.node_count, s.iface_count), dtype=np.int64)
    timeline[0] = prep.a0_steps
    if k_count > 1:
        timeline[1:] = (prep.a0_steps[None, :, :]
                        + np.transpose(csum[:, :, :k_count - 1], (2, 0, 1)))
    timeline %= prep.steps_per_rev
    return timeline


def links_at_slot(alignment_steps: np.ndarray, s: Scenario) -> tuple[Link, ...]:
    """Links formed by a (D, N) alignment snapshot, as a matching.

    Mutually aligned adjacent interface pairs are collected, then greedily
    matched so each interface carries at most one link. Final links take
    priority (the reconfiguration contract depends on them); remaining
    candidates are taken in ascending lexicographic order.
    """
    prep = prepare(s)
    candidates: list[Link] = []
    for d, d2 in prep.neighbor_pairs:
        fwd = np.flatnonzero(alignment_steps[d] == prep.v_steps[d, d2])
        if fwd.size == 0:
            continue
        back = np.flatnonzero(alignment_steps[d2] == prep.v_steps[d2, d])
        for n in fwd:
            for n2 in back:
                candidates.append(canon_link(d, int(n), d2, int(n2)))
    candidates.sort(key=lambda l: (l not in prep.end_set, l))
    used: set[tuple[int, int]] = set()
    chosen: list[Link] = []
    for d, n, d2, n2 in candidates:
        if (d, n) in used or (d2, n2) in used:
            continue
        used.add((d, n))
        used.add((d2, n2))
        chosen.append((d, n, d2, n2))
    chosen.sort()
    return tuple(chosen)


def links_per_slot(schedule: RotationSchedule, s: Scenario) -> tuple[tuple[Link, ...], ...]:
    """Per-slot formed links for a whole schedule (unroll + detection)."""
    timeline = unroll(schedule, s)
    return tuple(links_at_slot(timeline[k], s) for k in range(s.slot_count))
