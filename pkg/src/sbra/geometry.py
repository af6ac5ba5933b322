"""Planar geometry helpers: bearings, quantization, range-based adjacency.

Bearings are measured counter-clockwise from the positive x axis, in [0, 360).
Quantization snaps a raw bearing to the rotation grid with round-half-up, so
175 deg with a 10 deg step becomes 180 deg.
"""

from __future__ import annotations

import math


def distance(p: tuple[float, float], q: tuple[float, float]) -> float:
    return math.hypot(q[0] - p[0], q[1] - p[1])


def bearing(p: tuple[float, float], q: tuple[float, float]) -> float:
    """Bearing of q as seen from p, degrees in [0, 360)."""
    if p == q:
        raise ValueError("bearing undefined for coincident points")
    ang = math.degrees(math.atan2(q[1] - p[1], q[0] - p[0]))
    return ang % 360.0


def quantize_bearing(angle_deg: float, theta_deg: float) -> float:
    """Snap an angle to the nearest multiple of theta, round-half-up."""
    steps = math.floor(angle_deg / theta_deg + 0.5)
    spr = int(round(360.0 / theta_deg))
    return (steps % spr) * theta_deg


def build_adjacency(positions, max_range_m: float,
                    usable=None) -> tuple[tuple[int, ...], ...]:
    """Binary adjacency: within range, and optionally with a usable link rate.

    ``usable`` is an optional predicate on distance (meters); pairs failing it
    get delta=0 even when in range, keeping adjacency consistent with the link
    budget's unusable region.
    """
    d_count = len(positions)
    rows = []
    for d in range(d_count):
        row = []
        for d2 in range(d_count):
            if d == d2:
                row.append(0)
                continue
            dist = distance(positions[d], positions[d2])
            ok = 0.0 < dist <= max_range_m
            if ok and usable is not None:
                ok = usable(dist)
            row.append(1 if ok else 0)
        rows.append(tuple(row))
    return tuple(rows)


def build_align_angles(positions, theta_deg: float,
                       adjacency) -> tuple[tuple[float | None, ...], ...]:
    """Quantized bearing matrix; None where the pair is not adjacent."""
    d_count = len(positions)
    rows = []
    for d in range(d_count):
        row: list[float | None] = []
        for d2 in range(d_count):
            if d == d2 or not adjacency[d][d2]:
                row.append(None)
            else:
                row.append(quantize_bearing(bearing(positions[d], positions[d2]),
                                            theta_deg))
        rows.append(tuple(row))
    return tuple(rows)
