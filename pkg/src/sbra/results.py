"""Result container for reconfiguration runs and its JSON serialization.

Every run (greedy, multi-start, baselines, oracle) produces a ReconfigResult:
the rotation schedule, the realized per-slot link sets, the loss report in both
units, and enough metadata (tool version, scenario digest, full parameter echo,
seed) to re-run the computation bit-identically.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from . import __version__
from .kinematics import RotationSchedule
from .model import Link, Scenario, scenario_digest
from .routing import LossReport, mbps_slots_str


@dataclass
class ReconfigResult:
    algo: str
    scenario_digest: str
    schedule: RotationSchedule
    per_slot_links: tuple[tuple[Link, ...], ...]
    loss: LossReport
    params: dict = field(default_factory=dict)
    timings_ms: dict = field(default_factory=dict)

    @property
    def total_loss_kbps_slots(self) -> int:
        return self.loss.total_loss_kbps_slots

    @property
    def total_loss_bytes(self) -> int:
        return self.loss.total_loss_bytes

    def to_dict(self) -> dict:
        return {
            "format": "sbra-result/1",
            "tool_version": __version__,
            "algo": self.algo,
            "scenario_digest": self.scenario_digest,
            "params": _jsonable(self.params),
            "total_loss_bytes": self.loss.total_loss_bytes,
            "total_loss_mbps_slots": mbps_slots_str(self.loss.total_loss_kbps_slots),
            "per_node_loss_bytes": list(self.loss.per_node_loss_bytes),
            "per_node_loss_mbps_slots": [
                mbps_slots_str(v) for v in self.loss.per_node_loss_kbps_slots],
            "per_slot_loss_mbps": [
                mbps_slots_str(v) for v in self.loss.per_slot_loss_kbps],
            "schedule_rle": self.schedule.to_rle(),
            "per_slot_links": [[list(l) for l in links] for links in self.per_slot_links],
            "timings_ms": {k: round(v, 3) for k, v in self.timings_ms.items()},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True)

    def save(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_json())
            fh.write("\n")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (str, int, float, bool)) or obj is None:
        return obj
    return str(obj)


def make_result(algo: str, s: Scenario, schedule: RotationSchedule,
                per_slot_links, loss: LossReport, params: dict,
                timings_ms: dict) -> ReconfigResult:
    return ReconfigResult(
        algo=algo,
        scenario_digest=scenario_digest(s),
        schedule=schedule,
        per_slot_links=tuple(tuple(links) for links in per_slot_links),
        loss=loss,
        params=params,
        timings_ms=timings_ms,
    )
