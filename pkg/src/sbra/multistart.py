"""Multi-start wrapper around the greedy pipeline.

Draws omega random weight sets; each is run once deterministically (xi=1) and
then iters more times with randomized selection (xi=window). The best of the
omega*(1+iters) runs wins, ties going to the earliest iteration, so the result
is a pure function of the scenario and the parameters.

Every random stream is derived from the master seed and the iteration
coordinates, never from execution order, which makes the outcome identical
for any worker count (runtime fields aside).
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .greedy import greedy_sbra
from .model import Scenario, scenario_from_json, scenario_to_json
from .results import ReconfigResult

# Stream tags keeping weight draws and selection draws in disjoint subspaces
# of the master seed.
_STREAM_WEIGHTS = 0
_STREAM_SELECT = 1


@dataclass(frozen=True)
class MultiStartParams:
    omega: int = 20       # random weight sets
    iters: int = 10       # randomized restarts per weight set
    window: int = 10      # xi used by the randomized restarts
    master_seed: int = 0
    workers: int = 1

    def __post_init__(self):
        if self.omega < 1 or self.iters < 0 or self.window < 1:
            raise ValueError("need omega >= 1, iters >= 0, window >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")

    @property
    def total_iterations(self) -> int:
        return self.omega * (1 + self.iters)


def draw_weights(master_seed: int, omega_idx: int) -> list[float]:
    """The weight set for one restart group, uniform per component on [0,1)."""
    rng = np.random.default_rng(
        np.random.SeedSequence([master_seed, _STREAM_WEIGHTS, omega_idx]))
    return [float(w) for w in rng.random(7)]


def _selection_rng(master_seed: int, omega_idx: int, i: int) -> np.random.Generator:
    return np.random.default_rng(
        np.random.SeedSequence([master_seed, _STREAM_SELECT, omega_idx, i]))


def _run_one(s: Scenario, master_seed: int, omega_idx: int, i: int,
             window: int) -> ReconfigResult:
    weights = draw_weights(master_seed, omega_idx)
    if i == 0:
        return greedy_sbra(s, weights, xi=1)
    return greedy_sbra(s, weights, xi=window,
                       rng=_selection_rng(master_seed, omega_idx, i))


_worker_scenario: Scenario | None = None


def _worker_init(scenario_json: str) -> None:
    global _worker_scenario
    _worker_scenario = scenario_from_json(scenario_json)


def _worker_task(task: tuple[int, int, int, int]) -> tuple[int, int, float]:
    master_seed, omega_idx, i, window = task
    res = _run_one(_worker_scenario, master_seed, omega_idx, i, window)
    return (res.total_loss_kbps_slots, res.total_loss_bytes,
            res.timings_ms.get("total_ms", 0.0))


def ms_greedy_sbra(s: Scenario, p: MultiStartParams | None = None
                   ) -> tuple[ReconfigResult, list[dict]]:
    """Run the full multi-start and return (best result, iteration log).

    The log has one row per iteration in iteration order: iter, omega_index,
    xi, w1..w7, total_loss_bytes, runtime_ms. The best result is re-materialized
    from its coordinates in the parent process, so parallel runs return the
    same object a serial run does.
    """
    if p is None:
        p = MultiStartParams()
    t0 = time.perf_counter()
    coords = []  # iteration j -> (omega_idx, i)
    for omega_idx in range(p.omega):
        for i in range(p.iters + 1):
            coords.append((omega_idx, i))

    if p.workers == 1:
        outcomes = []
        for omega_idx, i in coords:
            res = _run_one(s, p.master_seed, omega_idx, i, p.window)
            outcomes.append((res.total_loss_kbps_slots, res.total_loss_bytes,
                             res.timings_ms.get("total_ms", 0.0)))
    else:
        tasks = [(p.master_seed, omega_idx, i, p.window)
                 for omega_idx, i in coords]
        with ProcessPoolExecutor(
                max_workers=p.workers, initializer=_worker_init,
                initargs=(scenario_to_json(s),)) as pool:
            chunk = max(1, len(tasks) // (p.workers * 4))
            outcomes = list(pool.map(_worker_task, tasks, chunksize=chunk))

    log = []
    best_key = None
    for j, ((omega_idx, i), (loss_ks, loss_b, ms)) in enumerate(zip(coords, outcomes)):
        w = draw_weights(p.master_seed, omega_idx)
        row = {"iter": j, "omega_index": omega_idx,
               "xi": 1 if i == 0 else p.window}
        row.update({f"w{a + 1}": w[a] for a in range(7)})
        row["total_loss_bytes"] = loss_b
        row["runtime_ms"] = round(ms, 3)
        log.append(row)
        if best_key is None or (loss_ks, j) < best_key:
            best_key = (loss_ks, j)

    best_j = best_key[1]
    omega_idx, i = coords[best_j]
    best = _run_one(s, p.master_seed, omega_idx, i, p.window)
    best.algo = "ms-greedy"
    best.params.update({
        "omega": p.omega, "iters": p.iters, "window": p.window,
        "master_seed": p.master_seed, "iterations": p.total_iterations,
        "best_iter": best_j, "best_omega_index": omega_idx,
        "best_xi": 1 if i == 0 else p.window,
    })
    best.timings_ms["multistart_total_ms"] = (time.perf_counter() - t0) * 1e3
    if best.total_loss_kbps_slots != best_key[0]:
        raise AssertionError("re-materialized best differs from logged loss")
    return best, log
