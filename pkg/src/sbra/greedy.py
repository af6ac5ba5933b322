"""Greedy reconfiguration pipeline: select links, schedule rotations, route.

Selection walks the ranked candidate list, repeatedly taking the head (or, in
randomized runs, a uniform choice among the first xi entries) and discarding
every candidate that shares an interface with the choice, so the selected set
is an interface matching.

Movement assignment turns the selection into per-slot rotation decisions:

1. Both endpoints of a selected link arrive together as early as possible: the
   slower endpoint starts at slot 1, the faster delays so both point at each
   other from slot f+1. If the link is not itself a final link, endpoints that
   owe a final link hold through the link's MALT window and then depart at
   slot f+MALT, arriving at their final bearing no later than slot K.
2. Every final-link interface recruited by no selected link rotates along its
   shorter direction timed to arrive exactly at slot K.

The realized final topology therefore always contains the final link set, and
each interface's slot decisions are exclusive (one direction at a time).
"""

from __future__ import annotations

import time

import numpy as np

from .kinematics import RotationSchedule, links_per_slot, shortest_direction
from .model import Scenario, prepare
from .preprocess import LinkCandidate, possible_links
from .ranking import rank
from .results import ReconfigResult, make_result
from .routing import total_reconfig_loss


class InfeasibleScheduleError(ValueError):
    """A trace or scenario that cannot realize the final links by slot K."""


class ContractViolation(AssertionError):
    """Internal invariant breach: the built schedule missed the final topology."""


def select_links(ranked, xi: int, rng: np.random.Generator | None = None
                 ) -> list[LinkCandidate]:
    """Pick a conflict-free link set from a ranked candidate list.

    ``ranked`` is the output of ranking.rank (score, candidate) or a plain
    candidate list. With xi <= 1 the head is always taken (pure greedy);
    otherwise the pick is uniform among the first min(xi, remaining) entries.
    """
    pool = [r[1] if isinstance(r, tuple) else r for r in ranked]
    if xi > 1 and rng is None:
        raise ValueError("randomized selection (xi > 1) needs an rng")
    chosen: list[LinkCandidate] = []
    while pool:
        idx = 0 if xi <= 1 else int(rng.integers(0, min(xi, len(pool))))
        cand = pool.pop(idx)
        chosen.append(cand)
        d, n, d2, n2 = cand.link
        taken = {(d, n), (d2, n2)}
        pool = [c for c in pool
                if (c.link[0], c.link[1]) not in taken
                and (c.link[2], c.link[3]) not in taken]
    return chosen


def assign_movements(selected: list[LinkCandidate], s: Scenario) -> RotationSchedule:
    """Build the rotation schedule realizing a selection plus all final links."""
    prep = prepare(s)
    k_count = s.slot_count
    sched = RotationSchedule.zeros(s.node_count, s.iface_count, k_count)
    sel_ifaces: set[tuple[int, int]] = set()
    for cand in selected:
        d, n, d2, n2 = cand.link
        sel_ifaces.update(((d, n), (d2, n2)))

    for cand in selected:
        d, n, d2, n2 = cand.link
        f = cand.form_slots
        if f > k_count - 1:
            raise InfeasibleScheduleError(
                f"link {cand.link} needs {f} slots, first exists at slot {f + 1} > K")
        for iface, plan in zip(((d, n), (d2, n2)), cand.plans):
            if plan.formation_slots > 0:
                # Synchronized arrival: the faster endpoint delays its start.
                sched.set_run(iface[0], iface[1], plan.direction,
                              f - plan.formation_slots + 1, plan.formation_slots)
        if cand.link in prep.end_set:
            continue  # a selected final link holds through slot K
        for iface, plan in zip(((d, n), (d2, n2)), cand.plans):
            if plan.final_link is not None and plan.transition_slots > 0:
                sched.set_run(iface[0], iface[1], plan.transition_direction,
                              f + cand.malt, plan.transition_slots)

    # Final-link interfaces no selected link recruited arrive exactly at K.
    for link in s.final_links:
        fd, fn, fd2, fn2 = link
        for iface, partner_node in (((fd, fn), fd2), ((fd2, fn2), fd)):
            if iface in sel_ifaces:
                continue
            direction, slots = shortest_direction(
                int(prep.a0_steps[iface[0], iface[1]]),
                int(prep.v_steps[iface[0], partner_node]),
                prep.steps_per_rev)
            if slots > k_count - 1:
                raise InfeasibleScheduleError(
                    f"final link {link}: interface {iface} needs {slots} rotation "
                    f"slots but only {k_count - 1} are available")
            if slots > 0:
                sched.set_run(iface[0], iface[1], direction, k_count - slots, slots)
            sel_ifaces.add(iface)
    return sched


def check_final_contract(per_slot_links, s: Scenario) -> None:
    """Raise unless the last slot's topology contains every final link."""
    realized = set(per_slot_links[-1])
    missing = [l for l in s.final_links if l not in realized]
    if missing:
        raise ContractViolation(f"final links not realized at slot K: {missing}")


def greedy_sbra(s: Scenario, weights, xi: int = 1,
                rng: np.random.Generator | None = None,
                algo_name: str = "greedy",
                params_extra: dict | None = None) -> ReconfigResult:
    """One full greedy run: preprocess, rank, select, schedule, route."""
    timings: dict[str, float] = {}
    t = time.perf_counter()
    cands = possible_links(s)
    timings["preprocess_ms"] = (time.perf_counter() - t) * 1e3

    t = time.perf_counter()
    ranked = rank(cands, weights)
    timings["rank_ms"] = (time.perf_counter() - t) * 1e3

    t = time.perf_counter()
    selected = select_links(ranked, xi, rng)
    timings["select_ms"] = (time.perf_counter() - t) * 1e3

    t = time.perf_counter()
    schedule = assign_movements(selected, s)
    per_slot = links_per_slot(schedule, s)
    check_final_contract(per_slot, s)
    timings["schedule_ms"] = (time.perf_counter() - t) * 1e3

    t = time.perf_counter()
    loss = total_reconfig_loss(per_slot, s)
    timings["route_ms"] = (time.perf_counter() - t) * 1e3
    timings["total_ms"] = sum(timings.values())

    params = {"weights": [float(w) for w in weights], "xi": int(xi),
              "selected_links": [list(c.link) for c in selected]}
    if params_extra:
        params.update(params_extra)
    return make_result(algo_name, s, schedule, per_slot, loss, params, timings)
