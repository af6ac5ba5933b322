"""Candidate link preprocessing: formation cost, hold window, raw attributes.

For every adjacent interface pair the planner works out how the two interfaces
would form the link and for how long it could then stay up:

* formation slots: rotation slots until both endpoints point at each other,
  the slower endpoint governing;
* maximum active link time (MALT): slots the link can stay formed after
  formation before its endpoints must depart to realize their final links at
  slot K, clamped at zero.

An endpoint that owes a different final link measures its onward transition on
the axis of its final rotation's minimal direction: forming the candidate along
that direction leaves f_end - c slots of onward travel, forming it the opposite
way costs c + f_end (undo the detour, then the full final trip). Both formation
directions are evaluated and the pair minimizing formation + transition is
kept, so the movement plan, the MALT window, and the departure all describe one
coherent trajectory. Links with MALT = 0 can never be held for even one slot
and are excluded from the possible set.
"""

from __future__ import annotations

from dataclasses import dataclass

from .kinematics import rotation_steps, shortest_direction
from .model import Link, Prepared, Scenario, prepare


@dataclass(frozen=True)
class EndpointPlan:
    """One interface's side of a candidate link plan.

    Directions are +1 (clockwise) / -1 (counter-clockwise) / 0 (no movement).
    formation_slots is the rotation cost along ``direction``; transition_slots
    and transition_direction describe the onward rotation owed to the
    endpoint's final link once the hold window ends (zero when it owes none or
    the candidate is that final link).
    """

    direction: int
    formation_slots: int
    transition_slots: int
    transition_direction: int
    final_link: Link | None


@dataclass(frozen=True)
class LinkCandidate:
    """A candidate link with its plan and raw ranking attributes."""

    link: Link
    form_slots: int
    malt: int
    plans: tuple[EndpointPlan, EndpointPlan]
    attrs: tuple[int, int, int, int, int, int, int]


def _endpoint_plan(prep: Prepared, d: int, n: int, partner: int) -> EndpointPlan:
    spr = prep.steps_per_rev
    a0 = int(prep.a0_steps[d, n])
    b = int(prep.v_steps[d, partner])
    final = prep.end_by_iface.get((d, n))

    if final is None:
        direction, cost = shortest_direction(a0, b, spr)
        return EndpointPlan(direction, cost, 0, 0, None)

    fd, fn, fd2, _ = final
    final_partner = fd2 if (fd, fn) == (d, n) else fd
    bf = int(prep.v_steps[d, final_partner])
    f_cw, f_ccw = rotation_steps(a0, bf, spr)
    if f_cw <= f_ccw:
        f_end, dir_f = f_cw, +1
    else:
        f_end, dir_f = f_ccw, -1

    # Both formation directions are scored on the axis of the final rotation:
    # forming along it leaves |f_end - c| slots of onward travel, forming
    # against it costs the detour back plus the full final trip (c + f_end).
    best = None
    cw_c, ccw_c = rotation_steps(a0, b, spr)
    for direction, cost in ((+1, cw_c), (-1, ccw_c)):
        signed = cost if direction == dir_f else -cost
        transition = abs(f_end - signed)
        key = (cost + transition, cost, -direction)
        if best is None or key < best[0]:
            best = (key, direction, cost, transition, signed)
    _, direction, cost, transition, signed = best
    if cost == 0:
        direction = 0
    if transition == 0:
        trans_dir = 0
    else:
        trans_dir = dir_f if f_end > signed else -dir_f
    return EndpointPlan(direction, cost, transition, trans_dir, final)


def _plan_for_final_endpoint(prep: Prepared, d: int, n: int, partner: int) -> EndpointPlan:
    """Plan for an endpoint whose candidate IS its final link: no transition."""
    direction, cost = shortest_direction(
        int(prep.a0_steps[d, n]), int(prep.v_steps[d, partner]), prep.steps_per_rev)
    return EndpointPlan(direction, cost, 0, 0, prep.end_by_iface.get((d, n)))


def compute_malt(link: Link, s: Scenario) -> LinkCandidate:
    """Build the full candidate record (plans, form_slots, MALT, attributes)."""
    prep = prepare(s)
    d, n, d2, n2 = link
    k_count = s.slot_count
    is_final = link in prep.end_set

    if is_final:
        plan_a = _plan_for_final_endpoint(prep, d, n, d2)
        plan_b = _plan_for_final_endpoint(prep, d2, n2, d)
    else:
        plan_a = _endpoint_plan(prep, d, n, d2)
        plan_b = _endpoint_plan(prep, d2, n2, d)

    form_slots = max(plan_a.formation_slots, plan_b.formation_slots)
    if is_final or (plan_a.final_link is None and plan_b.final_link is None):
        malt = k_count - form_slots
    else:
        malt = (k_count - form_slots
                - max(plan_a.transition_slots, plan_b.transition_slots))
    malt = max(malt, 0)

    rho = prep.rho_kbps
    a3 = sum(1 for iface in ((d, n), (d2, n2)) if iface not in prep.init_by_iface)
    a6 = 0
    a7 = 0
    for iface in ((d, n), (d2, n2)):
        init = prep.init_by_iface.get(iface)
        if init is not None:
            a6 += int(rho[init[0]]) + int(rho[init[2]])
        end = prep.end_by_iface.get(iface)
        if end is not None:
            a7 += int(rho[end[0]]) + int(rho[end[2]])
    attrs = (form_slots, malt, a3,
             1 if link in prep.init_set else 0,
             1 if is_final else 0,
             a6, a7)
    return LinkCandidate(link=link, form_slots=form_slots, malt=malt,
                         plans=(plan_a, plan_b), attrs=attrs)


def all_candidates(s: Scenario) -> list[LinkCandidate]:
    """Every adjacent interface pair, in ascending link order."""
    prep = prepare(s)
    n_count = s.iface_count
    out = []
    for d, d2 in prep.neighbor_pairs:
        for n in range(n_count):
            for n2 in range(n_count):
                out.append(compute_malt((d, n, d2, n2), s))
    return out


def possible_links(s: Scenario) -> list[LinkCandidate]:
    """Candidates that can be held for at least one slot (MALT > 0)."""
    return [c for c in all_candidates(s) if c.malt > 0]
