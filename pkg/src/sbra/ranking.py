"""Weighted scoring and deterministic ordering of candidate links.

Each candidate carries seven raw attributes:

1. formation slots
2. maximum active link time
3. count of endpoints unused in the initial state (0, 1 or 2)
4. membership in the initial link set (0/1)
5. membership in the final link set (0/1)
6. demand tied to the endpoints' initial links (sum over both endpoints of the
   demand at both nodes of each endpoint's initial link)
7. the same for their final links

Every attribute is min-max normalized over the candidate pool (an attribute
that is constant across the pool normalizes to 0), multiplied by its weight,
and summed; higher scores are better for every attribute. Ordering is by
descending score with ties broken by ascending link id, which makes the
ranking fully deterministic.
"""

from __future__ import annotations

from .preprocess import LinkCandidate

ATTRIBUTE_COUNT = 7


def check_weights(weights) -> tuple[float, ...]:
    w = tuple(float(x) for x in weights)
    if len(w) != ATTRIBUTE_COUNT:
        raise ValueError(f"expected {ATTRIBUTE_COUNT} weights, got {len(w)}")
    if any(x < 0 for x in w):
        raise ValueError("weights must be non-negative")
    return w


def normalized_attributes(candidates: list[LinkCandidate]) -> list[tuple[float, ...]]:
    """Min-max normalize each attribute over the pool; constants become 0."""
    if not candidates:
        return []
    lo = list(candidates[0].attrs)
    hi = list(candidates[0].attrs)
    for c in candidates[1:]:
        for i, a in enumerate(c.attrs):
            if a < lo[i]:
                lo[i] = a
            if a > hi[i]:
                hi[i] = a
    spans = [h - l for l, h in zip(lo, hi)]
    rows = []
    for c in candidates:
        rows.append(tuple(
            0.0 if spans[i] == 0 else (c.attrs[i] - lo[i]) / spans[i]
            for i in range(ATTRIBUTE_COUNT)))
    return rows


def score(candidates: list[LinkCandidate], weights) -> list[float]:
    """Weighted sum of normalized attributes, in candidate order.

    Summation is plain left-to-right so results are bit-reproducible.
    """
    w = check_weights(weights)
    scores = []
    for row in normalized_attributes(candidates):
        total = 0.0
        for wi, ni in zip(w, row):
            total += wi * ni
        scores.append(total)
    return scores


def rank(candidates: list[LinkCandidate], weights) -> list[tuple[float, LinkCandidate]]:
    """Candidates sorted by descending score, ties by ascending link id."""
    scored = list(zip(score(candidates, weights), candidates))
    scored.sort(key=lambda sc: (-sc[0], sc[1].link))
    return scored
