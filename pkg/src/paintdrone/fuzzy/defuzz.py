"""Exact centroid of a max-aggregated set of clipped membership functions.

The aggregated set is piecewise linear, so the centroid integrals are computed
in closed form between consecutive kinks rather than sampled. The positive and
negative half-lines are integrated separately (the negative half via the
reflected sets) so that a set symmetric about 0 yields a numerator of exactly
0.0 and mirror-image sets yield exactly negated centroids.
"""
from __future__ import annotations

from typing import Sequence

from .membership import MembershipFunction

Clipped = tuple[MembershipFunction, float]


def aggregate_limit(x: float, clipped: Sequence[Clipped], side: int) -> float:
    best = 0.0
    for mf, level in clipped:
        g = min(mf.limit(x, side), level)
        if g > best:
            best = g
    return best


def _kinks(clipped: Sequence[Clipped], lo: float, hi: float) -> list[float]:
    levels = {level for _, level in clipped}
    lines = []
    pts = {lo, hi}
    for mf, _ in clipped:
        pts.update(mf.vertices())
        lines.extend(mf.edges())
    for x0, m in lines:
        for level in levels:
            pts.add(x0 + level / m)
    for i, (x1, m1) in enumerate(lines):
        for x2, m2 in lines[i + 1:]:
            if m1 != m2:
                pts.add((m1 * x1 - m2 * x2) / (m1 - m2))
    return sorted(p for p in pts if lo <= p <= hi)


def _half_moments(clipped: Sequence[Clipped], lo: float, hi: float) -> tuple[float, float]:
    """(integral of mu, integral of x*mu) over [lo, hi]."""
    if hi <= lo:
        return 0.0, 0.0
    xs = _kinks(clipped, lo, hi)
    area = 0.0
    moment = 0.0
    # One-sided limits at both ends keep jumps (vertical edges) exact.
    for x0, x1 in zip(xs, xs[1:]):
        f0 = aggregate_limit(x0, clipped, +1)
        f1 = aggregate_limit(x1, clipped, -1)
        h = x1 - x0
        area += h * (f0 + f1) / 2.0
        moment += h * (2.0 * x0 * f0 + x0 * f1 + x1 * f0 + 2.0 * x1 * f1) / 6.0
    return area, moment


def centroid_moments(clipped: Sequence[Clipped], universe: tuple[float, float]) -> tuple[float, float]:
    """Return (area, first moment) of the aggregated set over the universe."""
    lo, hi = universe
    pos_area, pos_moment = _half_moments(clipped, max(lo, 0.0), hi)
    mirror = [(mf.mirrored(), level) for mf, level in clipped]
    neg_area, neg_moment = _half_moments(mirror, max(-hi, 0.0), -lo)
    return pos_area + neg_area, pos_moment - neg_moment


def centroid(clipped: Sequence[Clipped], universe: tuple[float, float]) -> float:
    area, moment = centroid_moments(clipped, universe)
    if area <= 0.0:
        raise ZeroDivisionError("aggregated fuzzy set is empty")
    return moment / area
