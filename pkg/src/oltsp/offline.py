"""Offline optima for the general and the fair adversary.

Both exact solvers minimise over service orders with a subset dynamic
programme: for a fixed set of served points and a fixed last point, the
earliest arrival time dominates every later one (the salesman can always
wait in place, and the fair region only grows). For the general adversary
the leg to the next point costs ``max(t + dist, release)``; for the fair
adversary the salesman presses against the boundary of the fair region
and advances the instant it grows.

``opt_discretized`` is an independent grid search used to cross-check both.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .model import HullTimeline, Instance, Trajectory, extremes, trajectory_from_waypoints
from .scalar import ZERO, Scalar, fmt, parse

DEFAULT_CAP = 10


class Mode(str, enum.Enum):
    GENERAL = "general"
    FAIR = "fair"


class CapacityError(ValueError):
    pass


class AlignmentError(ValueError):
    pass


@dataclass(frozen=True)
class OptResult:
    value: Scalar
    witness: Trajectory
    mode: Mode

    def to_dict(self) -> dict:
        return {"opt": fmt(self.value), "mode": self.mode.value, "witness": self.witness.to_list()}


def _points(inst: Instance) -> list[tuple[Scalar, Scalar]]:
    """Distinct positions with the latest release at each, as ``(position, release)``."""
    latest: dict = {}
    for r in inst.requests:
        if r.position not in latest or r.release > latest[r.position]:
            latest[r.position] = r.release
    return sorted(latest.items(), key=lambda pr: (pr[1], pr[0]))


def _scale(values) -> int:
    """Common denominator when every value is rational, else 0."""
    den = 1
    for v in values:
        if not isinstance(v, Fraction):
            return 0
        den = den * v.denominator // math.gcd(den, v.denominator)
    return den


def _fair_leg(hull, p, t, q, record=None):
    """Earliest time at ``q`` leaving ``p`` at ``t`` while staying in the fair region."""
    if q == p:
        return t
    d = 1 if q > p else -1
    while True:
        (lo, hi), nxt = hull(t)
        edge = hi if d > 0 else lo
        if d * (q - edge) <= 0:
            t = t + d * (q - p)
            if record is not None:
                record.append((t, q))
            return t
        reach = t + d * (edge - p)
        if nxt is None:
            raise ValueError("target never enters the fair region")
        if reach <= nxt:
            if record is not None:
                record.append((reach, edge))
            p, t = edge, nxt
        else:
            p, t = p + d * (nxt - t), nxt
        if record is not None:
            record.append((t, p))


def _solve(pts, mode: Mode, hull=None):
    """Subset DP over ``pts``; returns ``(value, order)``."""
    n = len(pts)
    if n == 0:
        return ZERO, []
    if mode is Mode.FAIR:
        def leg(p, t, q, r):
            return max(_fair_leg(hull, p, t, q), r)
    else:
        def leg(p, t, q, r):
            a = t + abs(q - p)
            return a if a >= r else r

    best: dict[tuple[int, int], tuple] = {}
    for j, (q, r) in enumerate(pts):
        best[(1 << j, j)] = (leg(0, 0, q, r), None)
    full = (1 << n) - 1
    for mask in range(1, full + 1):
        for j in range(n):
            cur = best.get((mask, j))
            if cur is None:
                continue
            t, p = cur[0], pts[j][0]
            for k in range(n):
                if mask >> k & 1:
                    continue
                q, r = pts[k]
                a = leg(p, t, q, r)
                key = (mask | 1 << k, k)
                old = best.get(key)
                if old is None or a < old[0]:
                    best[key] = (a, j)
    value, last = None, None
    for j in range(n):
        cand = best[(full, j)][0] + abs(pts[j][0])
        if value is None or cand < value:
            value, last = cand, j
    order = []
    mask, j = full, last
    while j is not None:
        order.append(j)
        prev = best[(mask, j)][1]
        mask ^= 1 << j
        j = prev
    order.reverse()
    return value, order


def _witness(pts, order, mode: Mode, hull) -> Trajectory:
    way = []
    t, p = ZERO, ZERO
    for j in order:
        q, r = pts[j]
        if mode is Mode.FAIR:
            rec = []
            a = _fair_leg(hull, p, t, q, rec)
            way.extend(rec)
        else:
            a = t + abs(q - p)
            way.append((a, q))
        if r > a:
            way.append((r, q))
            a = r
        t, p = a, q
    way.append((t + abs(p), ZERO))
    return trajectory_from_waypoints(way)


def _check_cap(inst: Instance, cap: int):
    n = len(_points(inst))
    if n > cap:
        raise CapacityError(f"{n} distinct points exceed the exact-solver cap {cap}; use opt_discretized")


def _optimum(inst: Instance, mode: Mode, cap: int = DEFAULT_CAP) -> OptResult:
    _check_cap(inst, cap)
    pts = _points(inst)
    hull_tl = HullTimeline.from_instance(inst)
    # breakpoint times matter too: deduplication can drop an earlier release that grew the region
    den = _scale([v for pr in pts for v in pr] + [v for bp in hull_tl.breakpoints for v in bp])
    if den:
        ipts = [(int(q * den), int(r * den)) for q, r in pts]
        scaled = HullTimeline(tuple((int(t * den), int(lo * den), int(hi * den)) for t, lo, hi in hull_tl.breakpoints))
        value, order = _solve(ipts, mode, scaled.after)
        value = Fraction(value, den)
    else:
        value, order = _solve(pts, mode, hull_tl.after)
    witness = _witness(pts, order, mode, hull_tl.after)
    return OptResult(value, witness, mode)


def opt_general(inst: Instance, cap: int = DEFAULT_CAP) -> OptResult:
    return _optimum(inst, Mode.GENERAL, cap)


def opt_fair(inst: Instance, cap: int = DEFAULT_CAP) -> OptResult:
    return _optimum(inst, Mode.FAIR, cap)


def opt(inst: Instance, mode: Mode | str, cap: int = DEFAULT_CAP) -> OptResult:
    return _optimum(inst, Mode(mode), cap)


@lru_cache(maxsize=65536)
def _cached_value(key: tuple, mode: Mode) -> Scalar:
    inst = Instance.from_events(((t, [p]) for t, p in key))
    return _optimum(inst, mode, cap=max(DEFAULT_CAP, len(key))).value


def opt_value(inst: Instance, mode: Mode | str) -> Scalar:
    """Memoised optimum value keyed by the request multiset."""
    return _cached_value(inst.key(), Mode(mode))


def opt_discretized(inst: Instance, grid, mode: Mode | str = Mode.GENERAL) -> Scalar:
    """Shortest completion over tick-by-tick moves {left, right, wait} on a grid."""
    mode = Mode(mode)
    h = parse(grid)
    if not isinstance(h, Fraction) or h <= 0:
        raise ValueError("grid must be a positive rational")
    pts = _points(inst)
    if not pts:
        return ZERO
    for q, r in pts:
        for v in (q, r):
            if not isinstance(v, Fraction) or (v / h).denominator != 1:
                raise AlignmentError(f"value {fmt(v)} is not a multiple of the grid {fmt(h)}")
    ipts = [(int(q / h), int(r / h)) for q, r in pts]
    lo = min(0, min(q for q, _ in ipts))
    hi = max(0, max(q for q, _ in ipts))
    width = hi - lo + 1
    everywhere = (1 << width) - 1
    origin = 1 << (0 - lo)
    hull = HullTimeline.from_instance(inst)

    def allowed(tick: int) -> int:
        if mode is Mode.GENERAL:
            return everywhere
        left, right = hull.at(tick * h)
        a, b = int(left / h) - lo, int(right / h) - lo
        return ((1 << (b - a + 1)) - 1) << a

    n = len(ipts)
    full = (1 << n) - 1
    bit = [1 << (q - lo) for q, _ in ipts]

    def serve(reach: list[int], tick: int) -> None:
        for mask in range(full + 1):
            b = reach[mask]
            if not b:
                continue
            for j in range(n):
                if not mask >> j & 1 and ipts[j][1] <= tick and b & bit[j]:
                    reach[mask | 1 << j] |= bit[j]

    reach = [0] * (full + 1)
    reach[0] = origin
    serve(reach, 0)
    horizon = max(r for _, r in ipts) + 3 * width + 1
    tick = 0
    while not reach[full] & origin:
        tick += 1
        if tick > horizon:
            raise RuntimeError("grid search exceeded its horizon")
        ok = allowed(tick)
        reach = [((b | b << 1 | b >> 1) & ok) if b else 0 for b in reach]
        serve(reach, tick)
    return tick * h


def opt_lower_bounds(inst: Instance, t: Scalar, mode: Mode | str) -> Scalar:
    """Proof-level lower bound on the optimum of the prefix released by ``t``."""
    mode = Mode(mode)
    t = parse(t)
    events = dict(inst.events())
    if t not in events:
        raise ValueError(f"{fmt(t)} is not a release time of the instance")
    px, py = extremes(events[t])
    px = px or ZERO
    py = py or ZERO
    seen_r, seen_l = extremes(inst.prefix(t).requests)
    extent = 2 * ((seen_r or ZERO) + (seen_l or ZERO))

    def tour(s):
        return min(abs(s - px) + px + 2 * py, abs(s + py) + py + 2 * px)

    if mode is Mode.FAIR:
        left, right = HullTimeline.from_instance(inst).at(t)
        starts = [min(max(px, left), right), min(max(-py, left), right)]
    else:
        starts = [px, -py]
    return max(t + min(tour(s) for s in starts), extent)
