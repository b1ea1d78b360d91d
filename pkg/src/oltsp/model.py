"""Requests, instances, trajectories and the fair-region timeline."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import groupby
from typing import Iterable, Sequence

from .scalar import ZERO, Scalar, fmt, parse


@dataclass(frozen=True)
class Request:
    release: Scalar
    position: Scalar
    id: int = 0

    def __post_init__(self):
        if self.release < 0:
            raise ValueError(f"release time must be >= 0, got {fmt(self.release)}")


@dataclass(frozen=True)
class Instance:
    """A time-sorted multiset of requests; same-instant requests form one event."""

    requests: tuple[Request, ...] = ()
    label: str = ""

    def __post_init__(self):
        times = [r.release for r in self.requests]
        if any(a > b for a, b in zip(times, times[1:])):
            raise ValueError("requests must be sorted by release time")

    @classmethod
    def from_events(cls, events: Iterable[tuple[object, Iterable[object]]], label: str = "") -> "Instance":
        pairs = []
        for t, pts in events:
            t = parse(t)
            pairs.extend((t, parse(p)) for p in pts)
        pairs.sort(key=lambda tp: tp[0])
        reqs = tuple(Request(t, p, i) for i, (t, p) in enumerate(pairs))
        return cls(reqs, label)

    def __len__(self):
        return len(self.requests)

    def events(self) -> list[tuple[Scalar, tuple[Request, ...]]]:
        return [(t, tuple(g)) for t, g in groupby(self.requests, key=lambda r: r.release)]

    def event_times(self) -> list[Scalar]:
        return [t for t, _ in self.events()]

    def prefix(self, t: Scalar) -> "Instance":
        """Requests released at or before ``t``."""
        return Instance(tuple(r for r in self.requests if r.release <= t), self.label)

    def first_events(self, k: int) -> "Instance":
        keep = {r.id for _, grp in self.events()[:k] for r in grp}
        return Instance(tuple(r for r in self.requests if r.id in keep), self.label)

    def with_event(self, t: Scalar, points: Sequence[Scalar], label: str | None = None) -> "Instance":
        if self.requests and t < self.requests[-1].release:
            raise ValueError("appended event must not precede existing releases")
        nxt = max((r.id for r in self.requests), default=-1) + 1
        extra = tuple(Request(parse(t), parse(p), nxt + i) for i, p in enumerate(points))
        return Instance(self.requests + extra, self.label if label is None else label)

    def mirrored(self) -> "Instance":
        return Instance(tuple(Request(r.release, -r.position, r.id) for r in self.requests), self.label)

    def key(self) -> tuple:
        return tuple((r.release, r.position) for r in self.requests)

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "events": [{"t": fmt(t), "points": [fmt(r.position) for r in grp]} for t, grp in self.events()],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Instance":
        return cls.from_events(((e["t"], e["points"]) for e in d.get("events", [])), d.get("label", ""))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "Instance":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class Segment:
    t0: Scalar
    t1: Scalar
    p0: Scalar
    p1: Scalar

    @property
    def direction(self) -> int:
        return (self.p1 > self.p0) - (self.p1 < self.p0)

    @property
    def is_wait(self) -> bool:
        return self.p0 == self.p1

    def at(self, t: Scalar) -> Scalar:
        if self.is_wait:
            return self.p0
        return self.p0 + self.direction * (t - self.t0)


@dataclass(frozen=True)
class Trajectory:
    segments: tuple[Segment, ...] = ()

    @property
    def completion_time(self) -> Scalar:
        return self.segments[-1].t1 if self.segments else ZERO

    @property
    def final_position(self) -> Scalar:
        return self.segments[-1].p1 if self.segments else ZERO

    def validate(self) -> None:
        """Raise ``ValueError`` unless the trajectory is contiguous, unit-speed and ends at 0."""
        prev_t, prev_p = ZERO, ZERO
        for k, s in enumerate(self.segments):
            if s.t0 != prev_t or s.p0 != prev_p:
                raise ValueError(f"segment {k} is not contiguous with its predecessor")
            if s.t1 < s.t0:
                raise ValueError(f"segment {k} runs backwards in time")
            if not s.is_wait and abs(s.p1 - s.p0) != s.t1 - s.t0:
                raise ValueError(f"segment {k} is not a unit-speed move or a wait")
            prev_t, prev_p = s.t1, s.p1
        if prev_p != 0:
            raise ValueError(f"trajectory ends at {fmt(prev_p)}, not at the origin")

    def mirrored(self) -> "Trajectory":
        return Trajectory(tuple(Segment(s.t0, s.t1, -s.p0, -s.p1) for s in self.segments))

    def to_list(self) -> list[list[str]]:
        return [[fmt(s.t0), fmt(s.t1), fmt(s.p0), fmt(s.p1)] for s in self.segments]


def trajectory_from_waypoints(points: Sequence[tuple[Scalar, Scalar]]) -> Trajectory:
    """Build from ``(time, position)`` waypoints starting at ``(0, 0)``; zero-length steps are dropped."""
    segs = []
    (t, p) = (ZERO, ZERO)
    for t1, p1 in points:
        if t1 == t and p1 == p:
            continue
        segs.append(Segment(t, t1, p, p1))
        t, p = t1, p1
    return Trajectory(tuple(segs))


def eval_trajectory(traj: Trajectory, t: Scalar) -> Scalar:
    if t < 0 or t > traj.completion_time:
        raise ValueError(f"time {fmt(t)} outside [0, {fmt(traj.completion_time)}]")
    for s in traj.segments:
        if s.t0 <= t <= s.t1:
            return s.at(t)
    return ZERO


def _segment_hit(seg: Segment, req: Request) -> Scalar | None:
    """Earliest time in ``seg`` at which ``req`` is served, if any."""
    if seg.t1 < req.release:
        return None
    if seg.is_wait:
        return max(seg.t0, req.release) if seg.p0 == req.position else None
    lo, hi = min(seg.p0, seg.p1), max(seg.p0, seg.p1)
    if not lo <= req.position <= hi:
        return None
    t = seg.t0 + abs(req.position - seg.p0)
    return t if t >= req.release else None


def served_times(traj: Trajectory, inst: Instance) -> dict[int, Scalar]:
    out: dict[int, Scalar] = {}
    for req in inst.requests:
        if req.release == 0 and req.position == 0:
            out[req.id] = ZERO
            continue
        for seg in traj.segments:
            hit = _segment_hit(seg, req)
            if hit is not None:
                out[req.id] = hit
                break
    return out


def serves(traj: Trajectory, inst: Instance) -> bool:
    st = served_times(traj, inst)
    return len(st) == len(inst) and all(v <= traj.completion_time for v in st.values())


@dataclass
class ZealousReport:
    ok: bool
    violations: list[str] = field(default_factory=list)

    def __bool__(self):
        return self.ok


def is_zealous(traj: Trajectory, inst: Instance) -> ZealousReport:
    """Audit a trajectory against the zealousness rules.

    Waiting while requests are pending, waiting away from the origin,
    moving toward neither a pending request nor the origin, and turning
    anywhere other than a release, the origin, or a just-served request
    are all reported.
    """
    st = served_times(traj, inst)
    releases = {r.release for r in inst.requests}
    bad: list[str] = []

    def pending(at: Scalar) -> list[Request]:
        return [r for r in inst.requests if r.release <= at and st.get(r.id, at + 1) > at]

    for k, seg in enumerate(traj.segments):
        if seg.t1 == seg.t0:
            continue
        if seg.is_wait:
            busy = [r for r in inst.requests if max(r.release, seg.t0) < min(st.get(r.id, seg.t1), seg.t1)]
            if busy:
                bad.append(f"wait at {fmt(seg.p0)} during [{fmt(seg.t0)}, {fmt(seg.t1)}] with pending requests")
            elif seg.p0 != 0:
                bad.append(f"wait at {fmt(seg.p0)} during [{fmt(seg.t0)}, {fmt(seg.t1)}] away from the origin")
            continue
        todo = pending(seg.t0)
        if todo:
            d = seg.direction
            ahead = [r for r in todo if d * (r.position - seg.p1) >= 0]
            if not ahead and d * (0 - seg.p1) < 0:
                bad.append(f"segment {k} moves toward neither a pending request nor the origin")

    for k in range(1, len(traj.segments)):
        a, b = traj.segments[k - 1], traj.segments[k]
        if a.direction == b.direction:
            continue
        t, p = b.t0, b.p0
        if not pending(t):
            continue
        just_served = any(st.get(r.id) == t and r.position == p for r in inst.requests)
        if t in releases or p == 0 or just_served:
            continue
        bad.append(f"direction change at t={fmt(t)}, s={fmt(p)} without a release, origin or service")
    return ZealousReport(not bad, bad)


@dataclass(frozen=True)
class HullTimeline:
    """Fair region over time.

    ``breakpoints[i] = (tau, left, right)`` means the region is ``[left, right]``
    for every time strictly after ``tau``; before the first release it is ``{0}``.
    """

    breakpoints: tuple[tuple[Scalar, Scalar, Scalar], ...] = ()

    @classmethod
    def from_instance(cls, inst: Instance) -> "HullTimeline":
        lo = hi = ZERO
        bps = []
        for t, grp in inst.events():
            lo = min([lo] + [r.position for r in grp])
            hi = max([hi] + [r.position for r in grp])
            if bps and bps[-1][1] == lo and bps[-1][2] == hi:
                continue
            bps.append((t, lo, hi))
        return cls(tuple(bps))

    def at(self, t: Scalar) -> tuple[Scalar, Scalar]:
        left = right = ZERO
        for tau, lo, hi in self.breakpoints:
            if tau < t:
                left, right = lo, hi
            else:
                break
        return left, right

    def after(self, t: Scalar) -> tuple[tuple[Scalar, Scalar], Scalar | None]:
        """Region valid just after ``t`` and the next time it grows (``None`` if never)."""
        region = (ZERO, ZERO)
        nxt = None
        for tau, lo, hi in self.breakpoints:
            if tau <= t:
                region = (lo, hi)
            else:
                nxt = tau
                break
        return region, nxt


def hull_at(hull: HullTimeline, t: Scalar) -> tuple[Scalar, Scalar]:
    if t < 0:
        raise ValueError("time must be non-negative")
    return hull.at(t)


@dataclass(frozen=True)
class SalesmanKnowledge:
    time: Scalar
    position: Scalar
    furthest_unserved_right: Scalar | None
    furthest_unserved_left: Scalar | None
    furthest_seen_right: Scalar
    furthest_seen_left: Scalar
    unserved: frozenset = frozenset()


def extremes(reqs: Iterable[Request]) -> tuple[Scalar | None, Scalar | None]:
    """Furthest positive position and largest magnitude negative position (``None`` if absent)."""
    right = left = None
    for r in reqs:
        if r.position > 0 and (right is None or r.position > right):
            right = r.position
        elif r.position < 0 and (left is None or -r.position > left):
            left = -r.position
    return right, left


__all__ = [
    "Request",
    "Instance",
    "Segment",
    "Trajectory",
    "HullTimeline",
    "SalesmanKnowledge",
    "ZealousReport",
    "eval_trajectory",
    "served_times",
    "serves",
    "is_zealous",
    "hull_at",
    "extremes",
    "trajectory_from_waypoints",
]
