"""RZ, RNZ and a deterministic baseline, driven by an event simulator.

A plan is a short list of turning points: the chosen side's furthest
pending request, then the opposite side's furthest pending request, then
the origin. Everything pending lies inside the span those turning points
cover, so following the plan serves every known request in passing.
"""
from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .model import (
    Instance,
    Request,
    SalesmanKnowledge,
    Segment,
    Trajectory,
    extremes,
)
from .offline import Mode, opt_value
from .scalar import ZERO, Scalar, fmt, parse, sqrt

HALF = Fraction(1, 2)
ALPHA_FAIR = (9 + sqrt(177)) / 16
ALPHA_GENERAL = Fraction(3, 2)
ALPHA_THM3 = (1 + sqrt(17)) / 4


class Kind(str, enum.Enum):
    FOLLOW = "follow"
    RIGHT = "right"
    LEFT = "left"
    COIN = "coin"
    WAIT = "wait"


@dataclass(frozen=True)
class EventView:
    t: Scalar
    new_points: tuple[Scalar, ...]
    p_x: Scalar | None
    p_y: Scalar | None
    knowledge: SalesmanKnowledge
    # pending extremes once P_t is added and anything at s(t) is served
    right_after: Scalar | None = None
    left_after: Scalar | None = None


@dataclass(frozen=True)
class Decision:
    kind: Kind
    plan: tuple[Scalar, ...] = ()
    alt_plan: tuple[Scalar, ...] = ()  # the left-first plan of a coin flip
    weight_right: Fraction = HALF
    wait_at_first: bool = False
    duration: Scalar | None = None
    raw_wait: Scalar | None = None

    def resolve(self, go_right: bool) -> "Decision":
        if self.kind is not Kind.COIN:
            return self
        kind, plan = (Kind.RIGHT, self.plan) if go_right else (Kind.LEFT, self.alt_plan)
        return Decision(kind, plan, wait_at_first=self.wait_at_first)


def sweep_plan(s: Scalar, right: Scalar | None, left: Scalar | None, right_first: bool) -> tuple[Scalar, ...]:
    """Turning points for serving both pending extremes (either may be absent) and going home."""
    ends = [right, None if left is None else -left]
    if not right_first:
        ends.reverse()
    ends = [e for e in ends if e is not None]
    if len(ends) == 2:
        first, second = ends
        if min(s, first) <= second <= max(s, first):
            ends = [first]
    return tuple(ends) + (ZERO,)


def triggered(ev: EventView) -> bool:
    k = ev.knowledge
    x_prev = k.furthest_unserved_right or ZERO
    y_prev = k.furthest_unserved_left or ZERO
    s = k.position
    right = ev.p_x is not None and ev.p_x > x_prev and ev.p_x > s
    left = ev.p_y is not None and ev.p_y > y_prev and -ev.p_y < s
    return right or left


def rz_step(ev: EventView) -> Decision:
    if not triggered(ev):
        return Decision(Kind.FOLLOW)
    s, r, l = ev.knowledge.position, ev.right_after, ev.left_after
    if r is None:
        return Decision(Kind.LEFT, sweep_plan(s, r, l, False))
    if l is None:
        return Decision(Kind.RIGHT, sweep_plan(s, r, l, True))
    return Decision(Kind.COIN, sweep_plan(s, r, l, True), sweep_plan(s, r, l, False))


def det_baseline_step(ev: EventView) -> Decision:
    return rz_step(ev).resolve(True)


def rnz_step(ev: EventView, alpha: Scalar, mode: Mode) -> Decision:
    """RZ's directional rule, with a wait scheduled at the first turning point."""
    d = rz_step(ev)
    if d.kind is Kind.FOLLOW:
        return d
    return Decision(d.kind, d.plan, d.alt_plan, d.weight_right, wait_at_first=True)


def rnz_wait(alpha: Scalar, prefix_opt: Scalar, remaining: Scalar, t: Scalar) -> Decision:
    """Wait ``alpha*OPT - C - t`` clamped at zero; the raw value is kept for diagnostics."""
    w = alpha * prefix_opt - remaining - t
    return Decision(Kind.WAIT, duration=w if w > 0 else ZERO, raw_wait=w)


@dataclass(frozen=True)
class RunConfig:
    algorithm: str = "rz"  # rz | rnz | det
    mode: Mode = Mode.FAIR
    alpha: Scalar | None = None
    # "first": wait at the first turning point of a fresh plan; "last": at the
    # final turning point before the origin (alternative reading, for comparison)
    wait_site: str = "first"

    def __post_init__(self):
        if self.algorithm not in ("rz", "rnz", "det"):
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        if self.wait_site not in ("first", "last"):
            raise ValueError(f"unknown wait site {self.wait_site!r}")
        object.__setattr__(self, "mode", Mode(self.mode))
        if self.alpha is not None:
            object.__setattr__(self, "alpha", parse(self.alpha))

    @property
    def wait_factor(self) -> Scalar:
        if self.alpha is not None:
            return self.alpha
        return ALPHA_FAIR if self.mode is Mode.FAIR else ALPHA_GENERAL

    def describe(self) -> str:
        if self.algorithm == "rnz":
            site = "" if self.wait_site == "first" else ",site=last"
            return f"rnz(alpha={fmt(self.wait_factor)}{site})"
        return self.algorithm


class CoinsExhausted(RuntimeError):
    def __init__(self, event_index: int, used: int):
        super().__init__(f"coin source exhausted at event {event_index} after {used} flips")
        self.event_index = event_index
        self.used = used


class PathCoins:
    """Replays a fixed sequence of flips; ``True``/``'R'``/``1`` mean go right."""

    def __init__(self, bits: Sequence = ()):
        self.bits = [b in (True, 1, "R", "r") for b in bits]
        self.used: list[bool] = []

    def __call__(self, event_index: int) -> bool:
        if len(self.used) >= len(self.bits):
            raise CoinsExhausted(event_index, len(self.used))
        b = self.bits[len(self.used)]
        self.used.append(b)
        return b


class RandomCoins:
    def __init__(self, seed=None, rng: random.Random | None = None):
        self.rng = rng or random.Random(seed)
        self.used: list[bool] = []

    def __call__(self, event_index: int) -> bool:
        b = self.rng.random() < 0.5
        self.used.append(b)
        return b


@dataclass
class SimulationResult:
    trajectory: Trajectory
    coins: tuple[bool, ...]
    wait_ledger: list[tuple[Scalar, Scalar, Scalar]] = field(default_factory=list)
    decisions: list[tuple[Scalar, str]] = field(default_factory=list)
    served: dict[int, Scalar] = field(default_factory=dict)

    @property
    def completion_time(self) -> Scalar:
        return self.trajectory.completion_time

    @property
    def clamp_events(self) -> list[tuple[Scalar, Scalar, Scalar]]:
        return [w for w in self.wait_ledger if w[1] < 0]


class _Salesman:
    def __init__(self, inst: Instance, cfg: RunConfig):
        self.inst = inst
        self.cfg = cfg
        self.t: Scalar = ZERO
        self.s: Scalar = ZERO
        self.segments: list[Segment] = []
        self.plan: list[Scalar] = []
        self.wait_pending = False
        self.wait_until: Scalar | None = None
        self.pending: dict[int, Request] = {}
        self.served: dict[int, Scalar] = {}
        self.processed: list[Request] = []
        self.ledger: list[tuple[Scalar, Scalar, Scalar]] = []

    def _push(self, t1: Scalar, p1: Scalar) -> None:
        if t1 == self.t and p1 == self.s:
            return
        lo, hi = min(self.s, p1), max(self.s, p1)
        for rid, r in list(self.pending.items()):
            if lo <= r.position <= hi:
                self.served[rid] = self.t + abs(r.position - self.s)
                del self.pending[rid]
        self.segments.append(Segment(self.t, t1, self.s, p1))
        self.t, self.s = t1, p1

    def _arrive(self) -> None:
        if not self.wait_pending or not self.plan:
            return
        if self.cfg.wait_site == "last" and len(self.plan) > 1:
            return
        self.wait_pending = False
        remaining, p = ZERO, self.s
        for q in self.plan:
            remaining += abs(q - p)
            p = q
        prefix = Instance(tuple(self.processed))
        d = rnz_wait(self.cfg.wait_factor, opt_value(prefix, self.cfg.mode), remaining, self.t)
        self.ledger.append((self.t, d.raw_wait, d.duration))
        if d.duration > 0:
            self.wait_until = self.t + d.duration

    def advance(self, until: Scalar | None) -> None:
        while True:
            if self.wait_until is not None:
                end = self.wait_until if until is None else min(self.wait_until, until)
                self._push(end, self.s)
                if self.t == self.wait_until:
                    self.wait_until = None
                if until is not None and self.t == until:
                    return
                continue
            if not self.plan:
                if until is not None and until > self.t:
                    self._push(until, self.s)
                return
            target = self.plan[0]
            arrive = self.t + abs(target - self.s)
            if until is not None and arrive > until:
                step = until - self.t
                self._push(until, self.s + (step if target > self.s else -step))
                return
            self._push(arrive, target)
            self.plan.pop(0)
            self._arrive()
            if until is not None and self.t == until:
                return

    def release(self, reqs: Sequence[Request]) -> EventView:
        k_right, k_left = extremes(self.pending.values())
        seen_r, seen_l = extremes(self.processed)
        know = SalesmanKnowledge(
            self.t,
            self.s,
            k_right,
            k_left,
            seen_r or ZERO,
            seen_l or ZERO,
            frozenset(self.pending),
        )
        self.processed.extend(reqs)
        for r in reqs:
            if r.position == self.s:
                self.served[r.id] = self.t
            else:
                self.pending[r.id] = r
        px, py = _event_extremes(reqs)
        r_after, l_after = extremes(self.pending.values())
        return EventView(self.t, tuple(r.position for r in reqs), px, py, know, r_after, l_after)


def _event_extremes(reqs: Sequence[Request]) -> tuple[Scalar | None, Scalar | None]:
    px = max((r.position for r in reqs if r.position > 0), default=None)
    neg = [-r.position for r in reqs if r.position <= 0]
    return px, (max(neg) if neg else None)


def simulate(inst: Instance, cfg: RunConfig, coins: Callable[[int], bool] | None = None) -> SimulationResult:
    """Run one realisation of ``cfg.algorithm`` on ``inst``.

    ``coins(event_index)`` returns True for "go right"; it is only consulted
    at a coin flip. Arrivals that coincide with a release are handled before
    the release.
    """
    if coins is None:
        coins = PathCoins(())
    sm = _Salesman(inst, cfg)
    decisions = []
    used: list[bool] = []
    for i, (t, reqs) in enumerate(inst.events()):
        sm.advance(t)
        ev = sm.release(reqs)
        if cfg.algorithm == "rnz":
            d = rnz_step(ev, cfg.wait_factor, cfg.mode)
        elif cfg.algorithm == "det":
            d = det_baseline_step(ev)
        else:
            d = rz_step(ev)
        if d.kind is Kind.COIN:
            b = coins(i)
            used.append(b)
            d = d.resolve(b)
        decisions.append((t, d.kind.value))
        if d.kind is not Kind.FOLLOW:
            sm.plan = list(d.plan)
            sm.wait_pending = d.wait_at_first
            sm.wait_until = None
    sm.advance(None)
    traj = Trajectory(tuple(sm.segments))
    traj.validate()
    if sm.pending:
        raise RuntimeError(f"simulation ended with {len(sm.pending)} pending requests")
    return SimulationResult(traj, tuple(used), sm.ledger, decisions, sm.served)
