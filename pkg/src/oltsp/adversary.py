"""Lower-bound instance families, adaptive adversaries and random corpora."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .evaluate import BranchOutcome, RatioReport, enumerate_branches, exact_expectation, ratio_of
from .model import Instance
from .offline import Mode, opt_value
from .online import RunConfig
from .scalar import ZERO, Scalar, fmt, parse

Runner = Callable[..., list[BranchOutcome]]


@dataclass(frozen=True)
class GeneratorParams:
    family: str = "random"
    x: Scalar = Fraction(1)
    y: Scalar = Fraction(1, 10**6)
    n: int = 4
    seed: int = 0
    pos_range: Scalar = Fraction(4)
    horizon: Scalar = Fraction(8)
    grid: Scalar = Fraction(1, 4)
    max_points: int = 2


@dataclass
class AdaptiveTranscript:
    injected: list[tuple[Scalar, tuple[Scalar, ...], str]] = field(default_factory=list)
    observed: list[Scalar] = field(default_factory=list)
    trigger: Scalar | None = None
    notes: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "injected": [{"t": fmt(t), "points": [fmt(p) for p in pts], "reason": why} for t, pts, why in self.injected],
            "observed": [fmt(v) for v in self.observed],
            "trigger": None if self.trigger is None else fmt(self.trigger),
            "notes": self.notes,
        }


def _check_xy(x, y):
    x, y = parse(x), parse(y)
    if not x > 0:
        raise ValueError("x must be positive")
    if not 0 < y < x:
        raise ValueError("need 0 < y < x")
    return x, y


def gen_thm1(x=1, y=Fraction(1, 10**6)) -> Instance:
    x, y = _check_xy(x, y)
    return Instance.from_events([(0, [x, -y]), (2 * x, [x])], label=f"thm1(x={fmt(x)},y={fmt(y)})")


def gen_thm2(x=1, y=Fraction(1, 10**6), n: int = 3, pair_at_2x: bool = True) -> Instance:
    """Geometric family: pairs at ``2*3^k*x`` for ``k <= n-3`` then a lone far-right request.

    With ``pair_at_2x=False`` the time-``2x`` event carries only ``2x``.
    """
    x, y = _check_xy(x, y)
    if n < 3:
        raise ValueError("n must be >= 3")
    events = [(ZERO, [x, -y])]
    for k in range(n - 2):
        t = 2 * 3**k * x
        events.append((t, [t] if (k == 0 and not pair_at_2x) else [t, -y]))
    last = 2 * 3 ** (n - 2) * x
    events.append((last, [last]))
    tag = "" if pair_at_2x else ",single2x"
    return Instance.from_events(events, label=f"thm2(x={fmt(x)},y={fmt(y)},n={n}{tag})")


def thm2_best_response(x, y, n: int) -> Scalar:
    x, y = parse(x), parse(y)
    return 6 * 3 ** (n - 2) * x - 2 * (n - 1) * y


def thm2_opt_bound(x, y, n: int) -> Scalar:
    x, y = parse(x), parse(y)
    return 4 * 3 ** (n - 2) * x + 2 * y


def branch_runner(cfg: RunConfig, max_flips: int = 20) -> Runner:
    def run(inst: Instance, prefix=()) -> list[BranchOutcome]:
        return enumerate_branches(inst, cfg, max_flips, prefix)

    run.cfg = cfg
    return run


@dataclass
class AdaptiveResult:
    instance: Instance
    transcript: AdaptiveTranscript
    ratio: Scalar
    expected: Scalar
    opt: Scalar
    mode: Mode
    per_branch: list[tuple[str, Instance, RatioReport]] = field(default_factory=list)


def _finish(runner: Runner, inst: Instance, mode: Mode) -> tuple[Scalar, list[BranchOutcome]]:
    branches = runner(inst)
    e = sum((b.probability * b.completion_time for b in branches), ZERO)
    return e, branches


def _adaptive(runner, prefix: Instance, points_for, mode: Mode, reason: str, per_branch: bool) -> AdaptiveResult:
    try:
        seen = runner(prefix)
    except Exception as exc:
        raise RuntimeError(f"algorithm failed to finish the prefix {prefix.label!r}: {exc}") from exc
    tr = AdaptiveTranscript(observed=[b.completion_time for b in seen])
    if not per_branch:
        T = min(b.completion_time for b in seen)
        tr.trigger = T
        pts = points_for(T)
        inst = prefix.with_event(T, pts, label=f"{prefix.label}+({fmt(T)},{{{','.join(fmt(p) for p in pts)}}})")
        tr.injected.append((T, tuple(pts), reason))
        e, _ = _finish(runner, inst, mode)
        o = opt_value(inst, mode)
        return AdaptiveResult(inst, tr, ratio_of(e, o), e, o, mode)
    # one injection per branch, each at that branch's own return time
    total_ratio, total_e = ZERO, ZERO
    rows = []
    for b in seen:
        T = b.completion_time
        pts = points_for(T)
        inst = prefix.with_event(T, pts, label=f"{prefix.label}+branch {b.coin_path or '-'}")
        tr.injected.append((T, tuple(pts), f"{reason} [branch {b.coin_path or '-'}]"))
        sub = runner(inst, prefix=b.coin_path)
        e = sum((s.probability * s.completion_time for s in sub), ZERO)
        o = opt_value(inst, mode)
        total_ratio += b.probability * ratio_of(e, o)
        total_e += b.probability * e
        rows.append((b.coin_path, inst, RatioReport(inst.label, "", mode, e, o, ratio_of(e, o), sub)))
    tr.trigger = min(tr.observed)
    last = rows[-1][1]
    return AdaptiveResult(last, tr, total_ratio, total_e, opt_value(last, mode), mode, rows)


def adaptive_thm3(runner: Runner, x=1, y=Fraction(1, 10**6), alpha_probe=None, per_branch: bool = False) -> AdaptiveResult:
    """Release ``(0,{x,-y})``, wait for the earliest return ``T``, then release ``(T,{x})``; fair mode."""
    x, y = _check_xy(x, y)
    sigma0 = Instance.from_events([(0, [x, -y])], label=f"thm3(x={fmt(x)},y={fmt(y)})")
    res = _adaptive(runner, sigma0, lambda T: [x], Mode.FAIR, "earliest return after sigma0", per_branch)
    if alpha_probe is not None:
        a = parse(alpha_probe)
        res.transcript.notes["T<=alpha*OPT(sigma0)"] = bool(res.transcript.trigger <= a * (2 * x + 2 * y))
    res.transcript.notes["closed_form_ratio"] = fmt(
        (res.transcript.trigger + 2 * x) / (res.transcript.trigger + x)
    )
    return res


def adaptive_thm4(runner: Runner, prefix: Instance | None = None, per_branch: bool = False) -> AdaptiveResult:
    """After the earliest return ``T`` from ``prefix``, release ``(T,{T})``; general mode."""
    if prefix is None:
        prefix = Instance.from_events([(0, [1])], label="thm4(seed=(0,{1}))")
    return _adaptive(runner, prefix, lambda T: [T], Mode.GENERAL, "earliest return after prefix", per_branch)


def gen_random(params: GeneratorParams) -> Instance:
    """Seeded instance on a grid: ``n`` release times in ``[0, horizon]``, 1..max_points points each."""
    h, rng_pos, hor = parse(params.grid), parse(params.pos_range), parse(params.horizon)
    if params.n < 1:
        raise ValueError("n must be >= 1")
    if not (h > 0 and rng_pos > 0 and hor >= 0) or params.max_points < 1:
        raise ValueError("ranges must be positive")
    rng = random.Random(params.seed)
    pmax = int(rng_pos / h)
    tmax = int(hor / h)
    if pmax < 1:
        raise ValueError("position range is smaller than the grid")
    times = sorted(rng.randint(0, tmax) for _ in range(params.n))
    events = []
    for t in times:
        k = rng.randint(1, params.max_points)
        pts = [rng.randint(-pmax, pmax) * h for _ in range(k)]
        events.append((t * h, pts))
    return Instance.from_events(events, label=f"random(seed={params.seed},n={params.n})")


def generate(params: GeneratorParams) -> Instance:
    fam = params.family.lower()
    if fam == "thm1":
        return gen_thm1(params.x, params.y)
    if fam == "thm2":
        return gen_thm2(params.x, params.y, params.n)
    if fam == "random":
        return gen_random(params)
    raise ValueError(f"family {params.family!r} needs an algorithm; use adaptive_thm3/adaptive_thm4")
