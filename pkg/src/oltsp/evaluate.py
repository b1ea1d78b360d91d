"""Expected cost by coin-tree enumeration, Monte Carlo, and bound checks."""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .model import Instance, Trajectory, is_zealous
from .offline import Mode, opt_value
from .online import ALPHA_FAIR, ALPHA_GENERAL, CoinsExhausted, PathCoins, RunConfig, simulate
from .scalar import ONE, ZERO, Scalar, fmt

DEFAULT_FLIP_CAP = 20


class ConfigError(ValueError):
    pass


@dataclass
class BranchOutcome:
    coin_path: str
    probability: Fraction
    completion_time: Scalar
    trajectory: Trajectory
    wait_ledger: list = field(default_factory=list)

    @property
    def clamp_events(self):
        return [w for w in self.wait_ledger if w[1] < 0]


@dataclass
class RatioReport:
    instance: str
    alg: str
    mode: Mode
    expected: Scalar | float
    opt: Scalar
    ratio: Scalar | float
    branches: list[BranchOutcome] = field(default_factory=list)
    stderr: float | None = None
    trials: int | None = None
    diagnostics: dict = field(default_factory=dict)

    @property
    def branch_count(self) -> int:
        return len(self.branches)

    @property
    def exact(self) -> bool:
        return self.stderr is None

    def to_dict(self) -> dict:
        out = {
            "instance": self.instance,
            "alg": self.alg,
            "mode": self.mode.value,
            "expected": _text(self.expected),
            "opt": fmt(self.opt),
            "ratio": _text(self.ratio),
            "branches": self.branch_count,
        }
        if not self.exact:
            out["stderr"] = self.stderr
            out["trials"] = self.trials
        if self.diagnostics:
            out["diagnostics"] = self.diagnostics
        return out

    def branch_rows(self) -> list[dict]:
        return [
            {
                "instance": self.instance,
                "alg": self.alg,
                "mode": self.mode.value,
                "coin_path": b.coin_path or "-",
                "probability": fmt(b.probability),
                "completion": fmt(b.completion_time),
                "completion_float": float(b.completion_time),
                "clamps": len(b.clamp_events),
            }
            for b in self.branches
        ]


def _text(v) -> str | float:
    return v if isinstance(v, float) else fmt(v)


def ratio_of(cost, opt) -> Scalar:
    if opt == 0:
        if cost == 0:
            return ONE
        raise ValueError("positive cost against a zero optimum")
    return cost / opt


def _path_str(bits) -> str:
    return "".join("R" if b else "L" for b in bits)


def enumerate_branches(inst: Instance, cfg: RunConfig, max_flips: int = DEFAULT_FLIP_CAP, prefix=()) -> list[BranchOutcome]:
    """Every coin path extending ``prefix``, depth first, right before left."""
    out: list[BranchOutcome] = []
    stack = [tuple(bool(b) if not isinstance(b, str) else b in "Rr" for b in prefix)]
    base = len(stack[0])
    while stack:
        path = stack.pop()
        try:
            res = simulate(inst, cfg, PathCoins(path))
        except CoinsExhausted:
            if len(path) >= max_flips:
                raise ConfigError(f"more than {max_flips} coin flips; use monte_carlo") from None
            stack.append(path + (False,))
            stack.append(path + (True,))
            continue
        p = Fraction(1, 2 ** (len(res.coins) - base))
        out.append(BranchOutcome(_path_str(res.coins), p, res.completion_time, res.trajectory, res.wait_ledger))
    return out


def _expected(branches) -> Scalar:
    return sum((b.probability * b.completion_time for b in branches), ZERO)


def exact_expectation(
    inst: Instance,
    cfg: RunConfig,
    max_flips: int = DEFAULT_FLIP_CAP,
    audit: bool = False,
    prefix=(),
) -> RatioReport:
    branches = enumerate_branches(inst, cfg, max_flips, prefix)
    total = sum((b.probability for b in branches), ZERO)
    if total != 1:
        raise AssertionError(f"branch probabilities sum to {fmt(total)}")
    e = _expected(branches)
    o = opt_value(inst, cfg.mode)
    diag = {"clamp_events": sum(len(b.clamp_events) for b in branches)}
    if audit:
        diag["zealous_violations"] = sum(len(is_zealous(b.trajectory, inst).violations) for b in branches)
    return RatioReport(inst.label, cfg.describe(), cfg.mode, e, o, ratio_of(e, o), branches, diagnostics=diag)


def monte_carlo(inst: Instance, cfg: RunConfig, trials: int, seed=0) -> RatioReport:
    """Seeded i.i.d. runs; simulations are memoised on the realised coin path."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = random.Random(seed)
    leaves: dict[tuple, Scalar] = {}
    inner: set[tuple] = set()
    costs: list[Scalar] = []
    for _ in range(trials):
        path: tuple = ()
        while path in inner:
            path = path + (rng.random() < 0.5,)
        if path in leaves:
            costs.append(leaves[path])
            continue
        replay = list(path)

        def draw(i, replay=replay):
            return replay.pop(0) if replay else rng.random() < 0.5

        res = simulate(inst, cfg, draw)
        full = tuple(res.coins)
        for k in range(len(full)):
            inner.add(full[:k])
        leaves[full] = res.completion_time
        costs.append(res.completion_time)
    if all(isinstance(c, Fraction) for c in costs):
        mean = float(sum(costs, ZERO) / trials)
    else:
        mean = math.fsum(float(c) for c in costs) / trials
    fl = [float(c) for c in costs]
    var = math.fsum((c - mean) ** 2 for c in fl) / (trials - 1) if trials > 1 else 0.0
    stderr = math.sqrt(var / trials)
    o = opt_value(inst, cfg.mode)
    r = mean / float(o) if o != 0 else 1.0
    return RatioReport(inst.label, cfg.describe(), cfg.mode, mean, o, r, stderr=stderr, trials=trials,
                       diagnostics={"distinct_paths": len(leaves)})


THEOREMS = {
    "thm5": ("rz", Mode.FAIR, Fraction(13, 8)),
    "thm6": ("rz", Mode.GENERAL, Fraction(13, 8)),
    "thm7": ("rnz", Mode.FAIR, ALPHA_FAIR),
    "thm8": ("rnz", Mode.GENERAL, ALPHA_GENERAL),
}


@dataclass
class BoundCheck:
    theorem: str
    bound: Scalar
    ratio: Scalar | float
    passed: bool
    margin: Scalar | float

    def to_dict(self) -> dict:
        return {"theorem": self.theorem, "bound": fmt(self.bound), "ratio": _text(self.ratio),
                "pass": self.passed, "margin": _text(self.margin)}


def theorem_for(alg: str, mode: Mode | str) -> str | None:
    mode = Mode(mode)
    for name, (a, m, _) in THEOREMS.items():
        if alg.startswith(a) and m is mode:
            return name
    return None


def bound_check(report: RatioReport, theorem: str) -> BoundCheck:
    key = theorem.lower()
    if key not in THEOREMS:
        raise ConfigError(f"unknown theorem {theorem!r}")
    alg, mode, bound = THEOREMS[key]
    if report.alg.split("(")[0] != alg or report.mode is not mode:
        raise ConfigError(f"{theorem} covers {alg}/{mode.value}, report is {report.alg}/{report.mode.value}")
    if alg == "rnz" and not report.alg.startswith(f"rnz(alpha={fmt(bound)}"):
        raise ConfigError(f"{theorem} requires alpha = {fmt(bound)}, report is {report.alg}")
    if report.exact:
        margin = bound - report.ratio
        return BoundCheck(key, bound, report.ratio, margin >= 0, margin)
    margin = float(bound) - report.ratio
    return BoundCheck(key, bound, report.ratio, margin >= 0, margin)


def minimize(inst: Instance, failing) -> Instance:
    """Greedy one-request-at-a-time shrink while ``failing(instance)`` stays true."""
    cur = inst
    changed = True
    while changed and len(cur) > 1:
        changed = False
        for r in cur.requests:
            cand = Instance(tuple(q for q in cur.requests if q.id != r.id), cur.label + " (minimized)")
            try:
                bad = failing(cand)
            except Exception:
                bad = False
            if bad:
                cur, changed = cand, True
                break
    return cur
