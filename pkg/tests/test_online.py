from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from oltsp.model import Instance, SalesmanKnowledge, is_zealous
from oltsp.offline import Mode
from oltsp.online import (
    ALPHA_GENERAL,
    CoinsExhausted,
    EventView,
    Kind,
    PathCoins,
    RandomCoins,
    RunConfig,
    det_baseline_step,
    rnz_wait,
    rz_step,
    simulate,
)

RZ = RunConfig("rz", Mode.FAIR)


def view(t, pts, s=0, right=None, left=None):
    know = SalesmanKnowledge(F(t), F(s), right, left, right or F(0), left or F(0))
    pts = tuple(F(p) for p in pts)
    px = max((p for p in pts if p > 0), default=None)
    py = max((-p for p in pts if p <= 0), default=None)
    ra = max([v for v in (px, right) if v is not None], default=None)
    la = max([v for v in (py, left) if v is not None], default=None)
    return EventView(F(t), pts, px, py, know, ra, la)


def test_rz_coin_on_two_sided_start():
    assert rz_step(view(0, [1, F(-1, 10)])).kind is Kind.COIN


def test_rz_one_sided():
    assert rz_step(view(1, [2], s=1)).kind is Kind.RIGHT
    assert rz_step(view(1, [-2], s=1)).kind is Kind.LEFT


def test_rz_follow_when_extremes_unchanged():
    assert rz_step(view(1, [1, F(-1, 2)], s=0, right=F(2), left=F(1))).kind is Kind.FOLLOW


def test_trigger_strict():
    # a new point exactly at the current right extreme does not re-decide
    assert rz_step(view(1, [2], s=0, right=F(2))).kind is Kind.FOLLOW


def test_det_symmetric_goes_right():
    d = det_baseline_step(view(0, [1, -1]))
    assert d.kind is Kind.RIGHT and d.plan[0] == 1


def test_thm1_branches(thm1_small):
    rr = simulate(thm1_small, RZ, PathCoins("RR"))
    assert rr.completion_time == F(4002, 1000)
    l = simulate(thm1_small, RZ, PathCoins("L"))
    assert l.completion_time == F(3998, 1000)
    assert l.coins == (False,)


def test_det_thm1(thm1_small):
    assert simulate(thm1_small, RunConfig("det")).completion_time == F(4002, 1000)


def test_empty_instance():
    res = simulate(Instance(), RZ)
    assert res.completion_time == 0 and res.trajectory.segments == ()


def test_coins_exhausted(thm1_small):
    with pytest.raises(CoinsExhausted) as exc:
        simulate(thm1_small, RZ, PathCoins(""))
    assert exc.value.event_index == 0


def test_rnz_single_request():
    res = simulate(Instance.from_events([(0, [1])]), RunConfig("rnz", Mode.GENERAL, ALPHA_GENERAL))
    assert res.completion_time == 3
    assert res.wait_ledger == [(1, 1, 1)]
    rep = is_zealous(res.trajectory, Instance.from_events([(0, [1])]))
    assert not rep and any("wait" in v for v in rep.violations)


def test_rnz_zero_wait_matches_rz():
    # alpha*OPT = t + C exactly: W = 0 and the run coincides with RZ
    inst = Instance.from_events([(0, [1])])
    a = simulate(inst, RunConfig("rnz", Mode.GENERAL, 1))
    b = simulate(inst, RZ)
    assert a.wait_ledger == [(1, 0, 0)]
    assert a.trajectory == b.trajectory
    assert rnz_wait(F(1), F(2), F(1), F(1)).duration == 0


def test_rnz_wait_aborted_by_trigger():
    # waiting at 1 until t=3 is interrupted by a new far-right request at t=3/2
    inst = Instance.from_events([(0, [1]), (F(3, 2), [3])])
    res = simulate(inst, RunConfig("rnz", Mode.GENERAL, ALPHA_GENERAL))
    waits = [s for s in res.trajectory.segments if s.is_wait]
    assert waits[0].t0 == 1 and waits[0].t1 == F(3, 2)
    assert any(k == "right" for t, k in res.decisions if t == F(3, 2))


def test_rnz_negative_wait_is_recorded():
    res = simulate(Instance.from_events([(0, [1])]), RunConfig("rnz", Mode.GENERAL, F(1, 2)))
    assert res.clamp_events and res.completion_time == 2


def test_random_coins_seeded(thm1_small):
    a = simulate(thm1_small, RZ, RandomCoins(3))
    b = simulate(thm1_small, RZ, RandomCoins(3))
    assert a.trajectory == b.trajectory and a.coins == b.coins


grid = st.integers(-12, 12).map(lambda k: F(k, 4))
events = st.lists(st.tuples(st.integers(0, 24).map(lambda k: F(k, 4)), st.lists(grid, min_size=1, max_size=2)),
                  min_size=1, max_size=4)
bits = st.lists(st.booleans(), min_size=8, max_size=8)
algs = st.sampled_from([RunConfig("rz", Mode.FAIR), RunConfig("rnz", Mode.FAIR), RunConfig("rnz", Mode.GENERAL)])


@given(events, bits, algs)
def test_deterministic_and_valid(evs, path, cfg):
    inst = Instance.from_events(evs)
    a = simulate(inst, cfg, PathCoins(path))
    b = simulate(inst, cfg, PathCoins(path))
    assert a.trajectory == b.trajectory
    a.trajectory.validate()
    assert set(a.served) == {r.id for r in inst.requests}


@given(events, bits, algs)
def test_reflection_equivariance(evs, path, cfg):
    inst = Instance.from_events(evs)
    a = simulate(inst, cfg, PathCoins(path))
    b = simulate(inst.mirrored(), cfg, PathCoins([not x for x in path]))
    assert b.trajectory == a.trajectory.mirrored()


@given(events, bits, algs)
def test_online_causality(evs, path, cfg):
    inst = Instance.from_events(evs)
    full = simulate(inst, cfg, PathCoins(path))
    times = inst.event_times()
    for k in range(1, len(times)):
        part = simulate(inst.first_events(k), cfg, PathCoins(path))
        cut = times[k]
        for s_full, s_part in zip(full.trajectory.segments, part.trajectory.segments):
            if s_part.t1 > cut:
                assert s_part.t0 == s_full.t0 and s_part.p0 == s_full.p0
                break
            assert s_full == s_part


@given(events, bits)
def test_rz_is_zealous(evs, path):
    inst = Instance.from_events(evs)
    for mode in Mode:
        res = simulate(inst, RunConfig("rz", mode), PathCoins(path))
        rep = is_zealous(res.trajectory, inst)
        assert rep, rep.violations
