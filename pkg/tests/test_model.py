from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from oltsp.model import (
    HullTimeline,
    Instance,
    Segment,
    Trajectory,
    eval_trajectory,
    hull_at,
    is_zealous,
    served_times,
    serves,
    trajectory_from_waypoints,
)


def traj(*segs):
    return Trajectory(tuple(Segment(*map(F, s)) for s in segs))


def test_eval_examples():
    assert eval_trajectory(traj((0, 2, 0, 2)), 1) == 1
    t = traj((0, 1, 0, 1), (1, 3, 1, 1), (3, 4, 1, 0))
    assert eval_trajectory(t, 0) == 0
    assert eval_trajectory(t, 2) == 1
    assert eval_trajectory(t, F(7, 2)) == F(1, 2)
    with pytest.raises(ValueError):
        eval_trajectory(t, 5)
    with pytest.raises(ValueError):
        eval_trajectory(t, -1)


def test_validate():
    traj((0, 1, 0, 1), (1, 3, 1, 1), (3, 4, 1, 0)).validate()
    with pytest.raises(ValueError):
        traj((0, 1, 0, 2), (1, 3, 2, 0)).validate()  # too fast
    with pytest.raises(ValueError):
        traj((0, 1, 0, 1)).validate()  # does not return
    with pytest.raises(ValueError):
        traj((0, 1, 0, 1), (2, 3, 1, 0)).validate()  # gap


def test_served_times_examples():
    t = traj((0, 1, 0, 1), (1, 2, 1, 0))
    inst = Instance.from_events([(0, [1])])
    assert served_times(t, inst) == {0: 1}
    late = Instance.from_events([(F(3, 2), [1])])
    assert served_times(t, late) == {}
    assert not serves(t, late)


def test_left_first_route():
    # move left, serve -y, then x
    inst = Instance.from_events([(0, [1, F(-1, 10)])])
    t = trajectory_from_waypoints([(F(1, 10), F(-1, 10)), (F(12, 10), 1), (F(22, 10), 0)])
    st_ = served_times(t, inst)
    left = next(r.id for r in inst.requests if r.position < 0)
    right = next(r.id for r in inst.requests if r.position > 0)
    assert st_[left] < st_[right]


def test_origin_request_at_zero():
    inst = Instance.from_events([(0, [0])])
    assert served_times(Trajectory(), inst) == {0: 0}


def test_zealous_flags_mid_segment_turn():
    inst = Instance.from_events([(0, [2])])
    bad = trajectory_from_waypoints([(1, 1), (2, 0), (4, 2), (6, 0)])
    rep = is_zealous(bad, inst)
    assert not rep
    assert any("direction change" in v for v in rep.violations)


def test_zealous_flags_wait_while_pending():
    inst = Instance.from_events([(0, [2])])
    t = trajectory_from_waypoints([(1, 1), (2, 1), (3, 2), (5, 0)])
    rep = is_zealous(t, inst)
    assert not rep and any("pending" in v for v in rep.violations)


def test_zealous_plain_round_trip():
    inst = Instance.from_events([(0, [2, -1])])
    t = trajectory_from_waypoints([(2, 2), (5, -1), (6, 0)])
    assert is_zealous(t, inst)


def test_hull_strict():
    inst = Instance.from_events([(0, [1, F(-1, 10)])])
    h = HullTimeline.from_instance(inst)
    assert hull_at(h, 0) == (0, 0)
    assert hull_at(h, F(1, 2)) == (F(-1, 10), 1)


def test_hull_thm1(thm1_small):
    h = HullTimeline.from_instance(thm1_small)
    for t in (F(1, 100), 1, 2):
        assert h.at(t)[1] == 1
    assert h.at(100) == (F(-1, 1000), 1)


def test_json_round_trip(thm1_small):
    again = Instance.from_json(thm1_small.to_json())
    assert again.key() == thm1_small.key()
    assert again.label == thm1_small.label
    d = Instance.from_dict({"events": [{"t": "0.5", "points": ["-0.25", 3]}]})
    assert d.key() == ((F(1, 2), F(-1, 4)), (F(1, 2), F(3)))


def test_unsorted_rejected():
    from oltsp.model import Request

    with pytest.raises(ValueError):
        Instance((Request(F(2), F(1), 0), Request(F(1), F(1), 1)))
    with pytest.raises(ValueError):
        Request(F(-1), F(0))


grid = st.integers(-12, 12).map(lambda k: F(k, 4))
events = st.lists(st.tuples(st.integers(0, 24).map(lambda k: F(k, 4)), st.lists(grid, min_size=1, max_size=2)),
                  min_size=1, max_size=4)


@given(events, st.lists(st.integers(0, 40).map(lambda k: F(k, 4)), min_size=2, max_size=6))
def test_hull_monotone(evs, times):
    h = HullTimeline.from_instance(Instance.from_events(evs))
    times = sorted(times)
    for a, b in zip(times, times[1:]):
        la, ra = h.at(a)
        lb, rb = h.at(b)
        assert lb <= la <= 0 <= ra <= rb


waypoints = st.lists(st.tuples(st.integers(0, 3), grid), min_size=1, max_size=5)


def _route(steps):
    t, p, pts = F(0), F(0), []
    for pause, q in steps:
        t += pause
        pts.append((t, p))
        t += abs(q - p)
        p = q
        pts.append((t, p))
    pts.append((t + abs(p), F(0)))
    return trajectory_from_waypoints(pts)


@given(events, waypoints)
def test_reflection_symmetry(evs, steps):
    inst = Instance.from_events(evs)
    t = _route(steps)
    t.validate()
    m = t.mirrored()
    assert m.completion_time == t.completion_time
    assert served_times(m, inst.mirrored()) == served_times(t, inst)


@given(events, waypoints, waypoints)
def test_served_times_monotone_under_extension(evs, a, b):
    inst = Instance.from_events(evs)
    base = _route(a)
    longer = Trajectory(base.segments + tuple(
        Segment(s.t0 + base.completion_time, s.t1 + base.completion_time, s.p0, s.p1) for s in _route(b).segments))
    before, after = served_times(base, inst), served_times(longer, inst)
    for rid, v in before.items():
        assert after[rid] == v
