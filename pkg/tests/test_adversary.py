import json
from fractions import Fraction as F
from pathlib import Path

import pytest
from hypothesis import given, strategies as st

from oltsp.adversary import (
    GeneratorParams,
    adaptive_thm3,
    adaptive_thm4,
    branch_runner,
    gen_random,
    gen_thm1,
    gen_thm2,
    generate,
    thm2_best_response,
    thm2_opt_bound,
)
from oltsp.evaluate import exact_expectation
from oltsp.model import Instance
from oltsp.offline import Mode, opt_fair, opt_general
from oltsp.online import ALPHA_THM3, RunConfig
from oltsp.scalar import fmt

FIXTURES = Path(__file__).parent / "fixtures"


def test_thm1_shape():
    inst = gen_thm1(1, F(1, 1000))
    assert inst.key() == ((0, 1), (0, F(-1, 1000)), (2, 1))
    rep = exact_expectation(inst, RunConfig("rz", Mode.FAIR))
    assert rep.expected == 4 and rep.opt == 3 and rep.ratio == F(4, 3)


@pytest.mark.parametrize("x,y", [(1, 1), (1, 2), (0, F(1, 2)), (1, 0)])
def test_thm1_validation(x, y):
    with pytest.raises(ValueError):
        gen_thm1(x, y)


def test_thm2_shape():
    inst = gen_thm2(1, F(1, 1000), 3)
    assert [(t, [r.position for r in g]) for t, g in inst.events()] == [
        (0, [1, F(-1, 1000)]), (2, [2, F(-1, 1000)]), (6, [6])]
    alt = gen_thm2(1, F(1, 1000), 3, pair_at_2x=False)
    assert [r.position for r in alt.events()[1][1]] == [2]
    with pytest.raises(ValueError):
        gen_thm2(1, F(1, 1000), 2)


@pytest.mark.parametrize("n", [3, 4])
def test_thm2_closed_forms(n):
    y = F(1, 1000)
    inst = gen_thm2(1, y, n)
    rep = exact_expectation(inst, RunConfig("rz", Mode.GENERAL))
    assert min(b.completion_time for b in rep.branches) == thm2_best_response(1, y, n)
    assert opt_general(inst).value == thm2_opt_bound(1, y, n)
    assert rep.ratio >= F(3, 2) - F(1, 1000)


def test_thm3_adaptive():
    res = adaptive_thm3(branch_runner(RunConfig("rnz", Mode.FAIR, ALPHA_THM3)), 1, F(1, 10), alpha_probe=ALPHA_THM3)
    T = res.transcript.trigger
    assert T <= ALPHA_THM3 * F(22, 10)
    assert res.instance.events()[-1][0] == T
    assert [r.position for r in res.instance.events()[-1][1]] == [1]
    assert res.opt == T + 1
    assert res.ratio >= (T + 2) / (T + 1)
    # injection is causal
    assert all(t >= T for t, _, _ in res.transcript.injected)


def test_thm3_deterministic_single_observation():
    res = adaptive_thm3(branch_runner(RunConfig("det", Mode.FAIR)), 1, F(1, 10))
    assert len(res.transcript.observed) == 1


def test_thm4_examples():
    res = adaptive_thm4(branch_runner(RunConfig("rz", Mode.GENERAL)))
    assert res.transcript.trigger == 2 and res.opt == 4 and res.expected >= 6 and res.ratio >= F(3, 2)
    res = adaptive_thm4(branch_runner(RunConfig("rnz", Mode.GENERAL)))
    assert res.transcript.trigger == 3 and res.expected == 9 and res.opt == 6 and res.ratio == F(3, 2)
    empty = adaptive_thm4(branch_runner(RunConfig("rz", Mode.GENERAL)), prefix=Instance())
    assert empty.transcript.trigger == 0 and empty.ratio == 1


def test_adaptive_per_branch():
    res = adaptive_thm3(branch_runner(RunConfig("rz", Mode.FAIR)), 1, F(1, 10), per_branch=True)
    assert len(res.per_branch) == len(res.transcript.observed) == 2
    assert res.ratio > 1


def test_random_golden():
    p = GeneratorParams(seed=7, n=4, pos_range=4, horizon=8, grid=F(1, 4))
    want = json.loads((FIXTURES / "random_seed7.json").read_text())
    assert gen_random(p).to_dict() == want
    assert gen_random(p) == gen_random(p)


def test_random_validation():
    with pytest.raises(ValueError):
        gen_random(GeneratorParams(n=0))
    with pytest.raises(ValueError):
        gen_random(GeneratorParams(pos_range=0))
    with pytest.raises(ValueError):
        generate(GeneratorParams(family="thm3"))


@given(st.integers(0, 10**6), st.integers(1, 6))
def test_random_round_trip(seed, n):
    inst = gen_random(GeneratorParams(seed=seed, n=n))
    back = Instance.from_json(inst.to_json())
    assert back.key() == inst.key()
    assert len(inst.events()) <= n
    for r in inst.requests:
        assert (r.position * 4).denominator == 1 and abs(r.position) <= 4 and 0 <= r.release <= 8


def test_opt_fair_of_thm3_prefix():
    assert opt_fair(Instance.from_events([(0, [1, F(-1, 10)])])).value == F(11, 5)
    assert fmt(F(11, 5)) == "11/5"


@pytest.mark.parametrize("pts", [[1, F(-1, 1000)], [1]])
def test_thm1_continuations_do_not_raise_ratio(pts):
    base = gen_thm1(1, F(1, 1000))
    cfg = RunConfig("rz", Mode.FAIR)
    r0 = exact_expectation(base, cfg).ratio
    cur = base
    for k in (2, 3, 4):
        cur = cur.with_event(2 * k, pts)
        assert exact_expectation(cur, cfg).ratio <= r0
