import json
import random
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from atr.cek import run_cek
from atr.harness import (
    decomposition_trials, load_subject, random_arrow_tc, random_env, run_trial,
)
from atr.oracle import OracleTable
from atr.parser import parse_term
from atr.sop.eval import sop_eval
from atr.syntax import Const, If, app
from atr.tc import (
    TC, TInterp, cost_pot_projections, dally, lambda_star, star, tc_join, tc_of_oracle,
    tc_of_string, uplus, val,
)
from atr.types import N, arrow

CORPUS = Path(__file__).resolve().parents[1] / "corpus"

# Frozen from the extractor after every one of them survived the randomized
# soundness trials; a change here is a change in bound quality.
SIZE_BOUNDS = {
    "reverse": "lam |w| : T@e . 1 + |w|",
    "prn": "lam |e| : T@d0 -> T@d0 -> T@d0 . lam |y| : T@e . "
           "1 + |y| * (1 + Q(e)) + Q(e) + (Q(e) \\/ 1 + |y|) + R(e)",
    "cat": "lam |w| : T@e . lam |x| : T@d0 . 2 + |w| + |x|",
    "fcat": "lam |f| : T@d0 -> T@b1 . lam |x| : T@e . "
            "4 + |x| * (2 + P(f)(2 + |x|)) + P(f)(2 + |x|) + P(f)(0)",
    "findk": "lam |f| : T@d0 -> T@b1 . lam |x| : T@e . |x|",
    "dup": "lam |w| : T@e . lam |x| : T@e . 4 + |w| * (2 + |x|) + |x| + |x|",
    "apply_g": "lam |x1| : T@d0 . 2 + |x1|",
    "oracle_twice": "P(f)(P(f)(|x|))",
}


REVERSE = load_subject(CORPUS / "reverse.atr").program.resolved("reverse")


@pytest.fixture(scope="module")
def subjects():
    return {n: load_subject(CORPUS / f"{n}.atr") for n in SIZE_BOUNDS}


def test_string_time_complexity():
    assert tuple(tc_of_string("01")) == (2, 2)
    assert tuple(tc_of_string("")) == (1, 0)


def test_value_forms():
    assert tuple(val(0)) == (1, 0)
    assert tuple(val(5)) == (5, 5)
    f = lambda p: TC(1, p)
    assert val(f).cost == 1


def test_star_by_hand():
    t0 = TC(3, lambda p: TC(p + 4, p + 1))
    assert tuple(star(t0, TC(2, 2))) == (3 + 2 + 6 + 3, 3)


def test_if_takes_the_costlier_branch():
    t = TInterp().ev(If(Const("1"), Const("01"), Const("0110")), {})
    assert tuple(t) == (1 + 2 + 4, 4)


def test_c0_eps():
    assert tuple(TInterp().ev(parse_term("c0 eps"), {})) == (3, 1)


def test_oracle_application_k1():
    f = OracleTable.make("f", 1, {("0",): "01"}, "")
    assert tuple(star(tc_of_oracle(f), tc_of_string("0"))) == (7, 2)


def test_join_and_uplus():
    a, b = TC(3, 1), TC(2, 4)
    assert tuple(tc_join(a, b)) == (3, 4)
    assert tuple(uplus(a, b)) == (5, 4)
    assert tuple(dally(4, a)) == (7, 1)


@given(st.lists(st.integers(0, 6), min_size=1, max_size=3))
def test_curry_charges_four_per_argument(ps):
    names = [f"x{i}" for i in range(len(ps))]
    body = lambda env: TC(sum(env[n].pot for n in names) + 1, 0)
    out = lambda_star(names, body, {})
    for p in ps:
        out = star(out, val(p))
    rho = {n: val(p) for n, p in zip(names, ps)}
    assert out.cost == 4 * len(ps) + sum(v.cost for v in rho.values()) + body(rho).cost


@pytest.mark.parametrize("w,cek,t", [("", 52, 95), ("0", 103, 172), ("01", 178, 274)])
def test_reverse_costs(w, cek, t):
    term = app(REVERSE, Const(w))
    assert run_cek(term).cost == cek
    assert TInterp().run(term, {}).cost == t


@given(st.text("01", max_size=6))
@settings(max_examples=25, deadline=None)
def test_reverse_unfoldings_match_machine(w):
    term = app(REVERSE, Const(w))
    ti = TInterp()
    ti.run(term, {})
    assert ti.unfoldings == run_cek(term).unfoldings == {"f": len(w)}


@given(st.integers(0, 5), st.integers(0, 5))
@settings(max_examples=25, deadline=None)
def test_t_interpretation_monotone(a, b):
    lo, hi = sorted((a, b))
    t_lo = TInterp().run(app(REVERSE, Const("0" * lo)), {})
    t_hi = TInterp().run(app(REVERSE, Const("1" * hi)), {})
    assert t_lo.cost <= t_hi.cost and t_lo.pot <= t_hi.pot


def test_projections_table():
    t = TInterp().ev(parse_term("lam (y : N@e) . c0 (c0 y)"), {})
    cost, pot = cost_pot_projections(t, arrow(N("e"), N("d0")), 3)
    assert pot == {(n,): n + 2 for n in range(4)}
    assert cost[(0,)] == 1 + 1 + 5 + 3


@pytest.mark.parametrize("name", sorted(SIZE_BOUNDS))
def test_frozen_size_bounds(subjects, name):
    assert str(subjects[name].extraction.size_bound) == SIZE_BOUNDS[name]


def test_reverse_size_bound_is_tight(subjects):
    s = subjects["reverse"]
    for n in range(6):
        assert sop_eval(s.extraction.size_form.body(), {"w": n}) == n + 1


def test_extraction_json_is_deterministic(subjects):
    a = json.dumps(subjects["cat"].extraction.to_json(), sort_keys=True)
    b = json.dumps(load_subject(CORPUS / "cat.atr").extraction.to_json(), sort_keys=True)
    assert a == b


def test_crec_reports(subjects):
    [rep] = subjects["reverse"].extraction.reports
    assert rep.fname == "f"
    assert sop_eval(rep.depth, {"w": 5}) >= 5


@pytest.mark.parametrize("name", ["reverse", "cat", "dup", "findk", "apply_g"])
def test_trials_hold(subjects, name):
    s = subjects[name]
    for i in range(5):
        rng = random.Random(f"unit:{name}:{i}")
        t = run_trial(s, random_env(rng, s.gamma), i)
        assert t.ok, t.violations


def test_decomposition_on_reverse(subjects):
    s = subjects["reverse"]
    reps = decomposition_trials(s.program.resolved("reverse"), {}, 20, 1)
    assert len(reps) == 20 and all(r.ok for _, _, r in reps)


def test_random_arrow_tc_shape():
    t = random_arrow_tc(random.Random(0), 2)
    r = star(star(t, val(1)), val(2))
    assert isinstance(r.pot, int) and r.cost > 0
