import random
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from atr.bigstep import eval_bigstep
from atr.cek import cost_cek, eval_cek, run_cek
from atr.errors import FuelExhausted, StuckState
from atr.oracle import (
    OracleTable, dyadic_decode, dyadic_encode, oracle_length, str_length, validate_environment,
)
from atr.parser import parse_program, parse_term, parse_type
from atr.syntax import Const, app

from termgen import random_env, random_term

CORPUS = Path(__file__).resolve().parents[1] / "corpus"
bits = st.text("01", max_size=8)


@pytest.fixture(scope="module")
def reverse():
    return parse_program((CORPUS / "reverse.atr").read_text()).resolved("reverse")


def test_dyadic():
    assert str_length("110") == 3
    assert dyadic_encode(3) == "00"
    assert dyadic_decode("") == 0


@given(st.integers(0, 5000))
def test_dyadic_round_trip(n):
    assert dyadic_decode(dyadic_encode(n)) == n


def test_c0_eps():
    r = run_cek(parse_term("c0 eps"))
    assert r.value == "0" and r.cost <= 3


def test_basic_ops():
    env = {"x": "1", "y": "10", "z": "101", "w": "11"}
    assert eval_cek(parse_term("c1 (c0 x)"), env) == "101"
    assert eval_cek(parse_term("d y"), env) == "0"
    assert eval_cek(parse_term("down z w"), env) == ""
    assert eval_cek(parse_term("down w z"), env) == "11"


def test_down_charges_both_lengths():
    r = run_cek(parse_term('down "0" "11"'))
    assert r.breakdown["5:delta2"] == 1 + 1 + 2


def test_reverse_01(reverse):
    assert eval_cek(app(reverse, Const("01"))) == "10"


@given(bits)
@settings(max_examples=40, deadline=None)
def test_reverse_matches_native(reverse, w):
    assert eval_cek(app(reverse, Const(w))) == w[::-1]


def test_reverse_unfolds_once_per_symbol(reverse):
    r = run_cek(app(reverse, Const("0110")))
    assert r.unfoldings == {"f": 4}


def test_prn_recursion_on_table():
    f = OracleTable.make("f", 2, {("", ""): "1", ("0", "1"): "00", ("10", "00"): "111"}, "0")
    run = lambda y: eval_cek(parse_term("prn f y"), {"f": f, "y": y})
    assert run("") == f("", "")
    assert run("0") == f("0", run(""))
    assert run("10") == f("10", run("0"))


def test_oracle_length_examples():
    f = OracleTable.make("f", 1, {("",): "0", ("0",): "01"}, "")
    assert oracle_length(f, (1,)) == 2
    assert oracle_length(f, (0,)) == len("0")
    g = OracleTable.make("g", 1, rule="const")
    assert all(oracle_length(g, (n,)) == 0 for n in range(6))


def test_validation_examples():
    ident = OracleTable.make("g", 1, rule="identity")
    double = OracleTable.make("g", 1, rule="double")
    const = OracleTable.make("g", 1, rule="const")
    assert not validate_environment({"g": ident}, {"g": parse_type("N@d0 -> N@e")}).ok
    assert not validate_environment({"g": double}, {"g": parse_type("N@d0 -> N@d0")}).ok
    for ty in ("N@d0 -> N@e", "N@d0 -> N@d0", "N@e -> N@b1"):
        assert validate_environment({"g": const}, {"g": parse_type(ty)}).ok


def test_fuel_exhaustion(reverse):
    with pytest.raises(FuelExhausted):
        run_cek(app(reverse, Const("0101")), fuel=10)


def test_stuck_state():
    with pytest.raises(StuckState):
        run_cek(parse_term('"0" "1"'))


def test_deterministic_cost(reverse):
    e = app(reverse, Const("011"))
    assert cost_cek(e) == cost_cek(e)


@given(st.integers(0, 10**9))
@settings(max_examples=100, deadline=None)
def test_cek_agrees_with_bigstep(seed):
    rng = random.Random(seed)
    e, env = random_term(rng, 4), random_env(rng)
    assert eval_cek(e, env) == eval_bigstep(e, env)
