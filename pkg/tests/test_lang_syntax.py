from pathlib import Path

import pytest
from hypothesis import given, strategies as st

from atr.errors import ParseError
from atr.labels import BOX, DIA, EPS, Label, label_join, parse_label
from atr.parser import parse_program, parse_term, parse_type
from atr.syntax import (
    Const, Crec, DAGGER, Lam, Let, Var, desugar, free_vars, pretty, tail_pos, uses,
)
from atr.types import (
    N, format_type, is_flat, is_impredicative, is_predicative, is_strict, type_depth, type_tail,
)

CORPUS = Path(__file__).resolve().parents[1] / "corpus"

sides = st.sampled_from([BOX, DIA])


@given(sides, st.integers(0, 16))
def test_label_round_trip(side, depth):
    l = Label.of(side, depth)
    assert (l.side, l.depth) == (side, depth)
    assert parse_label(l.ascii()) == l
    assert Label.from_index(l.index) == l


@given(st.integers(0, 30), st.integers(0, 30))
def test_label_order_is_index_order(i, j):
    a, b = Label.from_index(i), Label.from_index(j)
    assert (a <= b) == (i <= j)
    assert label_join(a, b).index == max(i, j)
    assert a.succ().index == i + 1


def test_label_examples():
    l = Label(BOX + DIA + BOX + DIA)
    assert (l.depth, l.side) == (2, BOX)
    assert EPS.succ() == Label(DIA)
    assert Label(DIA).succ() == Label(BOX + DIA)
    assert label_join(Label(DIA), Label(BOX + DIA)) == Label(BOX + DIA)


def test_bad_label_rejected():
    with pytest.raises(ValueError):
        Label(BOX + BOX + DIA)


def test_type_classification():
    imp = parse_type("N@d0 -> N@b1 -> N@d0")
    assert is_flat(imp) and is_impredicative(imp)
    plain = parse_type("N@e -> N@d0")
    assert is_strict(plain) and is_predicative(plain)
    t = parse_type("N@e -> N@d0 -> N@b1")
    assert type_tail(t) == Label(BOX + DIA) and type_depth(t) == 1


def test_parse_cat_has_lambdas_and_let():
    prog = parse_program((CORPUS / "cat.atr").read_text())
    t = prog.resolved("cat")
    assert isinstance(t, Lam) and isinstance(t.body, Lam)


def test_parse_let_node_kept_before_desugaring():
    t = parse_term("let x = eps in x")
    assert isinstance(t, Let)
    assert desugar(t) == Const("")


def test_parse_constants():
    assert parse_term("eps") == Const("")
    assert parse_term('"0110"') == Const("0110")


def test_unbalanced_paren():
    with pytest.raises(ParseError, match="EOF"):
        parse_term("(lam x")


def test_letrec_desugars_to_crec():
    t = desugar(parse_term("letrec f : N@e -> N@e = lam (x : N@e) . x in f w"))
    assert isinstance(t.fn, Crec) and t.fn.clock == "" and t.arg == Var("w")


def test_nested_let_is_capture_avoiding():
    t = desugar(parse_term("let y = x in let x = c0 eps in c1 y"))
    assert free_vars(t) == {"x"}
    assert pretty(t) == "(c1 x)"
    t = desugar(parse_term("let y = x in lam (x : N@e) . y"))
    assert free_vars(t) == {"x"} and t.name != "x"


def test_uses():
    assert uses("f", parse_term("if z then f a else f b")) == 1
    assert uses("f", parse_term("f (f eps)")) == 2
    assert uses("f", parse_term('crec "0" (lamr (g : N@e -> N@e) . f)')) == DAGGER


def test_tail_pos():
    assert tail_pos("f", parse_term("lam (x : N@e) . if t then f x else eps"))
    assert not tail_pos("f", parse_term("f (f x)"))
    assert not tail_pos("f", parse_term("lam (x : N@e) . c0 (f x)"))


def test_type_pretty_round_trip():
    for src in ("N@e", "N@d0 -> N@b1", "(N@d0 -> N@d0 -> N@d0) -> N@e -> N@d0"):
        t = parse_type(src)
        assert parse_type(format_type(t, True)) == t
    assert parse_type("N") == N("e")
