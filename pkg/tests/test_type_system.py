from pathlib import Path

import pytest
from hypothesis import given, strategies as st

from atr.corpus import check_corpus, check_file
from atr.errors import AffinityError, AtrTypeError, TailPosError
from atr.labels import BOX, DIA, Label
from atr.parser import parse_program, parse_term, parse_type
from atr.typecheck import check, check_program, find_instance
from atr.types import Arrow, Base, N, arrow, shift_D, shifts_to, subtype, undo

CORPUS = Path(__file__).resolve().parents[1] / "corpus"

bases = st.integers(0, 6).map(lambda i: Base(Label.from_index(i)))
level1 = st.builds(lambda a, r: Arrow(tuple(a), r), st.lists(bases, min_size=1, max_size=3), bases)
types = st.one_of(bases, level1)


def test_subtype_examples():
    assert subtype(N("e"), N("b1"))
    assert subtype(parse_type("N@d0 -> N@e"), parse_type("N@e -> N@d0"))
    assert not subtype(N("b1"), N("e"))


@given(types)
def test_subtype_and_shift_reflexive(t):
    assert subtype(t, t)
    assert shifts_to(t, t)


@given(types, types)
def test_subtype_antisymmetric(a, b):
    if subtype(a, b) and subtype(b, a):
        assert a == b


@given(types, types, types)
def test_subtype_transitive(a, b, c):
    if subtype(a, b) and subtype(b, c):
        assert subtype(a, c)


@given(bases, bases)
def test_base_shift_keeps_side(a, b):
    assert shifts_to(a, b) == (a.label.side == b.label.side and a.label.depth <= b.label.depth)


def test_undo_examples():
    step = arrow(N("e"), N("b1"))
    assert undo(step, Label.of(BOX, 3)) == Label.of(BOX, 2)
    assert undo(step, Label.of(DIA, 2)) == Label.of(BOX, 1)
    assert undo(parse_type("N@d0 -> N@d0"), Label.of(DIA, 2)) is None


def test_shift_D_examples():
    level2 = arrow(arrow(N("e"), N("b1")), N("b3"))
    assert shift_D(level2, [arrow(N("e"), N("b2"))]) == 3
    assert shift_D(level2, [arrow(N("e"), N("b1"))]) == 0
    assert shift_D(parse_type("N@e -> N@d0 -> N@d0"), [N("d1"), N("d1")]) == 1


def test_shifts_to_examples():
    assert shifts_to(parse_type("N@d0 -> N@b1"), parse_type("N@d1 -> N@b2"))
    assert not shifts_to(N("b1"), N("d0"))


def test_find_instance_shifts_oracle_application():
    f = parse_type("N@d0 -> N@b1")
    inst = find_instance(f, [N("b1")])
    assert inst is not None and inst.result == N("b2")


def test_zero_intro():
    assert check(parse_term("eps")).type == N("e")


def test_findk_type():
    prog = parse_program((CORPUS / "findk.atr").read_text())
    assert check_program(prog)["findk"].type == parse_type("(N@d0 -> N@b1) -> N@e -> N@e")


@pytest.mark.parametrize("src,err", [
    ('crec "0" (lamr (f : N@e -> N@e) . lam (x : N@e) . f (f x))', AffinityError),
    ('crec "0" (lamr (f : N@e -> N@d0) . lam (x : N@e) . c0 (f x))', TailPosError),
])
def test_recursion_discipline(src, err):
    with pytest.raises(err):
        check(parse_term(src))


def test_disasters_are_well_typed():
    for name in ("e1", "e2"):
        prog = parse_program((CORPUS / f"{name}.atr").read_text())
        assert name in check_program(prog)


def test_bcl_dialect_rejects_crec():
    with pytest.raises(AtrTypeError):
        check(parse_term('crec "" (lamr (f : N@e -> N@e) . lam (x : N@e) . x)'), dialect="bcl")


def test_corpus_report():
    rep = check_corpus(CORPUS)
    assert rep.ok
    neg = {e.file: e.outcome for e in rep.entries if e.expect}
    assert sorted(neg.values()) == ["AffinityError", "TailPosError"]


def test_wrong_expectation_is_flagged(tmp_path):
    bad = tmp_path / "mislabelled.atr"
    bad.write_text((CORPUS / "neg" / "nontail.atr").read_text().replace("TailPosError", "AffinityError"))
    assert not check_file(bad, tmp_path).ok


def test_derivation_renders():
    d = check(parse_term("lam (x : N@e) . c0 x"))
    lines = d.render(0).splitlines()
    assert lines[0].endswith(": N@e -> N@d0")
    assert lines[1].strip() == "op-I: (c0 x) : N@d0"
