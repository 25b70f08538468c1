import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from atr.errors import SopTypeError, SubstitutionFailure
from atr.sop.eval import sop_eval
from atr.sop.gr import GR_SIGMA, gr_safe_bound, random_gr
from atr.sop.normal import beta_normalize, shadowed_occurrences, sop_depth
from atr.sop.poly import parse_poly, show, V
from atr.sop.safe import NotSafe, classify_safe, safe_substitute
from atr.sop.types import Prod, T
from atr.sop.typing import sop_typecheck
from atr.types import Arrow

seeds = st.integers(0, 10**9)
GR_LEVELS = {"g": 1, "h": 1}
GR_ENV = {"x": 1, "y": 2, "m": 1, "w": 0, "g": lambda v: v + 1, "h": lambda v: 2 * v}


def test_depth_three_example():
    inner = "(|g0|(2 * |y| * |g1|(|y| * |y|)) \\/ 6)"
    p = parse_poly(f"|g0|({inner} * {inner} * {inner})", {"g0": 1, "g1": 1})
    assert sop_depth(p) == 3


def test_depth_of_lone_function_variable():
    assert sop_depth(parse_poly("|f|", {"f": 1})) == 1


def test_beta_redex():
    assert beta_normalize(parse_poly("(lam |z| . |z|)(|y|)")) == V("y")


def test_size_typing():
    sig = {"x": T("e"), "y": T("e")}
    assert sop_typecheck({}, parse_poly("0"), "size") == T("e")
    with pytest.raises(SopTypeError):
        sop_typecheck(sig, parse_poly("|x| + |y|"), "size", T("e"))
    assert sop_typecheck(sig, parse_poly("|x| + |y|"), "size", T("d0")) == T("d0")


def test_pairs_type_componentwise():
    sig = {"x": T("e"), "y": T("d0")}
    assert sop_typecheck(sig, parse_poly("(|x|, |y| + 1)"), "tc") == Prod(T("e"), T("d0"))


def test_shadowed_argument():
    sig = {"g": Arrow((T("d0"),), T("e")), "y": T("d0")}
    assert shadowed_occurrences(parse_poly("|g|(|y|)", {"g": 1}), sig) == {(1,)}
    assert shadowed_occurrences(parse_poly("|y| + 1"), sig) == set()


def test_nested_shadowing():
    sig = {"g": Arrow((T("d0"),), T("e")), "h": Arrow((T("e"),), T("d0")), "y": T("e")}
    occ = shadowed_occurrences(parse_poly("|g|(|h|(|y|))", {"g": 1, "h": 1}), sig)
    assert (1,) in occ and (1, 1) in occ


def test_classify_safe():
    sig = {"x": T("e"), "y": T("d0")}
    sf = classify_safe(parse_poly("|x| + |y|"), sig, T("d0"))
    assert (sf.q, sf.r, sf.ys) == (V("x"), (), ("y",))
    assert isinstance(classify_safe(parse_poly("|y| * |y|"), sig, T("d0")), NotSafe)
    zero = classify_safe(parse_poly("0"), sig, T("d0"))
    assert zero and zero.r == () and zero.ys == ()


SIG = {"z": T("e"), "y": T("d0"), "w": T("e"), "u": T("e"), "x": T("d0")}


def test_safe_substitution_examples():
    out = safe_substitute(parse_poly("|u| + |x|"), "x", parse_poly("|w| + |y|"), SIG, T("d0"))
    assert show(out) == "|u| + |w| + |y|"
    out = safe_substitute(parse_poly("|z| + |y|"), "z", parse_poly("|w| \\/ 1"), SIG, T("d0"))
    assert show(out) == "(1 \\/ |w|) + |y|"
    p0 = parse_poly("|u| + |x|")
    assert safe_substitute(p0, "absent", parse_poly("|w|"), SIG) is p0


def test_safe_substitution_rejects_unsafe_input():
    with pytest.raises(SubstitutionFailure):
        safe_substitute(parse_poly("|z| + |y|"), "z", parse_poly("|w| + |y|"), SIG, T("d0"))


def test_safe_substitution_dominates_on_grid():
    p0, p1 = parse_poly("|u| + |x|"), parse_poly("|w| + |y|")
    out = safe_substitute(p0, "x", p1, SIG, T("d0"))
    for u, w, y in itertools.product(range(7), repeat=3):
        env = {"u": u, "w": w, "y": y}
        assert sop_eval(out, env) >= sop_eval(p0, {**env, "x": sop_eval(p1, env)})


@given(seeds)
@settings(max_examples=60, deadline=None)
def test_print_parse_round_trip(seed):
    s, _ = random_gr(random.Random(seed), 3)
    assert parse_poly(show(s), GR_LEVELS) == s


@given(seeds, st.sampled_from(["x", "y", "m", "w"]))
@settings(max_examples=60, deadline=None)
def test_gr_terms_monotone(seed, var):
    s, _ = random_gr(random.Random(seed), 3)
    lo = sop_eval(s, GR_ENV)
    hi = sop_eval(s, {**GR_ENV, var: GR_ENV[var] + 1})
    assert lo <= hi


@given(seeds)
@settings(max_examples=60, deadline=None)
def test_gr_bound_is_safe_and_dominates(seed):
    s, target = random_gr(random.Random(seed), 3)
    bound = gr_safe_bound(s, GR_SIGMA)
    assert classify_safe(bound, GR_SIGMA, T(target.ascii()))
    assert sop_eval(s, GR_ENV) <= sop_eval(bound, GR_ENV)
