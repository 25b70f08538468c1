"""Time complexities and the T-interpretation over concrete numbers.

A time complexity is a cost together with a potential.  At base type the
potential is a length; at arrow type it is a function from argument
potentials to time complexities.  ``t_interp`` follows the clause for each
construct literally, including the clocked-recursion interpretation that
keeps unfolding until the clock outgrows the first argument's potential.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Optional, Union

from .errors import ExtractionFailure, FuelExhausted, ShapeMismatch
from .oracle import DEFAULT_LMAX, OracleTable
from .sop.eval import exact_length
from .syntax import (
    App, Const, Crec, Down, Fix, If, Lam, Op, Prn, Quote, Term, Var, spine, strip_lams,
)
from .types import Arrow, AtrType, Base, args_of

Potential = Union[int, Callable]


@dataclass(frozen=True)
class TC:
    cost: int
    pot: object

    def __iter__(self):
        yield self.cost
        yield self.pot

    @property
    def base(self) -> bool:
        return isinstance(self.pot, int)


def star(t0: TC, t1: TC) -> TC:
    if not callable(t0.pot):
        raise ShapeMismatch("★ expects a time complexity of arrow type on the left")
    r = t0.pot(t1.pot)
    return TC(t0.cost + t1.cost + r.cost + 3, r.pot)


def star_all(t0: TC, *ts: TC) -> TC:
    for t in ts:
        t0 = star(t0, t)
    return t0


def dally(d: int, t: TC) -> TC:
    return TC(t.cost + d, t.pot)


def val(p) -> TC:
    if isinstance(p, int):
        return TC(max(1, p), p)
    return TC(1, p)


def lambda_star(names, body: Callable[[dict], TC], env: dict) -> TC:
    """``Λ★(x1..xk, X)``: curry ``body`` (a function of an environment) over ``names``."""
    names = list(names)
    if not names:
        return body(env)
    x, rest = names[0], names[1:]

    def pot(p):
        return lambda_star(rest, body, {**env, x: val(p)})

    return TC(1, pot)


def join_pot(p1, p2):
    if isinstance(p1, int) and isinstance(p2, int):
        return max(p1, p2)
    if callable(p1) and callable(p2):
        return lambda q: tc_join(p1(q), p2(q))
    raise ShapeMismatch("potentials of different shapes")


def tc_join(t1: TC, t2: TC) -> TC:
    return TC(max(t1.cost, t2.cost), join_pot(t1.pot, t2.pot))


def uplus(t1: TC, t2: TC) -> TC:
    return TC(t1.cost + t2.cost, join_pot(t1.pot, t2.pot))


def tc_of_string(a: str) -> TC:
    return TC(max(1, len(a)), len(a))


def tc_of_oracle(f: OracleTable, ty: Optional[AtrType] = None, L_max: int = DEFAULT_LMAX) -> TC:
    """``‖f‖ = (1, q1)`` with ``q_i = λp_i.(1, q_{i+1})`` and a final ``(1∨|f|(p⃗), |f|(p⃗))``."""
    k = f.remaining

    def curried(done: tuple):
        def pot(p):
            if not isinstance(p, int):
                raise ShapeMismatch("oracles take base-type arguments")
            args = done + (p,)
            if len(args) == k:
                n = exact_length(f, args)
                return TC(max(1, n), n)
            return TC(1, curried(args))
        return pot

    return TC(1, curried(()))


def tc_of_value(v, ty: Optional[AtrType] = None, L_max: int = DEFAULT_LMAX) -> TC:
    if isinstance(v, str):
        return tc_of_string(v)
    if isinstance(v, OracleTable):
        return tc_of_oracle(v, ty, L_max)
    if isinstance(v, TC):
        return v
    raise ShapeMismatch(f"no time complexity for {v!r}")


def tc_env(values: dict, gamma: Optional[dict] = None, L_max: int = DEFAULT_LMAX) -> dict:
    gamma = gamma or {}
    return {k: tc_of_value(v, gamma.get(k), L_max) for k, v in values.items()}


def epsilon_tc(k: int) -> TC:
    """Time complexity of ``λx1..xk. ε``."""
    return lambda_star([f"_{i}" for i in range(k)], lambda env: TC(1, 0), {})


def full_calls(f: str, body: Term) -> list:
    """Argument lists of the full applications of ``f`` in ``body``."""
    out = []

    def walk(t):
        if isinstance(t, App):
            h, args = spine(t)
            if isinstance(h, Var) and h.name == f:
                out.append(args)
                for a in args:
                    walk(a)
                return
        if isinstance(t, Lam) and t.name == f:
            return
        if isinstance(t, Crec) and t.fname == f:
            return
        for c in _kids(t):
            walk(c)

    walk(body)
    return out


def _kids(t: Term):
    from .syntax import children
    return children(t)


class TInterp:
    """Evaluator of the T-interpretation with a step budget for recursion unfoldings."""

    def __init__(self, fuel: int = 100000):
        self.fuel = fuel
        self.unfoldings = {}

    def run(self, e: Term, env: dict) -> TC:
        return self.ev(e, env)

    def ev(self, e: Term, env: dict) -> TC:
        match e:
            case Const(k):
                return tc_of_string(k)
            case Quote(v):
                return tc_of_value(v)
            case Var(n):
                if n not in env:
                    raise ExtractionFailure(f"no time complexity for {n!r}")
                return env[n]
            case Op(o, a):
                c0, p0 = self.ev(a, env)
                if o in ("c0", "c1"):
                    return TC(c0 + 2, p0 + 1)
                if o == "d":
                    return TC(c0 + 2, max(p0 - 1, 0))
                return TC(c0 + 2, 1)
            case Down(a, b):
                c0, p0 = self.ev(a, env)
                c1, p1 = self.ev(b, env)
                return TC(c0 + c1 + p0 + p1 + 3, min(p0, p1))
            case If(a, b, c):
                c0, _ = self.ev(a, env)
                t1, t2 = self.ev(b, env), self.ev(c, env)
                j = tc_join(t1, t2)
                return TC(c0 + 2 + j.cost, j.pot)
            case Lam(x, _, body):
                return lambda_star([x], lambda en: self.ev(body, en), env)
            case App(f, a):
                return star(self.ev(f, env), self.ev(a, env))
            case Crec():
                return self.crec(e, e.clock, env)
            case Prn() | Fix():
                raise ExtractionFailure("the T-interpretation covers ATR terms only")
        raise ExtractionFailure(f"no T-interpretation for {e!r}")

    def crec(self, e: Crec, clock: str, env: dict) -> TC:
        k = len(args_of(e.fty))
        params, body = strip_lams(e.body, k)
        if len(params) != k:
            raise ExtractionFailure("crec body must start with one λ per argument")
        names = [n for n, _ in params]
        calls = full_calls(e.fname, body)
        stub = epsilon_tc(k)

        def X(en: dict) -> TC:
            p1 = en[names[0]].pot
            c = 2 * p1 + 2 * len(clock) + 5
            if len(clock) > p1:
                return TC(c + 1, 0)
            self.fuel -= 1
            if self.fuel < 0:
                raise FuelExhausted("T-interpretation recursion budget exhausted")
            self.unfoldings[e.fname] = max(self.unfoldings.get(e.fname, 0), len(clock))
            inner = {**en, e.fname: stub}
            # (A x⃗)ζ by the curry identity: argument costs, 4k, then the body
            body_tc = self.ev(body, inner)
            applied = TC(sum(en[n].cost for n in names) + 4 * k + body_tc.cost, body_tc.pot)
            ts = []
            for j in range(k):
                pots = [self.ev(args[j], inner).pot for args in calls]
                ts.append(val(max(pots)) if pots else val(0))
            rec = star_all(self.crec(e, "0" + clock, env), *ts)
            return uplus(dally(c, applied), rec)

        return dally(1, lambda_star(names, X, env))


def t_interp(e: Term, env: dict, fuel: int = 100000) -> TC:
    return TInterp(fuel).run(e, env)


def cost_pot_projections(t: TC, ty: AtrType, L_max: int = DEFAULT_LMAX) -> tuple:
    """Grid tables ``Cost(t)(n⃗) = cost(t ★ ‖v⃗‖)`` and the matching potentials."""
    if isinstance(ty, Base):
        return t.cost, t.pot
    k = len(ty.args)
    if not all(isinstance(a, Base) for a in ty.args):
        raise ShapeMismatch("projections are tabulated for first-order types only")
    cost, pot = {}, {}
    for g in itertools.product(range(L_max + 1), repeat=k):
        r = star_all(t, *(TC(max(1, n), n) for n in g))
        cost[g], pot[g] = r.cost, r.pot
    return cost, pot


@dataclass
class DecompositionReport:
    lhs: TC
    rhs: TC
    ok: bool

    def to_json(self) -> dict:
        return {"lhs": [self.lhs.cost, self.lhs.pot], "rhs": [self.rhs.cost, self.rhs.pot],
                "ok": self.ok}


def affine_decomposition_check(body: Term, f: str, k: int, env: dict,
                               fuel: int = 100000) -> DecompositionReport:
    """Compare ``⟦e⟧ϱ`` with ``⟦e ζ⟧ϱ ⊎ (ϱ(f) ★ t⃗)`` for a body ``e`` with affine ``f``.

    ``env`` must bind ``f`` and every other free variable of ``body``.  Each
    ``t_j`` joins the value forms of the ``j``-th arguments over all full
    applications of ``f``; with no applications it is ``val(0)``.
    """
    interp = TInterp(fuel)
    lhs = interp.ev(body, env)
    erased = {**env, f: epsilon_tc(k)}
    left = interp.ev(body, erased)
    calls = full_calls(f, body)
    ts = []
    for j in range(k):
        pots = [interp.ev(args[j], erased).pot for args in calls]
        ts.append(val(max(pots)) if pots else val(0))
    rhs = uplus(left, star_all(env[f], *ts))
    if not (lhs.base and rhs.base):
        raise ShapeMismatch("affine decomposition compares base-type bodies")
    return DecompositionReport(lhs, rhs, lhs.cost <= rhs.cost and lhs.pot <= rhs.pot)
