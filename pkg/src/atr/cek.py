"""The CEK machine with the string-length cost model.

States are ``(control, continuation)``.  Control is either a term closed
by an environment or an already computed value.  Every step returns its
charge; the total of the charges is the machine cost of a run.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .errors import FuelExhausted, StuckState
from .oracle import OracleTable
from .syntax import (
    App, Const, Crec, Down, Fix, If, Lam, Op, Prn, Quote, Term, Var, app, free_vars, fresh, subst,
)
from .types import args_of

DEFAULT_FUEL = 10**7


@dataclass(frozen=True)
class CrecGuard(Term):
    """Guard of one crec unfolding: compares the clock against the first argument."""

    clock: str
    fname: str
    fty: object
    body: Term
    params: tuple
    pos: Optional[tuple] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Closure:
    lam: Lam
    env: dict = field(compare=False, hash=False)

    def __repr__(self) -> str:
        return f"<closure {self.lam.name}>"


def delta1(op: str, v: str) -> str:
    if op == "c0":
        return "0" + v
    if op == "c1":
        return "1" + v
    if op == "d":
        return v[1:]
    if op == "t0":
        return "0" if v.startswith("0") else ""
    if op == "t1":
        return "0" if v.startswith("1") else ""
    raise StuckState(f"unknown operation {op!r}")


def delta2(v: str, w: str) -> str:
    return v if len(v) <= len(w) else ""


def guard_charge(x1: str, clock: str) -> int:
    return 2 * len(x1) + 2 * len(clock) + 5


def unit_or_len(v) -> int:
    return max(1, len(v)) if isinstance(v, str) else 1


@dataclass
class State:
    term: Optional[Term]
    env: dict
    value: object
    kont: tuple  # linked frames, None is halt

    @property
    def final(self) -> bool:
        return self.term is None and self.kont is None


@dataclass
class CekResult:
    value: object
    cost: int
    steps: int
    trace: list
    unfoldings: dict  # crec name -> deepest clock length reached by a successful guard
    breakdown: dict


def _str(v, what: str) -> str:
    if not isinstance(v, str):
        raise StuckState(f"{what} expects a string, got {v!r}")
    return v


def crec_lambda(t: Crec, avoid) -> Lam:
    n = max(1, len(args_of(t.fty)))
    names = []
    taken = set(avoid) | free_vars(t.body) | {t.fname}
    for _ in range(n):
        nm = fresh("v", taken)
        taken.add(nm)
        names.append(nm)
    body: Term = CrecGuard(t.clock, t.fname, t.fty, t.body, tuple(names))
    tys = args_of(t.fty) or (None,)
    for nm, ty in reversed(list(zip(names, tys))):
        body = Lam(nm, ty, body)
    return body


def prn_lambda(t: Prn) -> Lam:
    y = fresh("y", free_vars(t.body))
    yv = Var(y)
    then = app(t.body, yv, App(Prn(t.body), Op("d", yv)))
    return Lam(y, None, If(yv, then, app(t.body, Const(""), Const(""))))


def step(s: State, stats: Optional[dict] = None) -> tuple:
    """One machine transition: returns ``(state, charge, rule)``."""
    k = s.kont
    if s.term is not None:
        t, env = s.term, s.env
        match t:
            case Const(v):
                return State(None, {}, v, k), unit_or_len(v), "const"
            case Quote(v):
                return State(None, {}, v, k), unit_or_len(v), "const"
            case Lam():
                return State(None, {}, Closure(t, env), k), 1, "lam"
            case Var(n):
                if n not in env:
                    raise StuckState(f"unbound variable {n!r}")
                v = env[n]
                return State(None, {}, v, k), unit_or_len(v), "6:lookup"
            case Op(o, a):
                return State(a, env, None, ("op", o, k)), 1, "1:op"
            case Down(a, b):
                return State(a, env, None, ("dn", b, env, k)), 1, "3:down"
            case App(f, a):
                return State(f, env, None, ("arg", a, env, k)), 1, "7:app"
            case If(a, b, c):
                return State(a, env, None, ("test", b, c, env, k)), 1, "11:if"
            case Fix(Lam(x, _, b) as lam):
                return State(subst(b, x, Fix(lam)), env, None, k), 1, "13:fix"
            case Fix():
                raise StuckState("fix expects a λ-abstraction")
            case Prn():
                return State(prn_lambda(t), env, None, k), 1, "14:prn"
            case Crec():
                return State(crec_lambda(t, env.keys()), env, None, k), 1, "15:crec"
            case CrecGuard(clock, f, fty, body, params):
                x1 = _str(env[params[0]], "crec guard")
                charge = guard_charge(x1, clock)
                if len(clock) <= len(x1):
                    if stats is not None:
                        stats[f] = max(stats.get(f, 0), len(clock))
                    rec = Crec("0" + clock, f, fty, body)
                    nxt = app(subst(body, f, rec), *(Var(p) for p in params))
                    return State(nxt, env, None, k), charge, "15:guard"
                return State(Const(""), env, None, k), charge, "15:guard"
        raise StuckState(f"no rule for term {t!r}")
    v = s.value
    if k is None:
        raise StuckState("machine has halted")
    tag = k[0]
    if tag == "op":
        return State(None, {}, delta1(k[1], _str(v, k[1])), k[2]), 1, "2:delta1"
    if tag == "dn":
        _, b, env2, rest = k
        return State(b, env2, None, ("dn2", v, rest)), 1, "4:down-arg"
    if tag == "dn2":
        _, v0, rest = k
        v0, v1 = _str(v0, "down"), _str(v, "down")
        return State(None, {}, delta2(v0, v1), rest), 1 + len(v0) + len(v1), "5:delta2"
    if tag == "arg":
        _, a, env2, rest = k
        return State(a, env2, None, ("fun", v, rest)), 1, "8:arg"
    if tag == "fun":
        _, f, rest = k
        if isinstance(f, Closure):
            lam = f.lam
            return State(lam.body, {**f.env, lam.name: v}, None, rest), 1, "9:beta"
        if isinstance(f, OracleTable):
            r = f.apply(_str(v, f"oracle {f.name}"))
            return State(None, {}, r, rest), unit_or_len(r), "10:oracle"
        raise StuckState(f"cannot apply {f!r}")
    if tag == "test":
        _, b, c, env2, rest = k
        return State(b if _str(v, "If") != "" else c, env2, None, rest), 1, "12:test"
    raise StuckState(f"bad continuation {tag!r}")


def run_cek(e: Term, env: Optional[dict] = None, fuel: int = DEFAULT_FUEL,
            trace: bool = False) -> CekResult:
    s = State(e, dict(env or {}), None, None)
    total = steps = 0
    lines = []
    stats = {}
    breakdown = {}
    while not s.final:
        if steps >= fuel:
            raise FuelExhausted(f"no result within {fuel} steps (cost so far {total})")
        s, charge, rule = step(s, stats)
        steps += 1
        total += charge
        breakdown[rule] = breakdown.get(rule, 0) + charge
        if trace:
            lines.append((rule, charge, total))
    return CekResult(s.value, total, steps, lines, stats, dict(sorted(breakdown.items())))


def eval_cek(e: Term, env: Optional[dict] = None, fuel: int = DEFAULT_FUEL):
    return run_cek(e, env, fuel).value


def cost_cek(e: Term, env: Optional[dict] = None, fuel: int = DEFAULT_FUEL) -> int:
    return run_cek(e, env, fuel).cost


def format_trace(res: CekResult) -> str:
    return "\n".join(f"{rule}\t{charge}\t{total}" for rule, charge, total in res.trace)
