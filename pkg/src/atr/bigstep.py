"""Independent big-step evaluator by substitution, used as a reference for the machine."""

from __future__ import annotations

import sys
from dataclasses import dataclass
from typing import Optional

from .cek import delta1, delta2
from .errors import FuelExhausted, StuckState
from .oracle import OracleTable
from .syntax import App, Const, Crec, Down, Fix, If, Lam, Op, Prn, Quote, Term, Var, app, subst_many
from .types import args_of


@dataclass(frozen=True)
class PrnValue:
    fn: object


@dataclass(frozen=True)
class CrecValue:
    clock: str
    fname: str
    fty: object
    body: Term
    args: tuple = ()


def quote(v) -> Term:
    if isinstance(v, str):
        return Const(v)
    if isinstance(v, Lam):
        return v
    return Quote(v)


class BigStep:
    def __init__(self, fuel: int = 10**6):
        self.fuel = fuel

    def tick(self):
        self.fuel -= 1
        if self.fuel < 0:
            raise FuelExhausted("big-step evaluation ran out of fuel")

    def eval(self, t: Term):
        self.tick()
        match t:
            case Const(v) | Quote(v):
                return v
            case Var(n):
                raise StuckState(f"free variable {n!r}")
            case Op(o, a):
                v = self.eval(a)
                if not isinstance(v, str):
                    raise StuckState("operation on a non-string")
                return delta1(o, v)
            case Down(a, b):
                return delta2(self.eval(a), self.eval(b))
            case If(a, b, c):
                return self.eval(b) if self.eval(a) != "" else self.eval(c)
            case Lam():
                return t
            case App(f, a):
                fv = self.eval(f)
                return self.apply(fv, self.eval(a))
            case Fix(Lam(x, _, b) as lam):
                return self.eval(subst_many(b, {x: Fix(lam)}))
            case Prn(b):
                return PrnValue(self.eval(b))
            case Crec(k, f, ty, b):
                return CrecValue(k, f, ty, b)
        raise StuckState(f"cannot evaluate {t!r}")

    def apply(self, f, v):
        self.tick()
        if isinstance(f, Lam):
            return self.eval(subst_many(f.body, {f.name: quote(v)}))
        if isinstance(f, OracleTable):
            return f.apply(v)
        if isinstance(f, PrnValue):
            if v:
                return self.apply(self.apply(f.fn, v), self.apply(f, v[1:]))
            return self.apply(self.apply(f.fn, ""), "")
        if isinstance(f, CrecValue):
            args = f.args + (v,)
            if len(args) < max(1, len(args_of(f.fty))):
                return CrecValue(f.clock, f.fname, f.fty, f.body, args)
            if len(f.clock) > len(args[0]):
                return ""
            rec = Crec("0" + f.clock, f.fname, f.fty, f.body)
            return self.eval(app(subst_many(f.body, {f.fname: rec}), *(quote(a) for a in args)))
        raise StuckState(f"cannot apply {f!r}")


def eval_bigstep(e: Term, env: Optional[dict] = None, fuel: int = 10**6):
    """Evaluate ``e`` after substituting the environment's values for its free variables."""
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))
    env = env or {}
    return BigStep(fuel).eval(subst_many(e, {k: quote(v) for k, v in env.items()}))
