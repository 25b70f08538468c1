"""Evaluation of polynomials over natural numbers with finite length grids.

Level-1 variables are bound to ``GridFn`` objects.  A grid function knows
its type, so the p, q and r combinators can be instantiated from it: ``p``
saturates the impredicative coordinates at the top of the grid, ``q`` reads
the certified deficit table produced by environment validation, and ``r``
is constantly zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

from ..errors import GridExceeded, UnvalidatedCombinator
from ..oracle import DEFAULT_LMAX, OracleTable, _oracle_length, impredicative_positions
from ..types import Arrow, Base
from .poly import (
    Ap, Lam, Max, Pair, PC, Pi1, Pi2, Plus, Poly, QC, RC, RIter, Succ, Tally, Times, V, spine,
)

ITER_CAP_FACTOR = 8


def exact_length(f: OracleTable, lens: tuple) -> int:
    """``|f|(lens)`` without a grid limit (tables saturate, rules are closed forms)."""
    if f.rule is None and not f.fixed:
        return _oracle_length(f, tuple(lens))
    if f.rule == "identity":
        return lens[-1]
    if f.rule == "double":
        return 2 * lens[-1]
    if f.rule == "const":
        return 0
    return _oracle_length(f, tuple(lens))


@dataclass
class GridFn:
    """A monotone length function of a first-order type."""

    name: str
    ty: Arrow
    fn: Callable[[tuple], int]
    L_max: int = DEFAULT_LMAX
    clamp: bool = True
    q_table: Optional[dict] = None
    cache: dict = field(default_factory=dict, repr=False)

    @property
    def arity(self) -> int:
        return len(self.ty.args)

    def _c(self, args) -> tuple:
        if self.clamp:
            return tuple(min(max(int(a), 0), self.L_max) for a in args)
        return tuple(int(a) for a in args)

    def __call__(self, *args) -> int:
        key = self._c(args)
        hit = self.cache.get(key)
        if hit is None:
            hit = self.cache[key] = self.fn(key)
        return hit

    def p(self, *args) -> int:
        imp = impredicative_positions(self.ty)
        if not imp:
            return self(*args)
        args = list(args)
        for i in imp:
            args[i] = self.L_max
        return self(*args)

    @property
    def tail_positions(self) -> list:
        b = self.ty.result.label
        return [i for i, a in enumerate(self.ty.args) if a.label == b]

    @property
    def rest_arity(self) -> int:
        return self.arity - len(self.tail_positions)

    def q(self, *args) -> int:
        if self.q_table is None:
            if not self.tail_positions:
                return 0
            raise UnvalidatedCombinator(f"no certified decomposition for {self.name}")
        key = tuple(min(max(int(a), 0), self.L_max) for a in args)
        return self.q_table[key]

    def r(self, *args) -> int:
        if self.q_table is None and self.tail_positions:
            raise UnvalidatedCombinator(f"no certified decomposition for {self.name}")
        return 0

    @staticmethod
    def from_table(name: str, ty: Arrow, table: dict, L_max: int = DEFAULT_LMAX,
                   q_table: Optional[dict] = None) -> "GridFn":
        return GridFn(name, ty, lambda a: table[a], L_max, True, q_table)

    @staticmethod
    def from_oracle(f: OracleTable, ty: Arrow, L_max: int = DEFAULT_LMAX,
                    q_table: Optional[dict] = None) -> "GridFn":
        return GridFn(f.name, ty, lambda a: exact_length(f, a), L_max, False, q_table)


@dataclass
class Curried:
    fn: Callable
    arity: int
    args: tuple = ()

    def apply(self, v):
        args = self.args + (v,)
        if len(args) == self.arity:
            return self.fn(*args)
        return Curried(self.fn, self.arity, args)


def _wrap(v):
    if isinstance(v, GridFn):
        return Curried(v, v.arity)
    return v


def _call(f, v):
    if isinstance(f, Curried):
        return f.apply(v)
    if callable(f):
        return f(v)
    raise TypeError(f"cannot apply {f!r}")


def _arith(op, a, b):
    if isinstance(a, tuple) and isinstance(b, tuple):
        return tuple(_arith(op, x, y) for x, y in zip(a, b))
    if isinstance(a, int) and isinstance(b, int):
        return op(a, b)
    if callable(a) or callable(b) or isinstance(a, Curried) or isinstance(b, Curried):
        return lambda v: _arith(op, _call(a, v), _call(b, v))
    raise TypeError(f"arithmetic on mismatched values {a!r}, {b!r}")


_OPS = {Max: max, Plus: lambda x, y: x + y, Times: lambda x, y: x * y}


def sop_eval(p: Poly, env: dict, L_max: int = DEFAULT_LMAX):
    """Value of ``p`` where ``env`` maps variable names to numbers or grid functions."""
    memo = {}

    def go(x, local):
        if not local:
            hit = memo.get(id(x))
            if hit is not None:
                return hit[0]
        out = ev(x, local)
        if not local:
            memo[id(x)] = (out, x)
        return out

    def lookup(name, local):
        if name in local:
            return local[name]
        if name not in env:
            raise KeyError(f"no value for |{name}|")
        return env[name]

    def ev(x, local):
        if isinstance(x, Tally):
            return x.n
        if isinstance(x, V):
            return _wrap(lookup(x.name, local))
        if isinstance(x, (Max, Plus, Times)):
            return _arith(_OPS[type(x)], go(x.a, local), go(x.b, local))
        if isinstance(x, Ap):
            h, args = spine(x)
            f = go(h, local)
            for a in args:
                f = _call(f, go(a, local))
            return f
        if isinstance(x, PC):
            g = lookup(x.name, local)
            return Curried(g.p, g.arity) if isinstance(g, GridFn) else g
        if isinstance(x, QC):
            g = lookup(x.name, local)
            if not isinstance(g, GridFn):
                return 0
            return g.q() if g.rest_arity == 0 else Curried(g.q, g.rest_arity)
        if isinstance(x, RC):
            g = lookup(x.name, local)
            if not isinstance(g, GridFn):
                return g
            return g.r() if g.rest_arity == 0 else Curried(g.r, g.rest_arity)
        if isinstance(x, Lam):
            return lambda v, x=x, local=local: go(x.body, {**local, x.name: v})
        if isinstance(x, Pair):
            return (go(x.a, local), go(x.b, local))
        if isinstance(x, Pi1):
            return go(x.a, local)[0]
        if isinstance(x, Pi2):
            return go(x.a, local)[1]
        if isinstance(x, Succ):
            return go(x.a, local) + 1
        if isinstance(x, RIter):
            f, m, n = go(x.f, local), go(x.m, local), go(x.n, local)
            if m > ITER_CAP_FACTOR * L_max:
                raise GridExceeded(f"iteration count {m} exceeds {ITER_CAP_FACTOR * L_max}")
            for _ in range(m):
                n = _call(f, n)
            return n
        raise TypeError(f"unknown polynomial {x!r}")

    return go(p, {})


def length_env(values: dict, gamma: dict, L_max: int = DEFAULT_LMAX,
               q_tables: Optional[dict] = None) -> dict:
    """``|ρ|``: lengths of strings and grid functions of oracles."""
    out = {}
    q_tables = q_tables or {}
    for name, v in values.items():
        if isinstance(v, str):
            out[name] = len(v)
        elif isinstance(v, OracleTable):
            ty = gamma.get(name)
            if not isinstance(ty, Arrow):
                ty = Arrow(tuple(Base(_eps()) for _ in range(v.remaining)), Base(_eps()))
            out[name] = GridFn.from_oracle(v, ty, L_max, q_tables.get(name))
        else:
            out[name] = v
    return out


def _eps():
    from ..labels import EPS
    return EPS
