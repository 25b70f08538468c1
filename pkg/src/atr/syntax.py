"""Abstract syntax shared by PCF, BCL, BCL′ and ATR, plus purely syntactic analyses."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterator, Optional

from .types import AtrType, format_type

OPS = ("c0", "c1", "d", "t0", "t1")

DAGGER = math.inf  # the "unbounded" use count


@dataclass(frozen=True)
class Term:
    pass


def _pos():
    return field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Const(Term):
    value: str
    pos: Optional[tuple] = _pos()


@dataclass(frozen=True)
class Var(Term):
    name: str
    pos: Optional[tuple] = _pos()


@dataclass(frozen=True)
class Op(Term):
    op: str
    arg: Term
    pos: Optional[tuple] = _pos()


@dataclass(frozen=True)
class Down(Term):
    left: Term
    right: Term
    pos: Optional[tuple] = _pos()


@dataclass(frozen=True)
class If(Term):
    test: Term
    then: Term
    orelse: Term
    pos: Optional[tuple] = _pos()


@dataclass(frozen=True)
class Lam(Term):
    name: str
    ty: AtrType
    body: Term
    pos: Optional[tuple] = _pos()


@dataclass(frozen=True)
class App(Term):
    fn: Term
    arg: Term
    pos: Optional[tuple] = _pos()


@dataclass(frozen=True)
class Fix(Term):
    body: Term
    pos: Optional[tuple] = _pos()


@dataclass(frozen=True)
class Prn(Term):
    body: Term
    pos: Optional[tuple] = _pos()


@dataclass(frozen=True)
class Crec(Term):
    clock: str
    fname: str
    fty: AtrType
    body: Term
    pos: Optional[tuple] = _pos()


@dataclass(frozen=True)
class Let(Term):
    name: str
    ty: Optional[AtrType]
    bound: Term
    body: Term
    pos: Optional[tuple] = _pos()


@dataclass(frozen=True)
class LetRec(Term):
    name: str
    ty: AtrType
    bound: Term
    body: Term
    pos: Optional[tuple] = _pos()


@dataclass(frozen=True)
class Quote(Term):
    """A runtime value embedded in a term (used by substitution-based evaluation)."""

    value: object
    pos: Optional[tuple] = _pos()


def app(fn: Term, *args: Term) -> Term:
    for a in args:
        fn = App(fn, a)
    return fn


def lams(params, body: Term) -> Term:
    for name, ty in reversed(list(params)):
        body = Lam(name, ty, body)
    return body


def spine(t: Term) -> tuple[Term, list]:
    """Split ``h a1 ... ak`` into ``(h, [a1..ak])``."""
    args = []
    while isinstance(t, App):
        args.append(t.arg)
        t = t.fn
    return t, args[::-1]


def strip_lams(t: Term, limit: Optional[int] = None) -> tuple[list, Term]:
    params = []
    while isinstance(t, Lam) and (limit is None or len(params) < limit):
        params.append((t.name, t.ty))
        t = t.body
    return params, t


def children(t: Term) -> tuple:
    match t:
        case Op(_, a):
            return (a,)
        case Down(a, b) | App(a, b):
            return (a, b)
        case If(a, b, c):
            return (a, b, c)
        case Lam(_, _, b) | Fix(b) | Prn(b) | Crec(_, _, _, b):
            return (b,)
        case Let(_, _, a, b) | LetRec(_, _, a, b):
            return (a, b)
    return ()


def subterms(t: Term) -> Iterator[Term]:
    yield t
    for c in children(t):
        yield from subterms(c)


def free_vars(t: Term) -> frozenset:
    match t:
        case Var(n):
            return frozenset([n])
        case Lam(n, _, b):
            return free_vars(b) - {n}
        case Crec(_, f, _, b):
            return free_vars(b) - {f}
        case Let(n, _, a, b):
            return free_vars(a) | (free_vars(b) - {n})
        case LetRec(n, _, a, b):
            return (free_vars(a) | free_vars(b)) - {n}
    out = frozenset()
    for c in children(t):
        out |= free_vars(c)
    return out


_fresh_counter = itertools.count(1)


def fresh(base: str, avoid) -> str:
    stem = base.split("%")[0]
    while True:
        cand = f"{stem}%{next(_fresh_counter)}"
        if cand not in avoid:
            return cand


def subst(t: Term, name: str, repl: Term) -> Term:
    """Capture-avoiding ``t[name <- repl]``."""
    return subst_many(t, {name: repl})


def subst_many(t: Term, sigma: dict) -> Term:
    if not sigma:
        return t
    fv_repl = frozenset().union(*(free_vars(r) for r in sigma.values()))
    return _subst(t, sigma, fv_repl)


def _binder(name, body_list, sigma, fv_repl):
    """Handle a binder: drop shadowed names and rename to avoid capture."""
    sigma = {k: v for k, v in sigma.items() if k != name}
    if name in fv_repl and sigma:
        avoid = set(fv_repl)
        for b in body_list:
            avoid |= free_vars(b)
        new = fresh(name, avoid)
        body_list = [_subst(b, {name: Var(new)}, frozenset([new])) for b in body_list]
        name = new
    return name, body_list, sigma


def _subst(t: Term, sigma: dict, fv_repl: frozenset) -> Term:
    match t:
        case Var(n):
            return sigma.get(n, t)
        case Const() | Quote():
            return t
        case Op(o, a):
            return Op(o, _subst(a, sigma, fv_repl), t.pos)
        case Down(a, b):
            return Down(_subst(a, sigma, fv_repl), _subst(b, sigma, fv_repl), t.pos)
        case App(a, b):
            return App(_subst(a, sigma, fv_repl), _subst(b, sigma, fv_repl), t.pos)
        case If(a, b, c):
            return If(*(_subst(x, sigma, fv_repl) for x in (a, b, c)), t.pos)
        case Fix(b):
            return Fix(_subst(b, sigma, fv_repl), t.pos)
        case Prn(b):
            return Prn(_subst(b, sigma, fv_repl), t.pos)
        case Lam(n, ty, b):
            n, (b,), s = _binder(n, [b], sigma, fv_repl)
            return Lam(n, ty, _subst(b, s, fv_repl) if s else b, t.pos)
        case Crec(k, f, fty, b):
            f, (b,), s = _binder(f, [b], sigma, fv_repl)
            return Crec(k, f, fty, _subst(b, s, fv_repl) if s else b, t.pos)
        case Let(n, ty, a, b):
            a = _subst(a, sigma, fv_repl)
            n, (b,), s = _binder(n, [b], sigma, fv_repl)
            return Let(n, ty, a, _subst(b, s, fv_repl) if s else b, t.pos)
        case LetRec(n, ty, a, b):
            n, (a, b), s = _binder(n, [a, b], sigma, fv_repl)
            if s:
                a, b = _subst(a, s, fv_repl), _subst(b, s, fv_repl)
            return LetRec(n, ty, a, b, t.pos)
    raise TypeError(f"unknown term {t!r}")


LETREC_CLOCK = ""


def desugar(t: Term) -> Term:
    """Expand let by substitution and letrec into a crec with the unit clock."""
    match t:
        case Let(n, _, a, b):
            return desugar(subst(desugar(b), n, desugar(a)))
        case LetRec(n, ty, a, b):
            rec = Crec(LETREC_CLOCK, n, ty, desugar(a), t.pos)
            return subst(desugar(b), n, rec)
        case Var() | Const() | Quote():
            return t
        case Op(o, a):
            return Op(o, desugar(a), t.pos)
        case Down(a, b):
            return Down(desugar(a), desugar(b), t.pos)
        case App(a, b):
            return App(desugar(a), desugar(b), t.pos)
        case If(a, b, c):
            return If(desugar(a), desugar(b), desugar(c), t.pos)
        case Lam(n, ty, b):
            return Lam(n, ty, desugar(b), t.pos)
        case Fix(b):
            return Fix(desugar(b), t.pos)
        case Prn(b):
            return Prn(desugar(b), t.pos)
        case Crec(k, f, ty, b):
            return Crec(k, f, ty, desugar(b), t.pos)
    raise TypeError(f"unknown term {t!r}")


def uses(x: str, e: Term) -> float:
    """Use count of ``x`` in ``e``; ``DAGGER`` (infinity) marks unbounded use."""
    if x not in free_vars(e):
        return 0
    match e:
        case Var():
            return 1
        case Op(_, a) | Lam(_, _, a) | Prn(a):
            return uses(x, a)
        case Down(a, b) | App(a, b):
            return uses(x, a) + uses(x, b)
        case If(a, b, c):
            return uses(x, a) + max(uses(x, b), uses(x, c))
        case Crec() | Fix():
            return DAGGER
        case Let() | LetRec():
            return uses(x, desugar(e))
    raise TypeError(f"unknown term {e!r}")


def tail_pos(f: str, e: Term) -> bool:
    """Every free occurrence of ``f`` heads a call that is a tail term of ``e``."""

    def walk(t: Term, tail: bool) -> bool:
        if f not in free_vars(t):
            return True
        match t:
            case Var():
                return tail
            case Lam(_, _, b):
                return walk(b, tail)
            case If(a, b, c):
                return walk(a, False) and walk(b, tail) and walk(c, tail)
            case App():
                h, args = spine(t)
                if not all(walk(a, False) for a in args):
                    return False
                if isinstance(h, Var) and h.name == f:
                    return tail
                return walk(h, False)
        return all(walk(c, False) for c in children(t))

    return walk(e, True)


def size(t: Term) -> int:
    return sum(1 for _ in subterms(t))


def _q(s: str) -> str:
    return f'"{s}"' if s else "eps"


def pretty(t: Term) -> str:
    """Render in the concrete grammar; the output re-parses to an equal term."""
    match t:
        case Const(s):
            return _q(s)
        case Var(n):
            return n
        case Quote(v):
            return f"<{v}>"
        case Op(o, a):
            return f"({o} {pretty(a)})"
        case Down(a, b):
            return f"(down {pretty(a)} {pretty(b)})"
        case If(a, b, c):
            return f"(if {pretty(a)} then {pretty(b)} else {pretty(c)})"
        case Lam(n, ty, b):
            return f"(lam ({n} : {format_type(ty, True)}) . {pretty(b)})"
        case App(a, b):
            return f"({pretty(a)} {pretty(b)})"
        case Fix(b):
            return f"(fix {pretty(b)})"
        case Prn(b):
            return f"(prn {pretty(b)})"
        case Crec(k, f, ty, b):
            return f'(crec "{k}" (lamr ({f} : {format_type(ty, True)}) . {pretty(b)}))'
        case Let(n, ty, a, b):
            ann = f" : {format_type(ty, True)}" if ty is not None else ""
            return f"(let {n}{ann} = {pretty(a)} in {pretty(b)})"
        case LetRec(n, ty, a, b):
            return f"(letrec {n} : {format_type(ty, True)} = {pretty(a)} in {pretty(b)})"
    raise TypeError(f"unknown term {t!r}")
