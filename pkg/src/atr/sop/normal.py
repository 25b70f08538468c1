"""β-normalization, application depth and shadowed occurrences."""

from __future__ import annotations

from typing import Optional

from ..types import Arrow, Base, args_of, type_tail
from .poly import (
    Ap, Lam, Pair, PC, Pi1, Pi2, Poly, QC, RC, Tally, V, _Cmb, apply, rebuild, spine, subst,
)


def beta_normalize(p: Poly) -> Poly:
    memo = {}

    def go(x):
        hit = memo.get(id(x))
        if hit is not None:
            return hit[0]
        out = step(x)
        memo[id(x)] = (out, x)
        return out

    def step(x):
        if isinstance(x, Ap):
            h = go(x.a)
            a = go(x.b)
            if isinstance(h, Lam):
                return go(subst(h.body, {h.name: a}))
            return Ap(h, a)
        if isinstance(x, Pi1):
            a = go(x.a)
            return a.a if isinstance(a, Pair) else Pi1(a)
        if isinstance(x, Pi2):
            a = go(x.a)
            return a.b if isinstance(a, Pair) else Pi2(a)
        if isinstance(x, Lam):
            return Lam(x.name, x.ty, go(x.body))
        if x.kids:
            return rebuild(x, [go(k) for k in x.kids])
        return x

    return go(p)


def _level(x: Poly, sigma: Optional[dict]) -> int:
    if sigma and x.name in sigma:
        return 1 if isinstance(sigma[x.name], Arrow) else 0
    if isinstance(x, V):
        return x.level
    return 1


def sop_depth(p: Poly, sigma: Optional[dict] = None) -> int:
    """Deepest nesting of applications in the β-normal form.

    A level-l variable on its own has depth l; an application headed by a
    variable or combinator adds one to the depth of its deepest argument.
    """
    n = beta_normalize(p)
    memo = {}

    def go(x):
        if id(x) in memo:
            return memo[id(x)]
        if isinstance(x, Ap):
            h, args = spine(x)
            inner = max((go(a) for a in args), default=0)
            out = max(go(h), 1 + inner) if isinstance(h, (V, _Cmb)) else max(go(h), inner)
        elif isinstance(x, (V, _Cmb)):
            out = _level(x, sigma)
        elif isinstance(x, Lam):
            out = go(x.body)
        else:
            out = max((go(k) for k in x.kids), default=0)
        memo[id(x)] = out
        return out

    return go(n)


def operator_type(h: Poly, sigma: dict):
    """Type of an application head that is a variable or combinator, else None."""
    if isinstance(h, V) or isinstance(h, PC):
        return sigma.get(h.name)
    if isinstance(h, (QC, RC)):
        ty = sigma.get(h.name)
        if not isinstance(ty, Arrow):
            return None
        b = ty.result.label
        rest = tuple(a for a in ty.args if type_tail(a) != b)
        return Arrow(rest, ty.result) if rest else ty.result
    return None


def shadowed_positions(ty) -> set:
    """Argument positions of an operator type whose tail lies above the result's."""
    if not isinstance(ty, Arrow):
        return set()
    b = ty.result.label
    return {i for i, a in enumerate(ty.args) if type_tail(a) > b}


def shadowed_occurrences(p: Poly, sigma: dict) -> set:
    """Paths (tuples of child indices) of all subterm occurrences that are shadowed.

    An occurrence is shadowed when it appears as, or inside, an argument at
    an impredicative position of a variable or combinator application.
    """
    out = set()

    def mark_all(x, path):
        out.add(path)
        for i, k in enumerate(x.kids):
            mark_all(k, path + (i,))

    def walk(x, path, sig):
        if isinstance(x, Ap):
            h, args = spine(x)
            ty = operator_type(h, sig)
            shadow = shadowed_positions(ty)
            # the spine h a1 .. ak is nested as Ap(Ap(h, a1), a2) ...; recover the paths
            k = len(args)
            for j, a in enumerate(args):
                apath = path + (0,) * (k - 1 - j) + (1,)
                if j in shadow:
                    mark_all(a, apath)
                else:
                    walk(a, apath, sig)
            walk(h, path + (0,) * k, sig)
            return
        if isinstance(x, Lam):
            inner = dict(sig)
            if x.ty is not None:
                inner[x.name] = x.ty
            walk(x.body, path + (0,), inner)
            return
        for i, kid in enumerate(x.kids):
            walk(kid, path + (i,), sig)

    walk(p, (), dict(sigma))
    return out


def subterm_at(p: Poly, path: tuple) -> Poly:
    for i in path:
        p = p.kids[i]
    return p
