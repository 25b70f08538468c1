"""GR terms: safe bounds and a random generator of flat-variable-free instances."""

from __future__ import annotations

import random
from typing import Optional

from ..errors import ExtractionFailure, FlatVarError
from ..labels import DIA, EPS, Label
from ..types import Arrow, Base, is_flat
from .normal import beta_normalize, shadowed_positions
from .poly import (
    Ap, Lam, Max, PC, Plus, Poly, RIter, Succ, Tally, Times, V, ZERO, apply, free_vars, plus,
    spine, times, vmax,
)
from .safe import Decomposer, SafeForm, _peel, _union


def _check_flat_free(s: Poly, sigma: dict):
    seen = set()
    stack = [(s, dict(sigma))]
    while stack:
        x, sig = stack.pop()
        if id(x) in seen:
            continue
        seen.add(id(x))
        if isinstance(x, V):
            ty = sig.get(x.name)
            if is_flat(ty):
                raise FlatVarError(f"|{x.name}| has flat type")
        if isinstance(x, Lam):
            inner = dict(sig)
            if x.ty is not None:
                if is_flat(x.ty):
                    raise FlatVarError(f"bound |{x.name}| has flat type")
                inner[x.name] = x.ty
            stack.append((x.body, inner))
            continue
        for k in x.kids:
            stack.append((k, sig))


class _GrBound:
    def __init__(self, sigma: dict):
        self.sigma = sigma

    def sf(self, s: Poly, b: Label) -> SafeForm:
        if isinstance(s, Tally):
            return SafeForm(b, s)
        if isinstance(s, V):
            ty = self.sigma.get(s.name)
            if not isinstance(ty, Base):
                raise ExtractionFailure(f"|{s.name}| is not a base variable")
            if ty.label < b:
                return SafeForm(b, s)
            if ty.label == b:
                return SafeForm(b, ZERO, (), (s.name,))
            raise ExtractionFailure(f"|{s.name}| lies above T@{b.ascii()}")
        if isinstance(s, Max):
            return self.sf(s.a, b).join(self.sf(s.b, b))
        if isinstance(s, Succ):
            inner = self.sf(s.a, b)
            if b.side == DIA:
                return inner.add_strict(Tally(1))
            return SafeForm(b, plus(inner.to_poly(), Tally(1)))
        if isinstance(s, (Plus, Times)):
            sa, sb = self.sf(s.a, b), self.sf(s.b, b)
            dec = Decomposer(self.sigma)(type(s)(sa.to_poly(), sb.to_poly()), b)
            if dec is None:
                raise ExtractionFailure(f"{s} has no safe bound at T@{b.ascii()}")
            return dec
        if isinstance(s, Ap):
            return self._app(s, b)
        if isinstance(s, RIter):
            return self._iter(s, b)
        raise ExtractionFailure(f"cannot bound {s}")

    def _app(self, s, b):
        h, args = spine(s)
        if not isinstance(h, V):
            raise ExtractionFailure(f"application head {h} is not a variable after normalization")
        ty = self.sigma.get(h.name)
        if not isinstance(ty, Arrow) or len(ty.args) != len(args):
            raise ExtractionFailure(f"|{h.name}| is not fully applied")
        shadow = shadowed_positions(ty)
        new = []
        for j, (a, pty) in enumerate(zip(args, ty.args)):
            if j in shadow:
                new.append(ZERO)
            else:
                new.append(self.sf(a, pty.label).to_poly())
        app = apply(PC(h.name), *new)
        l = ty.result.label
        if l < b:
            return SafeForm(b, app)
        if l == b:
            return SafeForm(b, ZERO, (app,))
        raise ExtractionFailure(f"|{h.name}| yields T@{l.ascii()} above T@{b.ascii()}")

    def _iter(self, s, b):
        f = s.f
        if not isinstance(f, Lam):
            raise FlatVarError("iterated function must be a λ-abstraction")
        z = f.name
        inner = _GrBound({**self.sigma, z: Base(b)})
        s0 = inner.sf(f.body, b)
        s2 = self.sf(s.n, b)
        if b.index == 0:
            raise ExtractionFailure("iteration at T@e")
        below = Label.from_index(b.index - 1)
        p1 = self.sf(s.m, below).to_poly()
        if z not in s0.ys and z not in free_vars(s0.q) and not any(z in free_vars(r) for r in s0.r):
            return s0.join(s2)
        ys = tuple(sorted((set(s0.ys) - {z}) | set(s2.ys)))
        r = _union(s0.r, s2.r)
        if b.side == DIA:
            q = plus(times(p1, s0.q), s2.q)
        else:
            q = vmax(s0.q, s2.q)
        return SafeForm(b, q, r, ys)


def gr_safe_bound(s: Poly, sigma: dict, gamma=None) -> Poly:
    """A manifestly safe polynomial dominating the GR term ``s``."""
    _check_flat_free(s, sigma)
    if gamma is None:
        from .typing import sop_typecheck
        gamma = sop_typecheck(sigma, s, "size")
    body, sig, params, res = _peel(beta_normalize(s), sigma, gamma)
    sf = _GrBound(sig).sf(body, res.label)
    return SafeForm(sf.label, sf.q, sf.r, sf.ys, tuple(params)).to_poly()


# random instances -----------------------------------------------------------

GR_SIGMA = {
    "x": Base(EPS),
    "y": Base(Label.from_index(1)),
    "m": Base(Label.from_index(2)),
    "w": Base(Label.from_index(3)),
    "g": Arrow((Base(Label.from_index(1)),), Base(Label.from_index(2))),
    "h": Arrow((Base(EPS),), Base(Label.from_index(1))),
}


def random_gr(rng: random.Random, depth: int = 3, sigma: Optional[dict] = None,
              target: Optional[Label] = None) -> tuple:
    """A random well-typed, flat-variable-free GR term and its target label."""
    sigma = dict(sigma or GR_SIGMA)
    if target is None:
        target = Label.from_index(rng.randint(1, 3))
    counter = [0]

    def leaf(l, sig):
        opts = [Tally(0)] + [V(n) for n, t in sig.items() if isinstance(t, Base) and t.label <= l]
        if l.index >= 1:
            opts.append(Tally(rng.randint(1, 2)))
        return rng.choice(opts)

    def gen(l, d, sig):
        if d <= 0:
            return leaf(l, sig)
        choices = ["leaf", "max"]
        if l.side == DIA:
            choices.append("succ")
        fns = [n for n, t in sig.items() if isinstance(t, Arrow) and t.result.label <= l]
        if fns:
            choices.append("app")
        if l.index >= 1:
            choices.append("iter")
        c = rng.choice(choices)
        if c == "leaf":
            return leaf(l, sig)
        if c == "max":
            return Max(gen(l, d - 1, sig), gen(l, d - 1, sig))
        if c == "succ":
            return Succ(gen(l, d - 1, sig))
        if c == "app":
            fn = rng.choice(fns)
            ty = sig[fn]
            return apply(V(fn, 1), *(gen(a.label, d - 1, sig) for a in ty.args))
        below = Label.from_index(l.index - 1)
        counter[0] += 1
        z = f"z{counter[0]}"
        body = gen(l, d - 1, {**sig, z: Base(l)})
        return RIter(Lam(z, Base(l), body), gen(below, d - 1, sig), gen(l, d - 1, sig))

    return gen(target, depth, sigma), target
