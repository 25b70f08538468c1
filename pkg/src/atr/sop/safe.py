"""Strict, chary and manifestly safe polynomials.

A polynomial is manifestly safe at a base label ``b`` when it can be read
as ``q ⊙ (r1 ∨ ... ∨ y1 ∨ ...)``: ``q`` strict (every unshadowed variable
has a tail below ``b``), each ``r`` a chary application of a variable whose
result label is ``b`` to strict arguments, and each ``y`` a variable of
type ``T_b``.  The connective ``⊙`` is ``+`` on the ◇ side and ``∨`` on the
□ side.  ``decompose`` recognizes such readings structurally, rebalancing
sums and maxima along the way.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..errors import SubstitutionFailure
from ..labels import DIA, Label
from ..types import Arrow, Base, is_flat, type_tail
from .normal import beta_normalize, operator_type, shadowed_positions
from .poly import (
    Ap, Lam, Max, PC, Plus, Poly, QC, RC, Tally, Times, V, ZERO, fresh_name, free_vars, plus,
    spine, subst, times, total, vmax,
)


@dataclass(frozen=True)
class SafeForm:
    label: Label
    q: Poly = ZERO
    r: tuple = ()
    ys: tuple = ()
    params: tuple = field(default=(), compare=False)

    @property
    def computational(self) -> bool:
        return self.label.side == DIA

    @property
    def connective(self) -> str:
        return "+" if self.computational else "\\/"

    @property
    def strict(self) -> bool:
        return not self.r and not self.ys

    def body(self) -> Poly:
        rest = list(self.r) + [V(y) for y in self.ys]
        return total(self.q, rest, self.computational)

    def to_poly(self) -> Poly:
        out = self.body()
        for name, ty in reversed(self.params):
            out = Lam(name, ty, out)
        return out

    def join(self, other: "SafeForm") -> "SafeForm":
        return SafeForm(self.label, vmax(self.q, other.q), _union(self.r, other.r),
                        tuple(sorted(set(self.ys) | set(other.ys))))

    def add_strict(self, extra: Poly) -> "SafeForm":
        q = plus(self.q, extra) if self.computational else vmax(self.q, extra)
        return SafeForm(self.label, q, self.r, self.ys, self.params)

    def to_json(self) -> dict:
        return {"label": self.label.ascii(), "q": str(self.q), "r": [str(x) for x in self.r],
                "tail_vars": list(self.ys), "connective": self.connective}


@dataclass(frozen=True)
class NotSafe:
    reason: str

    def __bool__(self) -> bool:
        return False


def _union(a: tuple, b: tuple) -> tuple:
    out = list(a)
    seen = set(a)
    for x in b:
        if x not in seen:
            seen.add(x)
            out.append(x)
    return tuple(out)


def strict_form(label: Label, q: Poly) -> SafeForm:
    return SafeForm(label, q)


class Decomposer:
    """Structural recognizer of manifestly safe shapes, memoized per instance."""

    def __init__(self, sigma: dict):
        self.sigma = sigma
        self.memo = {}

    def __call__(self, p: Poly, b: Label) -> Optional[SafeForm]:
        key = (id(p), b.index)
        if key in self.memo:
            return self.memo[key][0]
        out = self._go(p, b)
        self.memo[key] = (out, p)
        return out

    def strict(self, p: Poly, b: Label) -> bool:
        sf = self(p, b)
        return sf is not None and sf.strict

    def _go(self, p: Poly, b: Label) -> Optional[SafeForm]:
        if isinstance(p, Tally):
            return SafeForm(b, p)
        if isinstance(p, V):
            ty = self.sigma.get(p.name)
            if not isinstance(ty, Base):
                return None
            if ty.label < b:
                return SafeForm(b, p)
            if ty.label == b:
                return SafeForm(b, ZERO, (), (p.name,))
            return None
        if isinstance(p, Max):
            sa, sb = self(p.a, b), self(p.b, b)
            if sa is None or sb is None:
                return None
            return sa.join(sb)
        if isinstance(p, Plus):
            sa, sb = self(p.a, b), self(p.b, b)
            if sa is None or sb is None:
                return None
            if sa.strict and sb.strict:
                return SafeForm(b, plus(sa.q, sb.q))
            if b.side != DIA:
                return None
            if sa.strict:
                return SafeForm(b, plus(sa.q, sb.q), sb.r, sb.ys)
            if sb.strict:
                return SafeForm(b, plus(sa.q, sb.q), sa.r, sa.ys)
            return None
        if isinstance(p, Times):
            if self.strict(p.a, b) and self.strict(p.b, b):
                return SafeForm(b, p)
            return None
        if isinstance(p, (Ap, PC, QC, RC)):
            return self._app(p, b)
        return None

    def _app(self, p: Ap, b: Label) -> Optional[SafeForm]:
        h, args = spine(p)
        ty = operator_type(h, self.sigma)
        if isinstance(ty, Base) and not args:
            l = ty.label
        elif not isinstance(ty, Arrow) or len(args) != len(ty.args):
            return None
        else:
            shadow = shadowed_positions(ty)
            for j, a in enumerate(args):
                if j not in shadow and not self.strict(a, b):
                    return None
            l = ty.result.label
        if l < b:
            return SafeForm(b, p)
        if l > b:
            return None
        if isinstance(h, QC):
            return SafeForm(b, p)
        if isinstance(h, RC):
            return SafeForm(b, ZERO, (p,))
        if is_flat(ty):
            return None
        return SafeForm(b, ZERO, (p,))


def decompose(p: Poly, sigma: dict, b: Label) -> Optional[SafeForm]:
    return Decomposer(sigma)(p, b)


def _peel(p: Poly, sigma: dict, gamma):
    """Strip (or η-introduce) the λ-prefix matching ``gamma``'s arguments."""
    sig = dict(sigma)
    params = []
    if isinstance(gamma, Arrow):
        for ty in gamma.args:
            if isinstance(p, Lam):
                name = p.name
                params.append((name, p.ty or ty))
                sig[name] = p.ty or ty
                p = p.body
            else:
                name = fresh_name("x", set(sig) | free_vars(p))
                lvl = 1 if isinstance(ty, Arrow) else 0
                params.append((name, ty))
                sig[name] = ty
                p = Ap(p, V(name, lvl))
        p = beta_normalize(p)
        res = gamma.result
    else:
        res = gamma
    return p, sig, params, res


def classify_safe(p: Poly, sigma: dict, gamma):
    """A ``SafeForm`` if ``p`` is manifestly ``gamma``-safe under ``sigma``, else ``NotSafe``."""
    body, sig, params, res = _peel(p, sigma, gamma)
    sf = decompose(body, sig, res.label)
    if sf is None:
        return NotSafe(f"no manifestly safe reading at T@{res.label.ascii()}")
    return SafeForm(sf.label, sf.q, sf.r, sf.ys, tuple(params))


def max_tail_index(p: Poly, sigma: dict) -> int:
    best = 0
    for n in free_vars(p):
        ty = sigma.get(n)
        if ty is not None:
            best = max(best, type_tail(ty).index)
    return best


def poly_label(p: Poly, sigma: dict, at_least: Optional[Label] = None) -> Optional[Label]:
    """Least label at which ``p`` is manifestly safe."""
    dec = Decomposer(sigma)
    lo = at_least.index if at_least is not None else 0
    for i in range(lo, max(lo, max_tail_index(p, sigma)) + 4):
        if dec(p, Label.from_index(i)) is not None:
            return Label.from_index(i)
    return None


def safe_substitute(p0: Poly, x: str, p1: Poly, sigma: dict, gamma=None) -> Poly:
    """Manifestly safe form dominating ``p0[x <- p1]``."""
    if x not in free_vars(p0):
        return p0
    sig_ty = sigma.get(x)
    if sig_ty is None:
        raise SubstitutionFailure(f"|{x}| has no type")
    if gamma is None:
        gamma = Base(poly_label(p0, sigma) or _fail(f"{p0} is not manifestly safe"))
    if isinstance(gamma, Arrow):
        raise SubstitutionFailure("substitution target must have base type")
    b = gamma.label
    if isinstance(sig_ty, Arrow):
        out = beta_normalize(subst(p0, {x: p1}))
        sf = decompose(out, sigma, b)
        if sf is None:
            raise SubstitutionFailure(f"result {out} is not manifestly safe")
        return sf.to_poly()
    sf0 = decompose(p0, sigma, b)
    if sf0 is None:
        raise SubstitutionFailure(f"{p0} is not manifestly safe at T@{b.ascii()}")
    sf1 = decompose(p1, sigma, sig_ty.label)
    if sf1 is None:
        raise SubstitutionFailure(f"{p1} is not manifestly safe at T@{sig_ty.label.ascii()}")
    tot1 = sf1.to_poly()
    q = subst(sf0.q, {x: tot1})
    r = tuple(subst(t, {x: tot1}) for t in sf0.r)
    ys = tuple(y for y in sf0.ys if y != x)
    res = SafeForm(b, q, r, ys)
    if x in sf0.ys:
        if sig_ty.label == b:
            res = SafeForm(b, q, _union(r, sf1.r), tuple(sorted(set(ys) | set(sf1.ys))))
            res = res.add_strict(sf1.q)
        else:
            res = res.add_strict(tot1)
    out = res.to_poly()
    if decompose(out, sigma, b) is None:
        raise SubstitutionFailure(f"result {out} is not manifestly safe")
    return out


def _fail(msg):
    raise SubstitutionFailure(msg)
