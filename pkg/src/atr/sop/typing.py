"""Typing of polynomials in the standard, size and time-complexity modes."""

from __future__ import annotations

from ..errors import SopTypeError
from ..labels import DIA, EPS, DIAMOND, Label, label_join
from ..typecheck import find_instance
from ..types import Arrow, Base, drop_args, format_type, subtype, type_tail
from .poly import Ap, Lam, Max, Pair, PC, Pi1, Pi2, Plus, QC, RC, RIter, Succ, Tally, Times, V, spine
from .types import COST, CostT, Prod, _Fn, format_size_type

MODES = ("standard", "size", "tc")


def _computational_above(l: Label) -> Label:
    return l if l.side == DIA else l.succ()


def _erase(t):
    if isinstance(t, Base):
        return Base(EPS)
    if isinstance(t, Arrow):
        return Arrow(tuple(_erase(a) for a in t.args), _erase(t.result))
    if isinstance(t, Prod):
        return Prod(_erase(t.left), _erase(t.right))
    if isinstance(t, _Fn):
        return _Fn(_erase(t.arg), _erase(t.result))
    return t


def sop_typecheck(sigma: dict, p, mode: str = "size", expected=None):
    """Synthesize the least type of ``p``; with ``expected``, check against it."""
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    sig = {k: (_erase(v) if mode == "standard" else v) for k, v in sigma.items()}
    t = _Synth(mode).synth(p, sig)
    if expected is not None:
        want = _erase(expected) if mode == "standard" else expected
        if not _fits(t, want):
            raise SopTypeError(f"[Subsumption] {p} has type {format_size_type(t)}, "
                               f"not below {format_size_type(want)}")
        return want
    return t


def _fits(t, want) -> bool:
    if isinstance(t, (Base, Arrow)) and isinstance(want, (Base, Arrow)):
        return subtype(t, want) or find_instance(t, list(want.args)) is not None \
            if isinstance(t, Arrow) and isinstance(want, Arrow) else subtype(t, want)
    if isinstance(t, Prod) and isinstance(want, Prod):
        return _fits(t.left, want.left) and _fits(t.right, want.right)
    return t == want


class _Synth:
    def __init__(self, mode: str):
        self.mode = mode

    def err(self, rule, msg):
        raise SopTypeError(f"[{rule}] {msg}")

    def synth(self, p, sig):
        m = self.mode
        if isinstance(p, Tally):
            if p.n == 0 or m == "standard":
                return Base(EPS)
            return Base(DIAMOND)
        if isinstance(p, V):
            if p.name not in sig:
                self.err("Id-I", f"|{p.name}| is not in the context")
            return sig[p.name]
        if isinstance(p, PC):
            return self._lookup(p.name, sig)
        if isinstance(p, (QC, RC)):
            ty = self._lookup(p.name, sig)
            if not isinstance(ty, Arrow):
                return ty
            b = ty.result.label
            rest = tuple(a for a in ty.args if type_tail(a) != b)
            return Arrow(rest, ty.result) if rest else ty.result
        if isinstance(p, (Max, Plus, Times)):
            return self._arith(p, sig)
        if isinstance(p, Ap):
            return self._app(p, sig)
        if isinstance(p, Lam):
            if p.ty is None:
                self.err("→-I", f"λ|{p.name}| needs a type annotation")
            ty = _erase(p.ty) if m == "standard" else p.ty
            body = self.synth(p.body, {**sig, p.name: ty})
            if isinstance(body, (Base, Arrow)) and isinstance(ty, (Base, Arrow)):
                return Arrow((ty,), body)
            return _Fn(ty, body)
        if isinstance(p, Pair):
            if m != "tc":
                self.err("×-I", "pairs only occur in time-complexity polynomials")
            return Prod(self.synth(p.a, sig), self.synth(p.b, sig))
        if isinstance(p, (Pi1, Pi2)):
            t = self.synth(p.a, sig)
            if not isinstance(t, Prod):
                self.err("×-E", f"projection of a non-pair {p.a}")
            return t.left if isinstance(p, Pi1) else t.right
        if isinstance(p, Succ):
            t = self.synth(p.a, sig)
            if not isinstance(t, Base):
                self.err("s-I", "successor of a non-tally")
            return Base(_computational_above(t.label)) if m == "size" else t
        if isinstance(p, RIter):
            return self._iter(p, sig)
        self.err("syntax", f"unknown polynomial {p!r}")

    def _lookup(self, name, sig):
        if name not in sig:
            self.err("Id-I", f"|{name}| is not in the context")
        return sig[name]

    def _arith(self, p, sig):
        a, b = self.synth(p.a, sig), self.synth(p.b, sig)
        return self._combine(p, a, b)

    def _combine(self, p, a, b):
        rule = {Max: "∨-I", Plus: "+-I", Times: "*-I"}[type(p)]
        if isinstance(a, CostT) or isinstance(b, CostT):
            if self.mode != "tc":
                self.err(rule, "cost components only occur in tc mode")
            return COST
        if isinstance(a, Prod) and isinstance(b, Prod):
            if self.mode != "tc":
                self.err(rule, "componentwise arithmetic needs tc mode")
            return Prod(self._combine(p, a.left, b.left), self._combine(p, a.right, b.right))
        if isinstance(a, Base) and isinstance(b, Base):
            if self.mode == "standard":
                return Base(EPS)
            l = label_join(a.label, b.label)
            if isinstance(p, Max):
                return Base(l)
            return Base(_computational_above(l))
        if self.mode == "tc" and isinstance(a, (Arrow, _Fn)) and a == b:
            return a
        self.err(rule, f"operands of {p} have incompatible types")

    def _app(self, p, sig):
        h, args = spine(p)
        ht = self.synth(h, sig)
        for a in args:
            at = self.synth(a, sig)
            if isinstance(ht, _Fn):
                if not _fits(at, ht.arg):
                    self.err("→-E", f"argument {a} does not fit {format_size_type(ht.arg)}")
                ht = ht.result
                continue
            if not isinstance(ht, Arrow):
                self.err("→-E", f"{h} is applied to too many arguments")
            param = ht.args[0]
            if not (isinstance(at, (Base, Arrow)) and subtype(at, param)):
                if self.mode == "standard":
                    self.err("→-E", f"argument {a} has the wrong shape")
                inst = find_instance(ht, [at]) if isinstance(at, (Base, Arrow)) else None
                if inst is None:
                    self.err("→-E", f"argument {a} : {format_size_type(at)} does not fit "
                                    f"{format_size_type(param)} even after a shift")
                ht = inst
            ht = drop_args(ht, 1)
        return ht

    def _iter(self, p, sig):
        ft = self.synth(p.f, sig)
        mt = self.synth(p.m, sig)
        nt = self.synth(p.n, sig)
        if not (isinstance(ft, Arrow) and len(ft.args) == 1 and isinstance(ft.result, Base)):
            self.err("R-I", "iterated function must have type T→T")
        if self.mode == "standard":
            return Base(EPS)
        lp = ft.args[0].label
        if not ft.result.label <= lp:
            self.err("R-I", "iterated function must be an endomap up to subsumption")
        if lp.index == 0:
            self.err("R-I", "iteration at T@e has no predecessor label")
        l = Label.from_index(lp.index - 1)
        if not (isinstance(mt, Base) and mt.label <= l):
            self.err("R-I", f"iteration count must have label at most {l.ascii()}")
        if not (isinstance(nt, Base) and nt.label <= lp):
            self.err("R-I", f"start value must have label at most {lp.ascii()}")
        return Base(lp)
