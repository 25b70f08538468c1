"""Syntax-directed type checking for the PCF, BCL, BCL′ and ATR dialects.

``check`` synthesizes a minimal type bottom-up and inserts Shift and
Subsumption only where an elimination form needs them.  The result is a
``Derivation`` tree whose application nodes record the (possibly shifted)
head type that was used.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

from .errors import AffinityError, AtrTypeError, TailPosError
from .labels import BOX, DIA, EPS, DIAMOND, Label, label_join
from .syntax import (
    App, Const, Crec, Down, Fix, If, Lam, Let, LetRec, Op, Prn, Quote, Term, Var,
    free_vars, pretty, spine, tail_pos, uses,
)
from .types import (
    Arrow, AtrType, Base, drop_args, format_type, is_flat, shifts_to, subtype, type_level,
)

DIALECTS = ("pcf", "bcl", "bclp", "atr")
NORM = Base(EPS)
SAFE = Base(DIAMOND)
MAX_SHIFT = 12


@dataclass(frozen=True)
class Derivation:
    rule: str
    term: Term
    type: AtrType
    premises: tuple = ()
    info: dict = field(default_factory=dict, compare=False)

    def walk(self):
        yield self
        for p in self.premises:
            yield from p.walk()

    def render(self, indent: int = 0) -> str:
        pad = "  " * indent
        head = f"{pad}{self.rule}: {_short(self.term)} : {format_type(self.type, True)}"
        extra = []
        if "shifted" in self.info and self.info["shifted"] != self.info.get("head_type"):
            extra.append(f"shift {format_type(self.info['head_type'], True)} ~> "
                         f"{format_type(self.info['shifted'], True)}")
        lines = [head + (f"   [{'; '.join(extra)}]" if extra else "")]
        lines.extend(p.render(indent + 1) for p in self.premises)
        return "\n".join(lines)


def _short(t: Term, limit: int = 60) -> str:
    s = pretty(t)
    return s if len(s) <= limit else s[: limit - 3] + "..."


def _min_label(side: str, min_depth: int, at_least: Label) -> Label:
    """Least label on ``side`` with depth >= ``min_depth`` lying above ``at_least``."""
    d = min_depth
    while Label.of(side, d) < at_least:
        d += 1
    return Label.of(side, d)


def _arrow_options(sigma: Arrow, tau: Optional[AtrType], b: Label, b2: Label):
    r = sigma.result.label
    if r == b:
        r_opts = [b2]
    elif isinstance(tau, Arrow):
        r_opts = [_min_label(r.side, r.depth, tau.result.label)]
    else:
        r_opts = [r]
    for r2 in r_opts:
        per_arg = []
        for j, a in enumerate(sigma.args):
            if not isinstance(a, Base):
                per_arg.append([a])
                continue
            al = a.label
            if isinstance(tau, Arrow) and j < len(tau.args) and isinstance(tau.args[j], Base):
                bound = tau.args[j].label
                opts = []
                d = al.depth
                while Label.of(al.side, d) <= bound:
                    opts.append(Base(Label.of(al.side, d)))
                    d += 1
                per_arg.append(opts or [a])
            elif al == r:
                per_arg.append([Base(r2)])
            else:
                per_arg.append([a])
        for combo in itertools.product(*per_arg):
            yield Arrow(tuple(combo), Base(r2))


def find_instance(head: AtrType, arg_types: list) -> Optional[AtrType]:
    """Least shift of ``head`` under which every argument is a subtype of its parameter."""
    if not isinstance(head, Arrow) or len(arg_types) > len(head.args):
        return None
    if all(subtype(t, s) for t, s in zip(arg_types, head.args)):
        return head
    b = head.result.label
    for extra in range(MAX_SHIFT + 1):
        b2 = Label.of(b.side, b.depth + extra)
        options = []
        for i, s in enumerate(head.args):
            tau = arg_types[i] if i < len(arg_types) else None
            if isinstance(s, Base):
                if s.label == b:
                    options.append([Base(b2)])
                elif tau is not None and isinstance(tau, Base):
                    options.append([Base(_min_label(s.label.side, s.label.depth, tau.label))])
                else:
                    options.append([s])
            else:
                options.append(list(_arrow_options(s, tau, b, b2)))
        for combo in itertools.product(*options):
            cand = Arrow(tuple(combo), Base(b2))
            if all(subtype(t, p) for t, p in zip(arg_types, cand.args)) and shifts_to(head, cand):
                return cand
    return None


class Checker:
    def __init__(self, dialect: str = "atr"):
        if dialect not in DIALECTS:
            raise ValueError(f"unknown dialect {dialect!r}")
        self.dialect = dialect

    @property
    def bcl(self) -> bool:
        return self.dialect in ("bcl", "bclp")

    # helpers
    def _err(self, rule, msg, term, expected=None, got=None, cls=AtrTypeError):
        raise cls(rule, msg, _short(term), expected, got)

    def _base(self, d: Derivation, rule: str) -> Label:
        if not isinstance(d.type, Base):
            self._err(rule, "expected a base type", d.term, "N_l", d.type)
        return d.type.label

    def _check_label(self, ty: AtrType, term: Term):
        labels = []

        def collect(t):
            if isinstance(t, Base):
                labels.append(t.label)
            else:
                for a in t.args:
                    collect(a)
                collect(t.result)

        collect(ty)
        if self.dialect == "pcf" and any(l != EPS for l in labels):
            self._err("Id-I", "PCF types carry no labels", term, "N", ty)
        if self.bcl and any(l not in (EPS, DIAMOND) for l in labels):
            self._err("Id-I", "BCL types are over N_norm and N_safe", term, "N_ε/N_◇", ty)

    def _affine_free(self, t: Term, delta, rule: str):
        if delta is not None and delta[0] in free_vars(t):
            self._err(rule, f"affine variable {delta[0]!r} may not occur here", t, cls=AffinityError)

    def synth(self, t: Term, gamma: dict, delta=None) -> Derivation:
        match t:
            case Let() | LetRec():
                self._err("sugar", "desugar the term before checking", t)
            case Const(s):
                if self.dialect == "pcf":
                    return Derivation("Const-I", t, NORM)
                if s == "":
                    return Derivation("Zero-I", t, NORM)
                return Derivation("Const-I", t, SAFE)
            case Quote(v):
                self._err("Id-I", "quoted runtime values have no type", t)
            case Var(n):
                if delta is not None and delta[0] == n:
                    return Derivation("Aff-Id-I", t, delta[1])
                if n not in gamma:
                    self._err("Id-I", f"unbound variable {n!r}", t)
                return Derivation("Int-Id-I", t, gamma[n])
            case Op(o, a):
                return self._op(t, o, a, gamma, delta)
            case Down(a, b):
                return self._down(t, a, b, gamma, delta)
            case If(a, b, c):
                return self._if(t, a, b, c, gamma, delta)
            case Lam(n, ty, body):
                self._check_label(ty, t)
                if self.dialect == "atr" and type_level(ty) > 1:
                    self._err("→-I", "ATR variables have level 0 or 1", t, "level ≤ 1", ty)
                if self.bcl and not isinstance(ty, Base):
                    self._err("→-I", "BCL binders have base type", t, "N_norm/N_safe", ty)
                inner_delta = None if (delta is not None and delta[0] == n) else delta
                d = self.synth(body, {**gamma, n: ty}, inner_delta)
                return Derivation("→-I", t, Arrow((ty,), d.type), (d,))
            case App():
                return self._app(t, gamma, delta)
            case Fix(body):
                if self.dialect != "pcf":
                    self._err("fix-I", "fix is only available in PCF", t)
                d = self.synth(body, gamma, delta)
                ty = d.type
                if not (isinstance(ty, Arrow) and len(ty.args) >= 1 and drop_args(ty, 1) == ty.args[0]):
                    self._err("fix-I", "fix expects a term of type σ→σ", t, "σ→σ", ty)
                return Derivation("fix-I", t, ty.args[0], (d,))
            case Prn(body):
                if not self.bcl:
                    self._err("prn-I", "prn is only available in BCL", t)
                d = self.synth(body, gamma, delta)
                want = Arrow((NORM, SAFE), SAFE)
                if not subtype(d.type, want):
                    self._err("prn-I", "prn expects norm→safe→safe", t, want, d.type)
                return Derivation("prn-I", t, Arrow((NORM,), SAFE), (d,))
            case Crec():
                return self._crec(t, gamma, delta)
        raise AtrTypeError("?", f"unknown term {t!r}")

    def _op(self, t, o, a, gamma, delta):
        d = self.synth(a, gamma, delta)
        l = self._base(d, "op-I")
        if self.dialect == "pcf":
            return Derivation("op-I", t, NORM, (d,))
        if self.bcl:
            if o == "d" and l == EPS:
                return Derivation("d-I′", t, NORM, (d,))
            return Derivation("op-I", t, SAFE, (d,))
        target = l if l.side == DIA else Label.of(DIA, l.depth)
        return Derivation("op-I", t, Base(target), (d,), {"label": target})

    def _down(self, t, a, b, gamma, delta):
        if delta is not None and delta[0] in free_vars(a) and delta[0] in free_vars(b):
            self._err("down-I", "affine variable used in both operands", t, cls=AffinityError)
        da = self.synth(a, gamma, delta if delta and delta[0] in free_vars(a) else None)
        db = self.synth(b, gamma, delta if delta and delta[0] in free_vars(b) else None)
        la, lb = self._base(da, "down-I"), self._base(db, "down-I")
        if self.dialect == "pcf":
            return Derivation("down-I", t, NORM, (da, db))
        if self.bcl:
            if self.dialect == "bclp" and lb == EPS:
                return Derivation("down-I′", t, NORM, (da, db))
            return Derivation("down-I", t, SAFE, (da, db))
        return Derivation("down-I", t, Base(lb), (da, db))

    def _if(self, t, a, b, c, gamma, delta):
        self._affine_free(a, delta, "If-I")
        da = self.synth(a, gamma, None)
        self._base(da, "If-I")
        db = self.synth(b, gamma, delta)
        dc = self.synth(c, gamma, delta)
        lb, lc = self._base(db, "If-I"), self._base(dc, "If-I")
        joined = label_join(lb, lc)
        if self.dialect == "pcf":
            return Derivation("If-I", t, NORM, (da, db, dc))
        if self.bcl:
            if self.dialect == "bclp" and joined == EPS:
                return Derivation("If-I′", t, NORM, (da, db, dc))
            return Derivation("If-I", t, SAFE, (da, db, dc))
        return Derivation("If-I", t, Base(joined), (da, db, dc), {"label": joined})

    def _app(self, t, gamma, delta):
        h, args = spine(t)
        for a in args:
            self._affine_free(a, delta, "→-E")
        dh = self.synth(h, gamma, delta)
        dargs = [self.synth(a, gamma, None) for a in args]
        head = dh.type
        if not isinstance(head, Arrow) or len(args) > len(head.args):
            self._err("→-E", "too many arguments or non-function head", t, "function", head)
        arg_types = [d.type for d in dargs]
        if self.dialect == "atr":
            inst = find_instance(head, arg_types)
        else:
            ok = all(subtype(a, p) for a, p in zip(arg_types, head.args))
            inst = head if ok else None
        if inst is None:
            want = Arrow(tuple(arg_types), head.result) if arg_types else head
            self._err("→-E", "arguments do not fit the function type even after shifting",
                      t, format_type(head, True), "args " + ", ".join(format_type(a, True) for a in arg_types))
        return Derivation("→-E", t, drop_args(inst, len(args)), (dh, *dargs),
                          {"head_type": head, "shifted": inst})

    def _crec(self, t: Crec, gamma, delta):
        if delta is not None and delta[0] in free_vars(t):
            self._err("crec-I", f"affine variable {delta[0]!r} is free in a crec body", t, cls=AffinityError)
        if self.dialect != "atr":
            self._err("crec-I", "crec is only available in ATR", t)
        gamma_ty = t.fty
        self._check_label(gamma_ty, t)
        if not in_R(gamma_ty):
            self._err("crec-I", "recursor type must have an oracular first argument dominating all lower ones",
                      t, "type in R", gamma_ty)
        if uses(t.fname, t.body) > 1:
            self._err("crec-I", f"recursor {t.fname!r} used more than once", t, cls=AffinityError)
        if not tail_pos(t.fname, t.body):
            self._err("crec-I", f"recursor {t.fname!r} occurs outside a tail call", t, cls=TailPosError)
        inner_gamma = {k: v for k, v in gamma.items() if k != t.fname}
        d = self.synth(t.body, inner_gamma, (t.fname, gamma_ty))
        if not subtype(d.type, gamma_ty):
            self._err("crec-I", "body does not have the recursor type", t, gamma_ty, d.type)
        clock = Derivation("Const-I" if t.clock else "Zero-I", Const(t.clock), SAFE if t.clock else NORM)
        return Derivation("crec-I", t, gamma_ty, (clock, d))

    def check(self, t: Term, gamma: Optional[dict] = None, expected: Optional[AtrType] = None,
              delta=None) -> Derivation:
        gamma = dict(gamma or {})
        for n, ty in gamma.items():
            self._check_label(ty, Var(n))
        d = self.synth(t, gamma, delta)
        if expected is not None and not subtype(d.type, expected):
            inst = expected if shifts_to(d.type, expected) else None
            if inst is None:
                self._err("Subsumption", "declared type not reached", t, format_type(expected, True),
                          format_type(d.type, True))
            return Derivation("Shift", t, expected, (d,))
        if expected is not None and d.type != expected:
            return Derivation("Subsumption", t, expected, (d,))
        return d


def in_R(ty: AtrType) -> bool:
    if not isinstance(ty, Arrow) or not all(isinstance(a, Base) for a in ty.args):
        return False
    b1 = ty.args[0].label
    if b1.side != BOX:
        return False
    return all(a.label.side == BOX for a in ty.args if a.label <= b1)


def check(t: Term, gamma: Optional[dict] = None, dialect: str = "atr",
          expected: Optional[AtrType] = None, delta=None) -> Derivation:
    if delta is not None and not (isinstance(delta, tuple) and len(delta) == 2):
        raise AffinityError("context", "the affine zone holds at most one binding")
    return Checker(dialect).check(t, gamma, expected, delta)


def check_program(prog, dialect: Optional[str] = None) -> dict:
    """Check every declaration of a parsed program at its declared type."""
    dialect = dialect or prog.dialect or "atr"
    out = {}
    for name, ty, _ in prog.declarations:
        out[name] = check(prog.resolved(name), prog.context, dialect, ty)
    return out
