"""Symbolic extraction of size and time bounds.

The T-interpretation is run over polynomials instead of numbers.  A
symbolic time complexity pairs a cost polynomial with a potential, which is
a polynomial at base type and a Python function at arrow type, so
λ-abstractions are β-reduced while extracting.  Inputs become length
variables, oracles become combinator applications ``P``, ``Q`` and ``R``.

A fully applied clocked recursion is summarized in closed form.  Its body is
extracted once with fresh variables for the arguments while every recursive
call is replaced by ``λx⃗.ε`` and its argument potentials are recorded.  The
one-step argument bounds are decomposed into manifestly safe shapes and
iterated: an oracular argument stabilizes at the maximum of its parts, a
computational one grows by its strict part at most once per unfolding, and
the number of unfoldings is bounded by the final bound of the first
argument.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .errors import ExtractionFailure
from .labels import DIA, Label
from .sop.poly import (
    ONE, ZERO, Lam as PLam, Pair, PC, Poly, QC, RC, Tally, V, apply, free_vars, plus, subst,
    times, vmax,
)
from .sop.safe import Decomposer, SafeForm, poly_label
from .syntax import (
    App, Const, Crec, Down, Fix, If, Lam, Op, Prn, Quote, Term, Var, spine, strip_lams,
)
from .typecheck import find_instance
from .types import Arrow, AtrType, Base, args_of, format_type

MAX_RELABEL_ROUNDS = 8


@dataclass(frozen=True)
class Sym:
    cost: Poly
    pot: object

    @property
    def base(self) -> bool:
        return isinstance(self.pot, Poly)


def sym_val(p) -> Sym:
    if isinstance(p, Poly):
        return Sym(vmax(ONE, p), p)
    return Sym(ONE, p)


def sym_star(t0: Sym, t1: Sym) -> Sym:
    if not callable(t0.pot):
        raise ExtractionFailure("application of a base-type value")
    r = t0.pot(t1.pot)
    return Sym(plus(t0.cost, t1.cost, r.cost, Tally(3)), r.pot)


def _join_pot(p1, p2):
    if isinstance(p1, Poly) and isinstance(p2, Poly):
        return vmax(p1, p2)
    if callable(p1) and callable(p2):
        return lambda q: sym_join(p1(q), p2(q))
    raise ExtractionFailure("branches of different shapes")


def sym_join(t1: Sym, t2: Sym) -> Sym:
    return Sym(vmax(t1.cost, t2.cost), _join_pot(t1.pot, t2.pot))


def _curried(k: int, finish) -> Sym:
    def step(done: tuple):
        def pot(p):
            args = done + (p,)
            if len(args) == k:
                return finish(args)
            return Sym(ONE, step(args))
        return pot
    if k == 0:
        return finish(())
    return Sym(ONE, step(()))


def oracle_length_poly(name: str, ty: Arrow, args: tuple) -> Poly:
    """Length of ``name(args)`` read through its decomposition."""
    b = ty.result.label
    tails = [i for i, a in enumerate(ty.args) if a.label == b]
    if not tails:
        return apply(PC(name), *args)
    rest = [a for i, a in enumerate(args) if i not in tails]
    q, r = apply(QC(name), *rest), apply(RC(name), *rest)
    z = vmax(*(args[i] for i in tails))
    if b.side == DIA:
        return plus(q, vmax(r, z))
    return vmax(q, r, z)


def oracle_sym(name: str, ty: AtrType) -> Sym:
    if isinstance(ty, Base):
        return sym_val(V(name))
    if not all(isinstance(a, Base) for a in ty.args):
        raise ExtractionFailure(f"{name} has a higher-order type {format_type(ty, True)}")

    def finish(args):
        for a in args:
            if not isinstance(a, Poly):
                raise ExtractionFailure(f"{name} applied to a function")
        F = oracle_length_poly(name, ty, args)
        return Sym(vmax(ONE, F), F)

    return _curried(len(ty.args), finish)


@dataclass
class CrecReport:
    fname: str
    fty: AtrType
    labels: tuple
    depth: Poly
    bounds: tuple
    forms: tuple = ()

    def to_json(self) -> dict:
        return {
            "fname": self.fname,
            "type": format_type(self.fty, True),
            "labels": [l.ascii() for l in self.labels],
            "unfoldings_bound": str(self.depth),
            "argument_bounds": [str(b) for b in self.bounds],
            "one_step_forms": [f.to_json() for f in self.forms],
        }

    def mapped(self, sigma: dict) -> "CrecReport":
        return CrecReport(self.fname, self.fty, self.labels, subst(self.depth, sigma),
                          tuple(subst(b, sigma) for b in self.bounds), self.forms)


def _least_on_side(side: str, at_least: Label) -> Label:
    l = at_least
    while l.side != side:
        l = l.succ()
    return l


def _sccs(n: int, deps: list) -> list:
    """Strongly connected components, dependencies first (Tarjan)."""
    index, low, on, stack, out = {}, {}, set(), [], []
    counter = [0]

    def visit(v):
        index[v] = low[v] = counter[0]
        counter[0] += 1
        stack.append(v)
        on.add(v)
        for w in deps[v]:
            if w not in index:
                visit(w)
                low[v] = min(low[v], low[w])
            elif w in on:
                low[v] = min(low[v], index[w])
        if low[v] == index[v]:
            comp = []
            while True:
                w = stack.pop()
                on.discard(w)
                comp.append(w)
                if w == v:
                    break
            out.append(sorted(comp))

    for v in range(n):
        if v not in index:
            visit(v)
    return out


class Extractor:
    def __init__(self, sigma: Optional[dict] = None):
        self.sigma = dict(sigma or {})
        self.reports: list = []
        self.counter = 0

    def fresh(self, base: str) -> str:
        self.counter += 1
        return f"{base}#{self.counter}"

    # terms ------------------------------------------------------------------

    def ev(self, e: Term, env: dict) -> Sym:
        match e:
            case Const(k):
                return Sym(Tally(max(1, len(k))), Tally(len(k)))
            case Quote(v) if isinstance(v, str):
                return Sym(Tally(max(1, len(v))), Tally(len(v)))
            case Var(n):
                if n not in env:
                    raise ExtractionFailure(f"unbound variable {n}")
                return env[n]
            case Op(o, a):
                t = self.ev(a, env)
                c = plus(t.cost, Tally(2))
                if o in ("c0", "c1"):
                    return Sym(c, plus(t.pot, ONE))
                if o == "d":
                    return Sym(c, t.pot)
                return Sym(c, ONE)
            case Down(a, b):
                t0, t1 = self.ev(a, env), self.ev(b, env)
                return Sym(plus(t0.cost, t1.cost, t0.pot, t1.pot, Tally(3)), t1.pot)
            case If(a, b, c):
                t0 = self.ev(a, env)
                j = sym_join(self.ev(b, env), self.ev(c, env))
                return Sym(plus(t0.cost, Tally(2), j.cost), j.pot)
            case Lam(x, _, body):
                return Sym(ONE, lambda p: self.ev(body, {**env, x: sym_val(p)}))
            case App():
                h, args = spine(e)
                if isinstance(h, Crec):
                    k = len(args_of(h.fty))
                    if len(args) != k:
                        raise ExtractionFailure(f"crec {h.fname} must be fully applied")
                    return self.crec_site(h, args, env)
                out = self.ev(h, env)
                for a in args:
                    out = sym_star(out, self.ev(a, env))
                return out
            case Crec():
                raise ExtractionFailure(f"crec {e.fname} must be fully applied")
            case Prn() | Fix():
                raise ExtractionFailure("bounds are extracted for ATR terms only")
        raise ExtractionFailure(f"cannot extract a bound for {e!r}")

    # clocked recursion ------------------------------------------------------

    def _initial_labels(self, c: Crec, pots: list) -> list:
        labels = []
        for p in pots:
            l = poly_label(p, self.sigma)
            if l is None:
                raise ExtractionFailure(f"argument bound {p} is not manifestly safe")
            labels.append(l)
        inst = find_instance(c.fty, [Base(l) for l in labels])
        if inst is not None:
            return [a.label for a in inst.args]
        out = []
        for decl, l in zip(c.fty.args, labels):
            out.append(_least_on_side(decl.label.side, max(decl.label, l)))
        return out

    def crec_site(self, c: Crec, args: list, env: dict) -> Sym:
        fty = c.fty
        k = len(fty.args)
        if not all(isinstance(a, Base) for a in fty.args):
            raise ExtractionFailure(f"crec {c.fname} has higher-order arguments")
        params, body = strip_lams(c.body, k)
        if len(params) != k:
            raise ExtractionFailure(f"crec {c.fname} body must start with {k} λ-binders")
        names = [n for n, _ in params]
        ts = [self.ev(a, env) for a in args]
        for t in ts:
            if not t.base:
                raise ExtractionFailure(f"crec {c.fname} applied to a function")
        init_pots = [t.pot for t in ts]
        labels = self._initial_labels(c, init_pots)
        xs = [self.fresh(n) for n in names]
        mark = len(self.reports)

        for _ in range(MAX_RELABEL_ROUNDS):
            del self.reports[mark:]
            for x, l in zip(xs, labels):
                self.sigma[x] = Base(l)
            calls = []

            def finish(a, calls=calls):
                calls.append(a)
                return Sym(ONE, ZERO)

            inner = {**env, c.fname: _curried(k, finish)}
            for n, x in zip(names, xs):
                inner[n] = sym_val(V(x))
            rb = self.ev(body, inner)
            if not rb.base:
                raise ExtractionFailure(f"crec {c.fname} returns a function")
            for call in calls:
                if not all(isinstance(a, Poly) for a in call):
                    raise ExtractionFailure(f"{c.fname} called with a function argument")
            steps = [vmax(*(call[i] for call in calls)) if calls else ZERO for i in range(k)]
            dec = Decomposer(self.sigma)
            changed = False
            for i, p in enumerate(steps):
                if dec(p, labels[i]) is None:
                    l = poly_label(p, self.sigma, labels[i])
                    if l is None:
                        raise ExtractionFailure(
                            f"one-step bound {p} of argument {i + 1} of {c.fname} is not manifestly safe")
                    labels[i] = _least_on_side(labels[i].side, l)
                    changed = True
            if not changed:
                break
        else:
            raise ExtractionFailure(f"argument labels of {c.fname} do not settle")

        forms = [dec(p, labels[i]) for i, p in enumerate(steps)]
        finals = self._iterate(c, xs, labels, steps, forms, dec)
        N = finals[0]
        init = {x: p for x, p in zip(xs, init_pots)}
        compose = {x: subst(finals[i], init) for i, x in enumerate(xs)}

        pot = subst(rb.pot, compose)
        kk = Tally(4 * k)
        cbar = plus(kk, *(vmax(ONE, V(x)) for x in xs), rb.cost)
        nxt = plus(*(vmax(ONE, finals[i]) for i in range(k)))
        per_step = plus(times(Tally(4), N), Tally(6), cbar, kk, nxt)
        fail = plus(times(Tally(4), N), Tally(2 * len(c.clock) + 8))
        cost = plus(*(t.cost for t in ts), kk, ONE,
                    subst(plus(times(plus(N, ONE), per_step), fail), compose))

        inner_reports = [r.mapped(compose) for r in self.reports[mark:]]
        del self.reports[mark:]
        self.reports.append(CrecReport(c.fname, fty, tuple(labels), compose[xs[0]],
                                       tuple(compose[x] for x in xs), tuple(forms)))
        self.reports.extend(inner_reports)
        for x in xs:
            self.sigma.pop(x, None)
        return Sym(cost, pot)

    def _iterate(self, c: Crec, xs: list, labels: list, steps: list, forms: list,
                 dec: Decomposer) -> list:
        k = len(xs)
        index = {x: i for i, x in enumerate(xs)}
        deps = [sorted({index[v] for v in free_vars(p) if v in index} - {i})
                for i, p in enumerate(steps)]
        finals: list = [None] * k
        theta: dict = {}
        depth = None
        for comp in _first_needed(_sccs(k, deps), deps, 0):
            label = labels[comp[0]]
            if any(labels[i] != label for i in comp):
                raise ExtractionFailure(f"mutually dependent arguments of {c.fname} differ in label")
            sf = forms[comp[0]]
            for i in comp[1:]:
                sf = sf.join(forms[i])
            q = subst(sf.q, theta)
            rs = [subst(r, theta) for r in sf.r]
            ys = [theta.get(y, V(y)) for y in sf.ys]
            own = [V(xs[i]) for i in comp]
            if label.side == DIA:
                if depth is None:
                    if finals[0] is None:
                        raise ExtractionFailure(
                            f"unfolding bound of {c.fname} depends on a computational argument")
                    depth = finals[0]
                bound = plus(times(depth, q), q, vmax(*rs, *ys, *own))
            else:
                bound = vmax(q, *rs, *ys, *own)
            for i in comp:
                finals[i] = bound
                theta[xs[i]] = bound
            if 0 in comp:
                depth = bound
        return finals


def _first_needed(comps: list, deps: list, v: int) -> list:
    """Reorder components so that everything ``v`` depends on comes first."""
    seen, todo = set(), [v]
    while todo:
        u = todo.pop()
        if u not in seen:
            seen.add(u)
            todo.extend(deps[u])
    first = [c for c in comps if set(c) & seen]
    return first + [c for c in comps if not set(c) & seen]


@dataclass
class Extraction:
    params: tuple
    sigma: dict
    cost: Poly
    pot: Poly
    result_type: AtrType
    reports: list = field(default_factory=list)
    size_form: Optional[SafeForm] = None

    @property
    def size_bound(self) -> Poly:
        return self.size_form.to_poly()

    @property
    def time_bound(self) -> Poly:
        out = Pair(self.cost, self.pot)
        for name, ty in reversed(self.params):
            out = PLam(name, ty, out)
        return out

    def to_json(self) -> dict:
        return {
            "params": [[n, format_type(t, True)] for n, t in self.params],
            "size_bound": str(self.size_bound) if self.size_form else None,
            "size_form": self.size_form.to_json() if self.size_form else None,
            "cost": str(self.cost),
            "potential": str(self.pot),
            "crec_sites": [r.to_json() for r in self.reports],
        }


def extract(term: Term, ty: AtrType, gamma: Optional[dict] = None) -> Extraction:
    """Size and time bounds of a closed (up to ``gamma``) ATR term of type ``ty``."""
    gamma = dict(gamma or {})
    ex = Extractor(gamma)
    env = {n: oracle_sym(n, t) for n, t in gamma.items()}
    params = []
    out = ex.ev(term, env)
    if isinstance(ty, Arrow):
        binders, _ = strip_lams(term, len(ty.args))
        names = [n for n, _ in binders]
        taken = set(gamma) | set(names)
        for i, pty in enumerate(ty.args):
            n = names[i] if i < len(names) and names[i] not in gamma else _fresh(f"x{i + 1}", taken)
            taken.add(n)
            params.append((n, pty))
        for n, pty in params:
            ex.sigma[n] = pty
            out = sym_star(out, oracle_sym(n, pty))
        res = ty.result
    else:
        res = ty
    if not out.base:
        raise ExtractionFailure("extraction produced a function")
    sig = {**gamma, **dict(params)}
    sf = Decomposer(sig)(out.pot, res.label)
    if sf is None:
        raise ExtractionFailure(f"size bound {out.pot} is not manifestly safe at {res.label.ascii()}")
    form = SafeForm(sf.label, sf.q, sf.r, sf.ys, tuple(params))
    return Extraction(tuple(params), sig, out.cost, out.pot, res, ex.reports, form)


def _fresh(base: str, taken: set) -> str:
    n, i = base, 0
    while n in taken:
        i += 1
        n = f"{base}_{i}"
    return n
