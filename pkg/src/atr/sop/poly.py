"""Second-order polynomial terms, smart constructors, printing and parsing.

Nodes are immutable and hash-consed lightly: each node caches its hash so
that equality tests and dictionary keys stay cheap on large shared terms.
"""

from __future__ import annotations

import re
from typing import Iterator, Optional

from ..errors import ParseError


class Poly:
    __slots__ = ("_h",)
    kids: tuple = ()

    def _fields(self) -> tuple:
        raise NotImplementedError

    def __hash__(self) -> int:
        return self._h

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if type(self) is not type(other) or self._h != other._h:
            return False
        return self._fields() == other._fields()

    def __repr__(self) -> str:
        return f"Poly({show(self)})"

    def __str__(self) -> str:
        return show(self)


def _init(node, *fields):
    node._h = hash((type(node).__name__,) + fields)


class Tally(Poly):
    __slots__ = ("n",)

    def __init__(self, n: int):
        if n < 0:
            raise ValueError("tallies are natural numbers")
        self.n = int(n)
        _init(self, self.n)

    def _fields(self):
        return (self.n,)


class V(Poly):
    """``|x|``: a level-0 or level-1 length variable."""

    __slots__ = ("name", "level")

    def __init__(self, name: str, level: int = 0):
        self.name = name
        self.level = level
        _init(self, name)

    def _fields(self):
        return (self.name,)


class _Bin(Poly):
    __slots__ = ("a", "b")
    op = ""

    def __init__(self, a: Poly, b: Poly):
        self.a, self.b = a, b
        _init(self, a._h, b._h)

    def _fields(self):
        return (self.a, self.b)

    @property
    def kids(self):
        return (self.a, self.b)


class Max(_Bin):
    __slots__ = ()
    op = "\\/"


class Plus(_Bin):
    __slots__ = ()
    op = "+"


class Times(_Bin):
    __slots__ = ()
    op = "*"


class Ap(_Bin):
    """Application ``a(b)``."""

    __slots__ = ()


class Pair(_Bin):
    __slots__ = ()


class Lam(Poly):
    __slots__ = ("name", "ty", "body")

    def __init__(self, name: str, ty, body: Poly):
        self.name, self.ty, self.body = name, ty, body
        _init(self, name, body._h)

    def _fields(self):
        return (self.name, self.body)

    @property
    def kids(self):
        return (self.body,)


class _Un(Poly):
    __slots__ = ("a",)

    def __init__(self, a: Poly):
        self.a = a
        _init(self, a._h)

    def _fields(self):
        return (self.a,)

    @property
    def kids(self):
        return (self.a,)


class Pi1(_Un):
    __slots__ = ()


class Pi2(_Un):
    __slots__ = ()


class Succ(_Un):
    __slots__ = ()


class _Cmb(Poly):
    """A p, q or r combinator applied to a variable name."""

    __slots__ = ("name",)
    tag = ""

    def __init__(self, name: str):
        self.name = name
        _init(self, name)

    def _fields(self):
        return (self.name,)


class PC(_Cmb):
    __slots__ = ()
    tag = "P"


class QC(_Cmb):
    __slots__ = ()
    tag = "Q"


class RC(_Cmb):
    __slots__ = ()
    tag = "R"


class RIter(Poly):
    """``iter(f, m, n)`` is ``f`` applied ``m`` times to ``n``."""

    __slots__ = ("f", "m", "n")

    def __init__(self, f: Poly, m: Poly, n: Poly):
        self.f, self.m, self.n = f, m, n
        _init(self, f._h, m._h, n._h)

    def _fields(self):
        return (self.f, self.m, self.n)

    @property
    def kids(self):
        return (self.f, self.m, self.n)


ZERO = Tally(0)
ONE = Tally(1)


def rebuild(p: Poly, kids) -> Poly:
    """``p`` with its children replaced, through the smart constructors."""
    kids = list(kids)
    if isinstance(p, Max):
        return vmax(*kids)
    if isinstance(p, Plus):
        return plus(*kids)
    if isinstance(p, Times):
        return times(*kids)
    if isinstance(p, Ap):
        return Ap(*kids)
    if isinstance(p, Pair):
        return Pair(*kids)
    if isinstance(p, Lam):
        return Lam(p.name, p.ty, kids[0])
    if isinstance(p, (Pi1, Pi2, Succ)):
        return type(p)(kids[0])
    if isinstance(p, RIter):
        return RIter(*kids)
    return p


# smart constructors ---------------------------------------------------------

def _flat(p: Poly, cls) -> Iterator[Poly]:
    stack = [p]
    while stack:
        x = stack.pop()
        if isinstance(x, cls):
            stack.append(x.b)
            stack.append(x.a)
        else:
            yield x


def vmax(*ps: Poly) -> Poly:
    """``p1 \\/ ... \\/ pn`` with duplicates, zeros and constant clutter removed."""
    items, seen, top = [], set(), 0
    for p in ps:
        for x in _flat(p, Max):
            if isinstance(x, Tally):
                top = max(top, x.n)
            elif x not in seen:
                seen.add(x)
                items.append(x)
    if top:
        items.insert(0, Tally(top))
    if not items:
        return ZERO
    out = items[-1]
    for x in reversed(items[:-1]):
        out = Max(x, out)
    return out


def plus(*ps: Poly) -> Poly:
    items, const = [], 0
    for p in ps:
        for x in _flat(p, Plus):
            if isinstance(x, Tally):
                const += x.n
            else:
                items.append(x)
    if const:
        items.insert(0, Tally(const))
    if not items:
        return ZERO
    out = items[-1]
    for x in reversed(items[:-1]):
        out = Plus(x, out)
    return out


def times(*ps: Poly) -> Poly:
    items, const = [], 1
    for p in ps:
        for x in _flat(p, Times):
            if isinstance(x, Tally):
                const *= x.n
            else:
                items.append(x)
    if const == 0:
        return ZERO
    if const != 1 or not items:
        items.insert(0, Tally(const))
    out = items[-1]
    for x in reversed(items[:-1]):
        out = Times(x, out)
    return out


def apply(f: Poly, *args: Poly) -> Poly:
    for a in args:
        f = Ap(f, a)
    return f


def spine(p: Poly) -> tuple:
    args = []
    while isinstance(p, Ap):
        args.append(p.b)
        p = p.a
    return p, args[::-1]


def total(q: Poly, rest: list, computational: bool) -> Poly:
    """``q + (r1 \\/ ...)`` on the ◇ side and ``q \\/ r1 \\/ ...`` on the □ side."""
    if computational:
        return plus(q, vmax(*rest)) if rest else q
    return vmax(q, *rest)


# traversal ------------------------------------------------------------------

def free_vars(p: Poly) -> frozenset:
    memo = {}

    def go(x):
        key = id(x)
        if key in memo:
            return memo[key]
        if isinstance(x, V):
            out = frozenset([x.name])
        elif isinstance(x, _Cmb):
            out = frozenset([x.name])
        elif isinstance(x, Lam):
            out = go(x.body) - {x.name}
        else:
            out = frozenset().union(*(go(k) for k in x.kids)) if x.kids else frozenset()
        memo[key] = out
        return out

    return go(p)


def subst(p: Poly, sigma: dict) -> Poly:
    """Replace free variables (and combinator names) by polynomials."""
    if not sigma:
        return p
    memo = {}

    def go(x, sig):
        key = (id(x), id(sig))
        hit = memo.get(key)
        if hit is not None:
            return hit[0]
        if isinstance(x, V):
            out = sig.get(x.name, x)
        elif isinstance(x, _Cmb):
            repl = sig.get(x.name)
            if repl is None:
                out = x
            elif isinstance(repl, V):
                out = type(x)(repl.name)
            else:
                raise ValueError(f"cannot substitute a non-variable under {x.tag}({x.name})")
        elif isinstance(x, Lam):
            inner = {k: v for k, v in sig.items() if k != x.name}
            if not inner:
                out = x
            else:
                name, body = x.name, x.body
                if any(name in free_vars(v) for v in inner.values()):
                    taken = free_vars(body) | frozenset().union(*(free_vars(v) for v in inner.values()))
                    new = fresh_name(name, taken)
                    body = subst(body, {name: V(new, _level_of(x.ty))})
                    name = new
                out = Lam(name, x.ty, go(body, inner))
        elif x.kids:
            out = rebuild(x, [go(k, sig) for k in x.kids])
        else:
            out = x
        memo[key] = (out, sig)  # keep sig alive so its id stays unique
        return out

    return go(p, dict(sigma))


def fresh_name(base: str, taken) -> str:
    stem = base.split("'")[0]
    i = 1
    while f"{stem}'{i}" in taken:
        i += 1
    return f"{stem}'{i}"


def _level_of(ty) -> int:
    from ..types import Arrow
    return 1 if isinstance(ty, Arrow) else 0


def node_count(p: Poly) -> int:
    seen = set()
    stack = [p]
    while stack:
        x = stack.pop()
        if id(x) in seen:
            continue
        seen.add(id(x))
        stack.extend(x.kids)
    return len(seen)


# printing -------------------------------------------------------------------

_PREC = {Max: 1, Plus: 2, Times: 3}


def show(p: Poly) -> str:
    return _show(p, 0)


def _show(p: Poly, ctx: int) -> str:
    if isinstance(p, Tally):
        return str(p.n)
    if isinstance(p, V):
        return f"|{p.name}|"
    if isinstance(p, _Cmb):
        return f"{p.tag}({p.name})"
    if isinstance(p, (Max, Plus, Times)):
        prec = _PREC[type(p)]
        s = f"{_show(p.a, prec + 1)} {p.op} {_show(p.b, prec)}"
        return f"({s})" if prec < ctx else s
    if isinstance(p, Ap):
        h, args = spine(p)
        return f"{_show(h, 4)}({', '.join(_show(a, 0) for a in args)})"
    if isinstance(p, Pair):
        return f"({_show(p.a, 0)}, {_show(p.b, 0)})"
    if isinstance(p, Pi1):
        return f"pi1 {_show(p.a, 4)}"
    if isinstance(p, Pi2):
        return f"pi2 {_show(p.a, 4)}"
    if isinstance(p, Succ):
        return f"S({_show(p.a, 0)})"
    if isinstance(p, RIter):
        return f"iter({_show(p.f, 0)}, {_show(p.m, 0)}, {_show(p.n, 0)})"
    if isinstance(p, Lam):
        ann = ""
        if p.ty is not None:
            from .types import format_size_type
            ann = f" : {format_size_type(p.ty)}"
        s = f"lam |{p.name}|{ann} . {_show(p.body, 0)}"
        return f"({s})" if ctx > 0 else s
    raise TypeError(f"unknown polynomial {p!r}")


# parsing --------------------------------------------------------------------

_TOK = re.compile(r"\s*(?:(\d+)|\|([A-Za-z_][A-Za-z0-9_'%#.]*)\||(\\/|->|[()+*,.:@|])|([A-Za-z_][A-Za-z0-9_]*))")


def _tokens(s: str) -> list:
    out, i = [], 0
    s = s.rstrip()
    while i < len(s):
        m = _TOK.match(s, i)
        if not m or m.end() == i:
            raise ParseError(f"unexpected character {s[i]!r} in polynomial", 1, i + 1)
        num, var, sym, word = m.groups()
        if num is not None:
            out.append(("num", num, i))
        elif var is not None:
            out.append(("var", var, i))
        elif sym is not None:
            out.append(("sym", sym, i))
        else:
            out.append(("word", word, i))
        i = m.end()
    out.append(("eof", "", len(s)))
    return out


class _Reader:
    def __init__(self, text: str, levels: Optional[dict]):
        self.toks = _tokens(text)
        self.i = 0
        self.levels = levels or {}

    @property
    def tok(self):
        return self.toks[self.i]

    def error(self, msg):
        raise ParseError(f"{msg} (at {self.tok[1] or 'EOF'!r})", 1, self.tok[2] + 1)

    def at(self, text):
        return self.tok[0] in ("sym", "word") and self.tok[1] == text

    def eat(self, text):
        if not self.at(text):
            self.error(f"expected {text!r}")
        self.i += 1

    def expr(self) -> Poly:
        if self.at("lam"):
            self.i += 1
            if self.tok[0] != "var":
                self.error("expected |x| after lam")
            name = self.tok[1]
            self.i += 1
            ty = None
            if self.at(":"):
                self.i += 1
                ty = self.size_type()
            self.eat(".")
            return Lam(name, ty, self.expr())
        return self.maxe()

    def size_type(self):
        from .types import parse_size_type
        start = self.tok[2]
        depth = 0
        while self.tok[0] != "eof":
            if self.at("("):
                depth += 1
            elif self.at(")"):
                if depth == 0:
                    break
                depth -= 1
            elif self.at(".") and depth == 0:
                break
            self.i += 1
        text = self.text_between(start, self.tok[2])
        return parse_size_type(text)

    def text_between(self, a, b):
        return self._src[a:b]

    def maxe(self):
        a = self.sume()
        while self.at("\\/"):
            self.i += 1
            a = Max(a, self.maxe())
        return a

    def sume(self):
        a = self.prod()
        if self.at("+"):
            self.i += 1
            return Plus(a, self.sume())
        return a

    def prod(self):
        a = self.postfix()
        if self.at("*"):
            self.i += 1
            return Times(a, self.prod())
        return a

    def postfix(self):
        h = self.atom()
        while self.at("("):
            self.i += 1
            args = [self.expr()]
            while self.at(","):
                self.i += 1
                args.append(self.expr())
            self.eat(")")
            h = apply(h, *args)
        return h

    def atom(self):
        kind, text, _ = self.tok
        if kind == "num":
            self.i += 1
            return Tally(int(text))
        if kind == "var":
            self.i += 1
            return V(text, self.levels.get(text, 0))
        if kind == "word" and text in ("P", "Q", "R") and self.toks[self.i + 1][1] == "(":
            self.i += 2
            if self.tok[0] not in ("word", "var"):
                self.error("expected a variable name")
            name = self.tok[1]
            self.i += 1
            self.eat(")")
            return {"P": PC, "Q": QC, "R": RC}[text](name)
        if kind == "word" and text in ("pi1", "pi2"):
            self.i += 1
            return (Pi1 if text == "pi1" else Pi2)(self.postfix())
        if kind == "word" and text == "S":
            self.i += 1
            self.eat("(")
            a = self.expr()
            self.eat(")")
            return Succ(a)
        if kind == "word" and text == "iter":
            self.i += 1
            self.eat("(")
            f = self.expr()
            self.eat(",")
            m = self.expr()
            self.eat(",")
            n = self.expr()
            self.eat(")")
            return RIter(f, m, n)
        if self.at("("):
            self.i += 1
            a = self.expr()
            if self.at(","):
                self.i += 1
                b = self.expr()
                self.eat(")")
                return Pair(a, b)
            self.eat(")")
            return a
        self.error("expected a polynomial")


def parse_poly(text: str, levels: Optional[dict] = None) -> Poly:
    """Read the printed form back; ``levels`` gives variable levels (default 0)."""
    r = _Reader(text, levels)
    r._src = text
    p = r.expr()
    if r.tok[0] != "eof":
        r.error("trailing input")
    return p
