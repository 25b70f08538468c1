"""Dyadic strings, finite oracle tables, oracle lengths and environment validation.

An oracle is a finite table with a default for unlisted argument tuples, or
one of a few named rule oracles (identity, doubling, constant) used to
reproduce the pathological examples.  Lengths ``|f|`` are computed by brute
force over all strings up to the requested lengths.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Optional

from .errors import GridExceeded
from .labels import BOX
from .types import Arrow, AtrType, Base, format_type, type_tail

DEFAULT_LMAX = 8

RULES = {
    "identity": lambda args: args[-1],
    "double": lambda args: args[-1] + args[-1],
    "const": lambda args: "",
}


def str_length(v: str) -> int:
    return len(v)


def dyadic_encode(n: int) -> str:
    """Bijective base-2 numeral: 0 is ε, 1 is "0", 2 is "1", 3 is "00"."""
    if n < 0:
        raise ValueError("negative number")
    out = []
    while n > 0:
        if n % 2:
            out.append("0")
            n = (n - 1) // 2
        else:
            out.append("1")
            n = (n - 2) // 2
    return "".join(reversed(out))


def dyadic_decode(s: str) -> int:
    n = 0
    for ch in s:
        n = 2 * n + (1 if ch == "0" else 2)
    return n


def strings_upto(n: int):
    """All strings over {0,1} of length at most ``n``, shortest first."""
    for k in range(n + 1):
        for bits in itertools.product("01", repeat=k):
            yield "".join(bits)


def count_upto(n: int) -> int:
    return 2 ** (n + 1) - 1


@dataclass(frozen=True)
class OracleTable:
    name: str
    arity: int
    entries: tuple = ()  # sorted ((args...), out) pairs
    default: str = ""
    rule: Optional[str] = None
    fixed: tuple = ()  # arguments already supplied

    def __post_init__(self):
        if self.arity < 1:
            raise ValueError("oracle arity must be at least 1")
        if self.rule is not None and self.rule not in RULES:
            raise ValueError(f"unknown oracle rule {self.rule!r}")
        for args, out in self.entries:
            if len(args) != self.arity:
                raise ValueError(f"oracle {self.name}: entry {args} has the wrong arity")
            if not _is_bits(out) or not all(_is_bits(a) for a in args):
                raise ValueError(f"oracle {self.name}: strings must be over 0/1")

    @staticmethod
    def make(name: str, arity: int, entries=None, default: str = "", rule=None) -> "OracleTable":
        items = entries.items() if isinstance(entries, dict) else (entries or ())
        norm = tuple(sorted((tuple(a) if isinstance(a, (tuple, list)) else (a,), o) for a, o in items))
        return OracleTable(name, arity, norm, default, rule)

    @property
    def remaining(self) -> int:
        return self.arity - len(self.fixed)

    def lookup(self, args: tuple) -> str:
        if self.rule is not None:
            return RULES[self.rule](args)
        return _table_dict(self.entries).get(args, self.default)

    def apply(self, v: str):
        """Supply one more argument: a string when saturated, else a smaller oracle."""
        args = self.fixed + (v,)
        if len(args) == self.arity:
            return self.lookup(args)
        return OracleTable(self.name, self.arity, self.entries, self.default, self.rule, args)

    def __call__(self, *args: str) -> str:
        if len(args) != self.remaining:
            raise TypeError(f"oracle {self.name} expects {self.remaining} arguments")
        return self.lookup(self.fixed + tuple(args))

    def to_json(self) -> dict:
        d = {"name": self.name, "arity": self.arity, "default": self.default,
             "entries": [{"args": list(a), "out": o} for a, o in self.entries]}
        if self.rule:
            d["rule"] = self.rule
        return d


def _is_bits(s) -> bool:
    return isinstance(s, str) and set(s) <= {"0", "1"}


@lru_cache(maxsize=None)
def _table_dict(entries: tuple) -> dict:
    return dict(entries)


def oracle_length(f: OracleTable, lens, L_max: int = DEFAULT_LMAX) -> int:
    """``|f|(lens)``: the longest output over arguments no longer than ``lens``."""
    lens = tuple(int(n) for n in lens)
    if len(lens) != f.remaining:
        raise ValueError(f"oracle {f.name} takes {f.remaining} lengths")
    if any(n > L_max for n in lens):
        raise GridExceeded(f"length {max(lens)} exceeds grid bound {L_max}")
    if any(n < 0 for n in lens):
        raise ValueError("negative length")
    return _oracle_length(f, lens)


@lru_cache(maxsize=65536)
def _oracle_length(f: OracleTable, lens: tuple) -> int:
    if f.rule is None and not f.fixed:
        # exact shortcut for plain tables: listed entries in range plus the default if any tuple is unlisted
        inside = [len(o) for a, o in f.entries if all(len(x) <= n for x, n in zip(a, lens))]
        total = 1
        for n in lens:
            total *= count_upto(n)
        best = max(inside, default=0)
        if len(inside) < total:
            best = max(best, len(f.default))
        return best
    best = 0
    for args in itertools.product(*(list(strings_upto(n)) for n in lens)):
        best = max(best, len(f.lookup(f.fixed + args)))
    return best


def length_table(f: OracleTable, L_max: int = DEFAULT_LMAX) -> dict:
    """The whole grid of ``|f|`` as a map from length tuples to lengths."""
    grid = itertools.product(range(L_max + 1), repeat=f.remaining)
    return {g: _oracle_length(f, g) for g in grid}


# environments -------------------------------------------------------------

def load_env(path) -> dict:
    data = json.loads(Path(path).read_text())
    return env_from_json(data)


def env_from_json(data: dict) -> dict:
    if "bindings" in data:
        data = data["bindings"]
    env = {}
    for name, v in data.items():
        if isinstance(v, str):
            if not _is_bits(v):
                raise ValueError(f"binding {name}: strings must be over 0/1")
            env[name] = v
        elif isinstance(v, dict):
            entries = [(tuple(e["args"]), e["out"]) for e in v.get("entries", [])]
            env[name] = OracleTable.make(v.get("name", name), int(v["arity"]), entries,
                                         v.get("default", ""), v.get("rule"))
        else:
            raise ValueError(f"binding {name}: expected a string or an oracle table")
    return env


def env_to_json(env: dict) -> dict:
    return {k: (v if isinstance(v, str) else v.to_json()) for k, v in sorted(env.items())}


@dataclass
class ValidationReport:
    ok: bool = True
    checked: list = field(default_factory=list)
    violations: list = field(default_factory=list)
    # per flat binding, the certified strict part as a grid table over the non-tail arguments
    q_tables: dict = field(default_factory=dict)

    def fail(self, name: str, msg: str):
        self.ok = False
        self.violations.append({"binding": name, "reason": msg})

    def to_json(self) -> dict:
        return {"ok": self.ok, "checked": self.checked, "violations": self.violations}


def _half(L_max: int) -> int:
    return (L_max + 1) // 2


def validate_environment(env: dict, gamma: dict, L_max: int = DEFAULT_LMAX) -> ValidationReport:
    """Check bindings against their types on the length grid.

    Impredicative bindings must be nearly well-founded: their length may
    not keep growing in an argument whose tail lies above the result label,
    which on the grid means the maximum over that coordinate is already
    reached in its lower half.  Flat bindings must admit a decomposition
    into a strict part over the non-tail arguments plus the tail arguments;
    the strict part is the grid maximum of the deficit and must also be
    reached in the lower half of the tail coordinates.
    """
    rep = ValidationReport()
    for name, ty in sorted(gamma.items()):
        if name not in env:
            rep.fail(name, "unbound")
            continue
        v = env[name]
        rep.checked.append(name)
        if isinstance(ty, Base):
            if not isinstance(v, str):
                rep.fail(name, "base type bound to a non-string")
            continue
        if not isinstance(v, OracleTable):
            rep.fail(name, "arrow type bound to a non-oracle")
            continue
        if not all(isinstance(a, Base) for a in ty.args):
            rep.fail(name, f"only first-order oracles are supported, got {format_type(ty, True)}")
            continue
        if v.remaining != len(ty.args):
            rep.fail(name, f"arity {v.remaining} does not match {format_type(ty, True)}")
            continue
        table = length_table(v, L_max)
        msg = nwf_violation(table, ty, L_max)
        if msg:
            rep.fail(name, msg)
            continue
        if any(a.label == ty.result.label for a in ty.args):
            q, msg = flat_decomposition(table, ty, L_max)
            if msg:
                rep.fail(name, msg)
            else:
                rep.q_tables[name] = q
    return rep


def impredicative_positions(ty: Arrow) -> list:
    return [i for i, a in enumerate(ty.args) if type_tail(a) > ty.result.label]


def nwf_violation(table: dict, ty: Arrow, L_max: int) -> Optional[str]:
    h = _half(L_max)
    for i in impredicative_positions(ty):
        for g, val in table.items():
            if g[i] != L_max:
                continue
            low = g[:i] + (h,) + g[i + 1:]
            if table[low] != val:
                return (f"length keeps growing in impredicative argument {i + 1} "
                        f"({table[low]} at {h}, {val} at {L_max}); not nearly well-founded")
    return None


def p_table(table: dict, ty: Arrow) -> dict:
    """Least upper bound independent of the impredicative coordinates."""
    imp = impredicative_positions(ty)
    out = {}
    for g, val in table.items():
        key = tuple(0 if i in imp else x for i, x in enumerate(g))
        out[key] = max(out.get(key, 0), val)
    return {g: out[tuple(0 if i in imp else x for i, x in enumerate(g))] for g in table}


def deficit(val: int, zs: list, oracular: bool) -> int:
    top = max(zs, default=0)
    if oracular:
        return val if val > top else 0
    return max(val - top, 0)


def flat_decomposition(table: dict, ty: Arrow, L_max: int):
    """Grid strict part for a flat binding, or a reason it does not exist."""
    b = ty.result.label
    zpos = [i for i, a in enumerate(ty.args) if a.label == b]
    oracular = b.side == BOX
    ptab = p_table(table, ty)
    full, half = {}, {}
    h = _half(L_max)
    for g, val in ptab.items():
        key = tuple(x for i, x in enumerate(g) if i not in zpos)
        dv = deficit(val, [g[i] for i in zpos], oracular)
        full[key] = max(full.get(key, 0), dv)
        if all(g[i] <= h for i in zpos):
            half[key] = max(half.get(key, 0), dv)
    for key, v in full.items():
        if half.get(key, 0) != v:
            return None, (f"no additive decomposition: the excess over the tail arguments keeps "
                          f"growing ({half.get(key, 0)} up to length {h}, {v} up to {L_max})")
    return full, None
