"""Size types for polynomials: labeled tally types T_l, arrows, products and the cost type.

``Base``/``Arrow`` from the ATR type module double as T_l and size arrows
(``|N_l| = T_l`` is a shape-preserving relabeling, so the same objects
serve).  Products and the unlabeled cost type only occur in time
complexity polynomials.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from ..errors import SopTypeError
from ..labels import EPS, parse_label
from ..types import Arrow, AtrType, Base


@dataclass(frozen=True)
class Prod:
    left: "SizeType"
    right: "SizeType"


@dataclass(frozen=True)
class CostT:
    """The cost component type T."""


@dataclass(frozen=True)
class Unit:
    pass


COST = CostT()
UNIT = Unit()

SizeType = Union[Base, Arrow, Prod, CostT, Unit]


def size_type_of(t: AtrType) -> AtrType:
    """``|σ|``: the same tree read as a size type."""
    return t


def tc_type(t: AtrType) -> Prod:
    """``‖σ‖ = T × ⟨σ⟩``."""
    return Prod(COST, pot_type(t))


def pot_type(t: AtrType) -> SizeType:
    """``⟨N_l⟩ = T_l`` and ``⟨σ→τ⟩ = ⟨σ⟩→‖τ‖``, built one argument at a time."""
    if isinstance(t, Base):
        return t
    out: SizeType = tc_type(t.result)
    for a in reversed(t.args):
        out = _Fn(pot_type(a), out)
    return out


@dataclass(frozen=True)
class _Fn:
    """A curried arrow whose result may be a product (time types only)."""

    arg: SizeType
    result: SizeType


def format_size_type(t) -> str:
    if isinstance(t, Base):
        return f"T@{t.label.ascii()}"
    if isinstance(t, CostT):
        return "T"
    if isinstance(t, Unit):
        return "1"
    if isinstance(t, Prod):
        return f"{_wrap(t.left)} * {_wrap(t.right)}"
    if isinstance(t, _Fn):
        return f"{_wrap(t.arg)} -> {format_size_type(t.result)}"
    if isinstance(t, Arrow):
        parts = [_wrap(a) for a in t.args]
        return " -> ".join(parts + [format_size_type(t.result)])
    raise TypeError(f"not a size type: {t!r}")


def _wrap(t) -> str:
    s = format_size_type(t)
    return f"({s})" if isinstance(t, (Arrow, _Fn, Prod)) else s


def parse_size_type(text: str):
    """Read ``T@d0 -> T@e``, ``T * T@b1``, ``T`` and parenthesized forms."""
    toks = text.replace("(", " ( ").replace(")", " ) ").replace("->", " -> ").replace("*", " * ").split()
    pos = 0

    def peek():
        return toks[pos] if pos < len(toks) else None

    def arrow():
        nonlocal pos
        left = prod()
        if peek() == "->":
            pos += 1
            right = arrow()
            if isinstance(right, (Base, Arrow)) and isinstance(left, (Base, Arrow)):
                return Arrow((left,), right)
            return _Fn(left, right)
        return left

    def prod():
        nonlocal pos
        left = atom()
        if peek() == "*":
            pos += 1
            return Prod(left, prod())
        return left

    def atom():
        nonlocal pos
        tok = peek()
        if tok is None:
            raise SopTypeError("unexpected end of size type")
        pos += 1
        if tok == "(":
            t = arrow()
            if peek() != ")":
                raise SopTypeError(f"expected ')' in size type {text!r}")
            pos += 1
            return t
        if tok == "T":
            return COST
        if tok == "1":
            return UNIT
        if tok.startswith("T@"):
            return Base(parse_label(tok[2:]))
        raise SopTypeError(f"unreadable size type token {tok!r}")

    t = arrow()
    if pos != len(toks):
        raise SopTypeError(f"trailing input in size type {text!r}")
    return t


def T(label="e") -> Base:
    return Base(parse_label(label) if isinstance(label, str) else label)


T_EPS = Base(EPS)
