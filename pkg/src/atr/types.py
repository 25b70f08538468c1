"""Labeled types: base types N_l and uncurried arrows, with subtyping and shifting."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Union

from .labels import BOX, DIA, EPS, Label, label_leq, parse_label


@dataclass(frozen=True)
class Base:
    label: Label

    def __str__(self) -> str:
        return f"N_{self.label}"


@dataclass(frozen=True)
class Arrow:
    args: tuple
    result: "AtrType"

    def __post_init__(self):
        if not self.args:
            raise ValueError("arrow with no arguments")
        if isinstance(self.result, Arrow):
            # keep the uncurried normal form: (a)->(b)->c == (a,b)->c
            object.__setattr__(self, "args", tuple(self.args) + self.result.args)
            object.__setattr__(self, "result", self.result.result)
        else:
            object.__setattr__(self, "args", tuple(self.args))

    def __str__(self) -> str:
        parts = [f"({a})" if isinstance(a, Arrow) else str(a) for a in self.args]
        return "→".join(parts + [str(self.result)])


AtrType = Union[Base, Arrow]


def N(label: Union[Label, str] = EPS) -> Base:
    return Base(parse_label(label) if isinstance(label, str) else label)


def arrow(*parts: AtrType) -> AtrType:
    """``arrow(a, b, c)`` is a→b→c; a single part is returned unchanged."""
    if len(parts) == 1:
        return parts[0]
    return Arrow(tuple(parts[:-1]), parts[-1])


def args_of(t: AtrType) -> tuple:
    return t.args if isinstance(t, Arrow) else ()


def result_of(t: AtrType) -> Base:
    return t.result if isinstance(t, Arrow) else t


def drop_args(t: AtrType, n: int) -> AtrType:
    """Type remaining after applying ``n`` arguments."""
    if n == 0:
        return t
    assert isinstance(t, Arrow) and n <= len(t.args)
    rest = t.args[n:]
    return Arrow(rest, t.result) if rest else t.result


def type_tail(t: AtrType) -> Label:
    return result_of(t).label


def type_depth(t: AtrType) -> int:
    return type_tail(t).depth


def type_side(t: AtrType) -> str:
    return type_tail(t).side


def type_level(t: AtrType) -> int:
    if isinstance(t, Base):
        return 0
    return 1 + max(type_level(a) for a in t.args)


def type_shape(t: AtrType) -> str:
    """The underlying simple type with labels erased."""
    if isinstance(t, Base):
        return "N"
    parts = [f"({type_shape(a)})" if isinstance(a, Arrow) else "N" for a in t.args]
    return "→".join(parts + ["N"])


def is_flat(t: AtrType) -> bool:
    return isinstance(t, Arrow) and any(type_tail(a) == t.result.label for a in t.args)


def is_strict(t: AtrType) -> bool:
    return isinstance(t, Arrow) and not is_flat(t)


def is_predicative(t: AtrType) -> bool:
    return isinstance(t, Arrow) and all(type_tail(a) <= t.result.label for a in t.args)


def is_impredicative(t: AtrType) -> bool:
    return isinstance(t, Arrow) and not is_predicative(t)


def same_shape(a: AtrType, b: AtrType) -> bool:
    return type_shape(a) == type_shape(b)


def subtype(a: AtrType, b: AtrType) -> bool:
    if isinstance(a, Base) and isinstance(b, Base):
        return label_leq(a.label, b.label)
    if isinstance(a, Arrow) and isinstance(b, Arrow):
        if len(a.args) != len(b.args):
            return False
        return all(subtype(y, x) for x, y in zip(a.args, b.args)) and subtype(a.result, b.result)
    return False


def undo(tau: AtrType, l: Label) -> Optional[Label]:
    """Largest argument label of a leftmost depth-increasing application building an N_l value."""
    if not isinstance(tau, Arrow) or type_level(tau) != 1:
        raise ValueError("undo expects a level-1 type")
    l0 = tau.result.label
    if is_flat(tau) or l0 > l:
        return None
    lower = [a.label for a in tau.args if a.label < l0]
    lp = max(lower) if lower else EPS
    pos = l.text.find(l0.text)
    if pos < 0:
        return None
    lpp = l.text[pos + len(l0.text):]
    return Label(lp.text + lpp)


def _D_level0(args: Sequence[AtrType], l0: Label, new: Sequence[AtrType]) -> int:
    diffs = [type_depth(n) - type_depth(a) for a, n in zip(args, new) if subtype(a, Base(l0))]
    return max(diffs, default=0)


def _D_level1(args: Sequence[AtrType], l: Label, new: Sequence[AtrType]) -> int:
    best = 0
    for a, n in zip(args, new):
        u = undo(a, l)
        if u is None:
            continue
        best = max(best, type_depth(n) - type_depth(a) + _D_level1(args, u, new))
    return best


def shift_D(t: AtrType, new_args: Sequence[AtrType]) -> int:
    """The depth gap a shift of ``t`` to arguments ``new_args`` requires in the result."""
    args = args_of(t)
    if len(args) != len(new_args):
        raise ValueError("argument count mismatch")
    l0 = type_tail(t)
    idx0 = [i for i, a in enumerate(args) if isinstance(a, Base)]
    idx1 = [i for i, a in enumerate(args) if isinstance(a, Arrow)]
    d0 = _D_level0([args[i] for i in idx0], l0, [new_args[i] for i in idx0])
    d1 = _D_level1([args[i] for i in idx1], l0, [new_args[i] for i in idx1])
    return d0 + d1


def shifts_to(a: AtrType, b: AtrType, component: bool = False) -> bool:
    """The shifts-to relation.

    Tail-equality preservation is enforced literally on the outermost arrow.
    For a level-1 type sitting inside a level-2 shift (``component=True``)
    only flatness has to be preserved, which is what admits the shift of
    ``prn`` used when typing ``fcat``.
    """
    if isinstance(a, Base) and isinstance(b, Base):
        return a.label.side == b.label.side and a.label.depth <= b.label.depth
    if not (isinstance(a, Arrow) and isinstance(b, Arrow)) or len(a.args) != len(b.args):
        return False
    if not shifts_to(a.result, b.result):
        return False
    if not all(shifts_to(x, y, component=True) for x, y in zip(a.args, b.args)):
        return False
    l0, l0p = a.result.label, b.result.label
    if component:
        if is_flat(a) and not is_flat(b):
            return False
    else:
        for x, y in zip(a.args, b.args):
            if type_tail(x) == l0 and type_tail(y) != l0p:
                return False
    return l0p.depth - l0.depth >= shift_D(a, b.args)


def relabel_result(t: AtrType, l: Label) -> AtrType:
    if isinstance(t, Base):
        return Base(l)
    return Arrow(t.args, Base(l))


def format_type(t: AtrType, ascii: bool = False) -> str:
    if not ascii:
        return str(t)
    if isinstance(t, Base):
        return f"N@{t.label.ascii()}"
    parts = [f"({format_type(a, True)})" if isinstance(a, Arrow) else format_type(a, True) for a in t.args]
    return " -> ".join(parts + [format_type(t.result, True)])


__all__ = [
    "Base", "Arrow", "AtrType", "N", "arrow", "args_of", "result_of", "drop_args",
    "type_tail", "type_depth", "type_side", "type_level", "type_shape", "is_flat",
    "is_strict", "is_predicative", "is_impredicative", "subtype", "undo", "shift_D",
    "shifts_to", "relabel_result", "format_type", "same_shape", "BOX", "DIA",
]
