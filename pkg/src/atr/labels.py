"""Tier labels: alternating box/diamond strings ending in a diamond.

A label is stored canonically as its string; side and depth are derived.
Box labels have the form (□◇)^d and diamond labels ◇(□◇)^d.  The linear
order is the suffix order, which coincides with ordering by ``index``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import total_ordering

BOX = "□"
DIA = "◇"

_ASCII_RE = re.compile(r"^(e|eps|ε|[db]\d+|(?:\[\]|<>)+)$")


@total_ordering
@dataclass(frozen=True)
class Label:
    text: str

    def __post_init__(self):
        t = self.text
        if t and t[-1] != DIA:
            raise ValueError(f"label {t!r} must end in {DIA}")
        for a, b in zip(t, t[1:]):
            if a == b or a not in (BOX, DIA) or b not in (BOX, DIA):
                raise ValueError(f"label {t!r} must alternate {BOX}/{DIA}")

    @staticmethod
    def of(side: str, depth: int) -> "Label":
        if depth < 0:
            raise ValueError("negative depth")
        if side == BOX:
            return Label((BOX + DIA) * depth)
        if side == DIA:
            return Label(DIA + (BOX + DIA) * depth)
        raise ValueError(f"bad side {side!r}")

    @staticmethod
    def from_index(i: int) -> "Label":
        return Label.of(BOX if i % 2 == 0 else DIA, i // 2)

    @property
    def side(self) -> str:
        return DIA if len(self.text) % 2 == 1 else BOX

    @property
    def depth(self) -> int:
        return self.text.count(BOX)

    @property
    def index(self) -> int:
        return len(self.text)

    @property
    def oracular(self) -> bool:
        return self.side == BOX

    @property
    def computational(self) -> bool:
        return self.side == DIA

    def succ(self) -> "Label":
        return Label.from_index(self.index + 1)

    def __lt__(self, other: "Label") -> bool:
        return self.index < other.index

    def ascii(self) -> str:
        if not self.text:
            return "e"
        return ("d" if self.side == DIA else "b") + str(self.depth)

    def __str__(self) -> str:
        return self.text or "ε"

    def __repr__(self) -> str:
        return f"Label({self})"


EPS = Label("")
DIAMOND = Label(DIA)


def parse_label(s: str) -> Label:
    """Read a label from ``e``/``eps``/``ε``, ``dK``/``bK`` or a ``[]``/``<>`` string."""
    s = s.strip()
    if s in ("", "e", "eps", "ε"):
        return EPS
    if s[0] in "db" and s[1:].isdigit():
        return Label.of(DIA if s[0] == "d" else BOX, int(s[1:]))
    if set(s) <= {BOX, DIA}:
        return Label(s)
    if _ASCII_RE.match(s):
        return Label(s.replace("[]", BOX).replace("<>", DIA))
    raise ValueError(f"unreadable label {s!r}")


def label_depth(l: Label) -> int:
    return l.depth


def label_side(l: Label) -> str:
    return l.side


def label_succ(l: Label) -> Label:
    return l.succ()


def label_leq(a: Label, b: Label) -> bool:
    """Suffix order: ``a <= b`` iff ``a`` is a suffix of ``b``."""
    return b.text.endswith(a.text)


def label_join(a: Label, b: Label) -> Label:
    return a if b <= a else b
