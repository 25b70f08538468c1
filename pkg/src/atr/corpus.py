"""Corpus checking: every program types at its declared types, negatives fail as declared."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from . import errors
from .errors import AtrError
from .parser import parse_program
from .typecheck import check_program

EXPECT = re.compile(r"^#\s*expect:\s*(\w+)", re.M)


@dataclass
class CorpusEntry:
    file: str
    expect: Optional[str]
    outcome: str
    ok: bool
    detail: str = ""

    def to_json(self) -> dict:
        return {"file": self.file, "expect": self.expect, "outcome": self.outcome,
                "ok": self.ok, "detail": self.detail}


@dataclass
class CorpusReport:
    entries: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(e.ok for e in self.entries)

    def to_json(self) -> dict:
        return {"ok": self.ok, "entries": [e.to_json() for e in self.entries]}


def expected_error(text: str) -> Optional[str]:
    m = EXPECT.search(text)
    return m.group(1) if m else None


def check_file(path: Path, root: Optional[Path] = None) -> CorpusEntry:
    text = path.read_text()
    want = expected_error(text)
    name = str(path.relative_to(root)) if root else str(path)
    if want is not None and not isinstance(getattr(errors, want, None), type):
        return CorpusEntry(name, want, "bad-header", False, f"unknown error class {want}")
    try:
        prog = parse_program(text)
        types = check_program(prog)
    except AtrError as e:
        got = type(e).__name__
        if want is None:
            return CorpusEntry(name, None, got, False, str(e))
        return CorpusEntry(name, want, got, got == want, str(e))
    if want is not None:
        return CorpusEntry(name, want, "accepted", False, f"expected {want}")
    shown = ", ".join(f"{n} : {d.type}" for n, d in types.items())
    return CorpusEntry(name, None, "accepted", True, shown)


def check_corpus(directory) -> CorpusReport:
    root = Path(directory)
    rep = CorpusReport()
    for path in sorted(root.rglob("*.atr")):
        rep.entries.append(check_file(path, root))
    return rep
