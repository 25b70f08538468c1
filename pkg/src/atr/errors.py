"""Exception hierarchy shared by every layer of the pipeline."""

from __future__ import annotations


class AtrError(Exception):
    """Base class for all package errors."""


class ParseError(AtrError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col


class AtrTypeError(AtrError):
    """A typing rule failed."""

    def __init__(self, rule: str, message: str, term=None, expected=None, got=None):
        parts = [f"[{rule}] {message}"]
        if expected is not None:
            parts.append(f"expected {expected}")
        if got is not None:
            parts.append(f"got {got}")
        if term is not None:
            parts.append(f"at {term}")
        super().__init__("; ".join(parts))
        self.rule = rule
        self.term = term
        self.expected = expected
        self.got = got


class AffinityError(AtrTypeError):
    pass


class TailPosError(AtrTypeError):
    pass


class StuckState(AtrError):
    pass


class FuelExhausted(AtrError):
    pass


class GridExceeded(AtrError):
    pass


class UnvalidatedCombinator(AtrError):
    pass


class SopTypeError(AtrError):
    pass


class SubstitutionFailure(AtrError):
    pass


class FlatVarError(AtrError):
    pass


class ExtractionFailure(AtrError):
    pass


class ShapeMismatch(AtrError):
    pass


class SoundnessViolation(AtrError):
    pass


class DecompositionViolation(AtrError):
    pass
