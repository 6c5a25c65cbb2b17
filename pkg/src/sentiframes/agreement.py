"""Agreement between two experts' connotation sets.

Each expert's frames are flattened into a set of signed connotations.
Two connotations agree when they name the same item, the same dimension
and the same sign; confidence plays no part.  ``R1`` is the share of the
first set found in the second, ``R2`` the share of the second found in
the first, and their harmonic mean summarizes both.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from typing import Iterable, NamedTuple

from .frames import SentimentFrame, Sign


class ConnotationConflict(ValueError):
    pass


class EmptySetError(ValueError):
    pass


class Connotation(NamedTuple):
    item: str
    dimension: tuple[str, ...]
    sign: Sign


def _dimensions(frame: SentimentFrame) -> Iterable[tuple[tuple[str, ...], Sign]]:
    for p in frame.polarity:
        yield ("polarity", p.source.value, p.target.value), p.sign
    for e in frame.effects:
        yield ("effect", e.role.value), e.sign
    for s in frame.states:
        yield ("state", s.role.value), s.sign


def connotation_set(frames: Iterable[SentimentFrame], by: str = "frame") -> frozenset[Connotation]:
    """Flatten frames into connotations keyed by frame id or by entry text.

    With ``by="word"`` every entry of a frame gets its own copy of the
    frame's connotations, so experts who group words into differently
    named frames can still be compared word by word.
    """
    if by not in ("frame", "word"):
        raise ValueError(f"unknown keying {by!r}")
    signs: dict[tuple[str, tuple[str, ...]], Sign] = {}
    for frame in frames:
        items = [frame.id] if by == "frame" else sorted(e.text for e in frame.entries)
        for item in items:
            for dim, sign in _dimensions(frame):
                prev = signs.setdefault((item, dim), sign)
                if prev is not sign:
                    raise ConnotationConflict(
                        f"{item!r}: conflicting signs for {'/'.join(dim)}")
    return frozenset(Connotation(item, dim, sign) for (item, dim), sign in signs.items())


@dataclass(frozen=True)
class Agreement:
    r1: float
    r2: float
    hm: float
    common: int = 0
    size1: int = 0
    size2: int = 0

    def __str__(self) -> str:
        return f"R1={round2(self.r1)} R2={round2(self.r2)} HM={round2(self.hm)}"


def harmonic_mean(r1: float, r2: float) -> float:
    """Harmonic mean of two ratios, defined as 0 when both are 0."""
    if r1 + r2 <= 0:
        return 0.0
    return 2 * r1 * r2 / (r1 + r2)


def round2(value: float) -> str:
    return str(Decimal(repr(value)).quantize(Decimal("0.01"), rounding=ROUND_HALF_UP))


def agreement_ratios(e1: frozenset, e2: frozenset) -> Agreement:
    if not e1 or not e2:
        raise EmptySetError("both connotation sets must be non-empty")
    common = len(e1 & e2)
    r1 = common / len(e1)
    r2 = common / len(e2)
    # 2*R1*R2/(R1+R2) reduces to this, which avoids compounding float error
    hm = 2 * common / (len(e1) + len(e2))
    return Agreement(r1, r2, hm, common, len(e1), len(e2))
