"""Sentence-level attitudes between named-entity pairs.

For an ordered pair of mentions (left plays A0, right plays A1), the
internal entries are the matches lying strictly between the two
mentions.  A pair with no internal entry yields nothing.  Otherwise the
attitude is positive only if every effective polarity of every internal
entry is positive, and negative in all other cases.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

from .frames import Sign
from .matching import EntryMatch


class Pairing(str, enum.Enum):
    ALL_PAIRS = "all"
    ADJACENT_ONLY = "adjacent"


@dataclass(frozen=True)
class EntityMention:
    start: int
    end: int
    surface: str
    canonical: str
    type: str | None = None

    @property
    def span(self) -> tuple[int, int]:
        return (self.start, self.end)


@dataclass(frozen=True)
class PairAttitude:
    source: str
    target: str
    sentiment: Sign
    evidence: tuple[EntryMatch, ...]
    sentence_id: str = ""
    source_span: tuple[int, int] = (0, 0)
    target_span: tuple[int, int] = (0, 0)


def pair_sentiment(internal: Sequence[EntryMatch]) -> Sign:
    if all(s is Sign.POS for m in internal for s in m.effective_polarities):
        return Sign.POS
    return Sign.NEG


def extract_sentence_attitudes(mentions: Sequence[EntityMention],
                               matches: Sequence[EntryMatch],
                               pairing: Pairing = Pairing.ALL_PAIRS,
                               sentence_id: str = "") -> list[PairAttitude]:
    """Emit one attitude per ordered mention pair that encloses an entry match.

    Output is ordered by left-mention start, then right-mention start.
    """
    ordered = sorted(mentions, key=lambda m: (m.start, m.end))
    matches = sorted(matches, key=lambda m: (m.start, m.end))
    out = []
    for i, left in enumerate(ordered):
        for j in range(i + 1, len(ordered)):
            right = ordered[j]
            if right.start <= left.end:
                continue
            if pairing is Pairing.ADJACENT_ONLY and any(
                    m.start > left.end and m.end < right.start for m in ordered[i + 1:j]):
                break
            internal = tuple(m for m in matches if m.start > left.end and m.end < right.start)
            if not internal:
                continue
            out.append(PairAttitude(left.canonical, right.canonical, pair_sentiment(internal),
                                    internal, sentence_id, left.span, right.span))
    return out
