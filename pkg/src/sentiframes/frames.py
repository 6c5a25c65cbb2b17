"""Sentiment frame data model.

A frame groups predicate words and expressions that share the same
participant roles and the same signed connotations: attitudes between
participants (and from the text author), effects on participants and
mental states of participants.  Every connotation carries a confidence
of either 1.0 (holds almost always) or 0.7 (default reading).

The types here are plain immutable records.  Constructors accept
anything so that a malformed frame can still be represented and then
diagnosed by :func:`validate_frame`, which returns violations as data.
"""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping

VALID_CONFIDENCES = (1.0, 0.7)


class Role(str, enum.Enum):
    A0 = "A0"
    A1 = "A1"
    A2 = "A2"
    A3 = "A3"
    AUTHOR = "AUTHOR"

    @classmethod
    def parse(cls, text: str) -> "Role":
        key = text.strip().upper()
        try:
            return cls(key)
        except ValueError:
            raise ValueError(f"unknown role {text!r}") from None


class Sign(str, enum.Enum):
    POS = "pos"
    NEG = "neg"

    def invert(self) -> "Sign":
        return Sign.NEG if self is Sign.POS else Sign.POS

    @classmethod
    def parse(cls, text: str) -> "Sign":
        key = text.strip().lower()
        if key in ("pos", "+"):
            return cls.POS
        if key in ("neg", "-", "−"):
            return cls.NEG
        raise ValueError(f"unknown sign {text!r}")

    @property
    def effect_symbol(self) -> str:
        return "+" if self is Sign.POS else "-"


class EntryKind(str, enum.Enum):
    SINGLE_WORD = "single_word"
    IDIOM = "idiom"
    LIGHT_VERB = "light_verb"
    WORD_WITH_PREPOSITION = "word_with_preposition"
    COMPOSITIONAL = "compositional"
    OTHER = "other"


@dataclass(frozen=True, order=True)
class PolarityAssertion:
    source: Role
    target: Role
    sign: Sign
    confidence: float = 1.0


@dataclass(frozen=True, order=True)
class EffectAssertion:
    role: Role
    sign: Sign
    confidence: float = 1.0


@dataclass(frozen=True, order=True)
class StateAssertion:
    role: Role
    sign: Sign
    confidence: float = 1.0


@dataclass(frozen=True, order=True)
class FrameEntry:
    """One lexical realization of a frame.

    ``pos`` is an optional part-of-speech annotation used only for
    lexicon statistics (``verb``, ``noun``, ``phrase`` or ``other``).
    """

    tokens: tuple[str, ...]
    kind: EntryKind = EntryKind.SINGLE_WORD
    pos: str | None = None

    @classmethod
    def from_text(cls, text: str, kind: EntryKind | None = None,
                  pos: str | None = None) -> "FrameEntry":
        tokens = tuple(text.lower().split())
        if kind is None:
            kind = EntryKind.SINGLE_WORD if len(tokens) == 1 else EntryKind.OTHER
        return cls(tokens, kind, pos)

    @property
    def text(self) -> str:
        return " ".join(self.tokens)


@dataclass(frozen=True)
class SentimentFrame:
    id: str
    title: str
    roles: Mapping[Role, str] = field(default_factory=dict)
    polarity: frozenset[PolarityAssertion] = frozenset()
    effects: frozenset[EffectAssertion] = frozenset()
    states: frozenset[StateAssertion] = frozenset()
    entries: frozenset[FrameEntry] = frozenset()

    def __post_init__(self) -> None:
        # accept any iterables, store frozensets so equality is set-equality
        object.__setattr__(self, "roles", dict(self.roles))
        object.__setattr__(self, "polarity", frozenset(self.polarity))
        object.__setattr__(self, "effects", frozenset(self.effects))
        object.__setattr__(self, "states", frozenset(self.states))
        object.__setattr__(self, "entries", frozenset(self.entries))

    def a0_a1_signs(self) -> frozenset[Sign]:
        return frozenset(p.sign for p in self.polarity
                         if p.source is Role.A0 and p.target is Role.A1)

    def polarity_sign(self, source: Role, target: Role) -> Sign | None:
        for p in self.polarity:
            if p.source is source and p.target is target:
                return p.sign
        return None


@dataclass(frozen=True, order=True)
class Violation:
    frame_id: str
    code: str
    message: str

    def __str__(self) -> str:
        return f"{self.frame_id}: [{self.code}] {self.message}"


def _confidence_ok(value: object) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool) \
        and any(abs(float(value) - c) < 1e-9 for c in VALID_CONFIDENCES)


def _duplicates(keys: Iterable) -> list:
    return sorted((k for k, n in Counter(keys).items() if n > 1), key=repr)


def validate_frame(frame: SentimentFrame) -> list[Violation]:
    """Check every structural rule of a frame.

    Returns a sorted list of violations; an empty list means the frame
    is valid.  The result does not depend on the order in which
    assertions or entries were supplied.
    """
    fid = frame.id
    out: set[Violation] = set()

    def add(code: str, message: str) -> None:
        out.add(Violation(fid, code, message))

    if not isinstance(fid, str) or not fid.strip():
        add("missing_id", "frame id must be a non-empty string")
    if Role.AUTHOR in frame.roles:
        add("author_in_roles", "AUTHOR is implicit and must not be declared in roles")

    referenced: set[Role] = set()

    for p in sorted(frame.polarity):
        label = f"polarity {p.source.value}->{p.target.value}"
        if p.target is Role.AUTHOR:
            add("author_as_target", f"{label}: AUTHOR cannot be a polarity target")
        if p.source == p.target:
            add("self_polarity", f"{label}: source and target must differ")
        if not _confidence_ok(p.confidence):
            add("invalid_confidence", f"{label}: confidence {p.confidence!r} not in {VALID_CONFIDENCES}")
        referenced.update(r for r in (p.source, p.target) if r is not Role.AUTHOR)
    for key in _duplicates((p.source, p.target) for p in frame.polarity):
        add("duplicate_polarity",
            f"more than one polarity assertion for {key[0].value}->{key[1].value}")

    for kind, items in (("effect", frame.effects), ("state", frame.states)):
        for a in sorted(items):
            if a.role is Role.AUTHOR:
                add(f"author_in_{kind}", f"AUTHOR is not a valid {kind} role")
            else:
                referenced.add(a.role)
            if not _confidence_ok(a.confidence):
                add("invalid_confidence",
                    f"{kind} {a.role.value}: confidence {a.confidence!r} not in {VALID_CONFIDENCES}")
        for role in _duplicates(a.role for a in items):
            add(f"duplicate_{kind}", f"more than one {kind} assertion for {role.value}")

    for role in sorted(referenced - set(frame.roles), key=lambda r: r.value):
        add("undeclared_role", f"role {role.value} is used by an assertion but not declared")

    for entry in sorted(frame.entries):
        shown = " ".join(entry.tokens) or "<empty>"
        if not entry.tokens:
            add("empty_entry", "entry has no tokens")
            continue
        if any(not t or any(ch.isspace() for ch in t) for t in entry.tokens):
            add("entry_whitespace", f"entry {shown!r}: tokens must be non-empty and contain no whitespace")
        if any(t != t.lower() for t in entry.tokens):
            add("entry_case", f"entry {shown!r}: tokens must be lowercase")
        if entry.kind is EntryKind.SINGLE_WORD and len(entry.tokens) != 1:
            add("entry_arity", f"entry {shown!r}: single_word entry must have exactly one token")
        elif entry.kind not in (EntryKind.SINGLE_WORD, EntryKind.OTHER) and len(entry.tokens) < 2:
            add("entry_arity", f"entry {shown!r}: {entry.kind.value} entry needs at least two tokens")
    for tokens in _duplicates(e.tokens for e in frame.entries):
        add("duplicate_entry", f"entry {' '.join(tokens)!r} listed more than once")

    return sorted(out)
