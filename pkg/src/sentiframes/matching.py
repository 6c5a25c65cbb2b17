"""Tokenization and frame-entry matching.

Entries are matched as contiguous lemma sequences with a token-level
Aho-Corasick automaton.  At every start position only the longest entry
is kept, so ``выступать против`` wins over ``выступать``.  A match is
negated when a negation particle occurs within a fixed window of tokens
right before it; negation inverts the match's A0->A1 polarities.
"""

from __future__ import annotations

import re
import unicodedata
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .frames import EntryKind, Sign
from .lexicon import Lexicon

DEFAULT_NEGATION_PARTICLES = frozenset({"не", "ни"})

_CHUNK = re.compile(r"\S+")


@dataclass(frozen=True)
class Token:
    surface: str
    lemma: str
    index: int
    start_char: int = 0
    end_char: int = 0


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch)[0] in "PS"


def tokenize(text: str, lemma_table: Mapping[str, str] | None = None) -> list[Token]:
    """Split on whitespace, peeling leading/trailing punctuation into tokens.

    Every peeled punctuation character becomes its own token; punctuation
    inside a word (``аль-каеда``) is kept.  Lemmas default to the lowercased
    surface unless ``lemma_table`` has an entry for it.
    """
    table = lemma_table or {}
    pieces: list[tuple[str, int, int]] = []
    for m in _CHUNK.finditer(text):
        word, start = m.group(), m.start()
        lo, hi = 0, len(word)
        while lo < hi and _is_punct(word[lo]):
            lo += 1
        while hi > lo and _is_punct(word[hi - 1]):
            hi -= 1
        pieces.extend((word[i], start + i, start + i + 1) for i in range(lo))
        if lo < hi:
            pieces.append((word[lo:hi], start + lo, start + hi))
        pieces.extend((word[i], start + i, start + i + 1) for i in range(hi, len(word)))
    tokens = []
    for i, (surface, s, e) in enumerate(pieces):
        low = surface.lower()
        tokens.append(Token(surface, table.get(low, low), i, s, e))
    return tokens


def read_lemma_table(lines: Iterable[str]) -> dict[str, str]:
    """Parse ``surface<TAB>lemma`` lines; ``#`` starts a comment line."""
    table = {}
    for lineno, line in enumerate(lines, 1):
        line = line.rstrip("\r\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2 or not parts[0].strip() or not parts[1].strip():
            raise ValueError(f"lemma table line {lineno}: expected 'surface<TAB>lemma'")
        table[parts[0].strip().lower()] = parts[1].strip().lower()
    return table


def read_alias_table(lines: Iterable[str]) -> dict[str, str]:
    """Parse ``surface<TAB>canonical`` lines into canonical-form aliases."""
    return {canonical_entity(k): canonical_entity(v)
            for k, v in read_lemma_table(lines).items()}


def canonical_entity(text: str, aliases: Mapping[str, str] | None = None) -> str:
    key = " ".join(text.lower().split())
    if aliases:
        return aliases.get(key, key)
    return key


# --- index -------------------------------------------------------------------

@dataclass
class _Node:
    children: dict[str, "_Node"] = field(default_factory=dict)
    fail: "_Node | None" = None
    pattern: tuple[str, ...] | None = None
    # longest-first patterns that end here, via failure chain
    outputs: list[tuple[str, ...]] = field(default_factory=list)


class EntryIndex:
    """Token-level Aho-Corasick automaton over entry lemma sequences.

    Each pattern maps to its owners, a set of ``(frame_id, kind)``, and
    each frame id to its A0->A1 signs.  Frames without an A0->A1 polarity
    are never indexed.
    """

    def __init__(self) -> None:
        self._root = _Node()
        self.owners: dict[tuple[str, ...], set[tuple[str, EntryKind]]] = {}
        self.frame_signs: dict[str, frozenset[Sign]] = {}
        self._built = False

    def add(self, tokens: tuple[str, ...], frame_id: str, kind: EntryKind,
            signs: frozenset[Sign]) -> None:
        if not tokens:
            raise ValueError("cannot index an empty entry")
        node = self._root
        for tok in tokens:
            node = node.children.setdefault(tok, _Node())
        node.pattern = tokens
        self.owners.setdefault(tokens, set()).add((frame_id, kind))
        self.frame_signs[frame_id] = signs
        self._built = False

    def build(self) -> "EntryIndex":
        root = self._root
        root.fail = None
        root.outputs = []
        queue: deque[_Node] = deque()
        for child in root.children.values():
            child.fail = root
            queue.append(child)
        while queue:
            node = queue.popleft()
            inherited = node.fail.outputs if node.fail is not None else []
            node.outputs = ([node.pattern] if node.pattern else []) + inherited
            for tok, child in node.children.items():
                f = node.fail
                while f is not None and tok not in f.children:
                    f = f.fail
                child.fail = f.children[tok] if f is not None else root
                queue.append(child)
        self._built = True
        return self

    def __len__(self) -> int:
        return sum(len(o) for o in self.owners.values())

    @property
    def patterns(self) -> list[tuple[str, ...]]:
        return sorted(self.owners)

    def patterns_for(self, frame_id: str) -> list[tuple[str, ...]]:
        return sorted(p for p, owners in self.owners.items()
                      if any(fid == frame_id for fid, _ in owners))

    def scan(self, lemmas: list[str]) -> list[tuple[int, int, tuple[str, ...]]]:
        """All occurrences of any pattern as ``(start, end, pattern)``, end inclusive."""
        if not self._built:
            self.build()
        root = self._root
        node = root
        found = []
        for i, tok in enumerate(lemmas):
            while node is not root and tok not in node.children:
                node = node.fail
            node = node.children.get(tok, root)
            for pat in node.outputs:
                found.append((i - len(pat) + 1, i, pat))
        return found

    # pickling support for worker processes: drop the automaton, rebuild lazily
    def __getstate__(self):
        return {"owners": self.owners, "frame_signs": self.frame_signs}

    def __setstate__(self, state):
        self.__init__()
        for tokens, owners in state["owners"].items():
            for fid, kind in owners:
                self.add(tokens, fid, kind, state["frame_signs"][fid])


def build_entry_index(lexicon: Lexicon,
                      lemma_table: Mapping[str, str] | None = None) -> EntryIndex:
    index = EntryIndex()
    table = lemma_table or {}
    for entry, fid in lexicon.entry_index_source:
        signs = lexicon.frames[fid].a0_a1_signs()
        if not signs:
            continue
        tokens = tuple(table.get(t, t) for t in entry.tokens)
        index.add(tokens, fid, entry.kind, signs)
    return index.build()


# --- matching ----------------------------------------------------------------

@dataclass(frozen=True)
class EntryMatch:
    start: int
    end: int
    frame_ids: tuple[str, ...]
    negated: bool
    base_polarities: frozenset[Sign]
    effective_polarities: frozenset[Sign]

    @property
    def span(self) -> tuple[int, int]:
        return (self.start, self.end)

    def with_negation(self, negated: bool) -> "EntryMatch":
        eff = frozenset(s.invert() for s in self.base_polarities) if negated else self.base_polarities
        return EntryMatch(self.start, self.end, self.frame_ids, negated,
                          self.base_polarities, eff)


def make_match(start: int, end: int, frame_ids: Iterable[str],
               base: Iterable[Sign], negated: bool) -> EntryMatch:
    base = frozenset(base)
    return EntryMatch(start, end, tuple(sorted(set(frame_ids))), False, base, base) \
        .with_negation(negated)


def find_matches(index: EntryIndex, stream: list[Token], negation_window: int = 1,
                 particles: Iterable[str] = DEFAULT_NEGATION_PARTICLES) -> list[EntryMatch]:
    """Longest entry match at each start position, with negation flags."""
    if negation_window < 1:
        raise ValueError("negation_window must be >= 1")
    particles = frozenset(p.lower() for p in particles)
    lemmas = [t.lemma for t in stream]
    longest: dict[int, tuple[int, tuple[str, ...]]] = {}
    for start, end, pat in index.scan(lemmas):
        if start not in longest or end > longest[start][0]:
            longest[start] = (end, pat)
    out = []
    for start in sorted(longest):
        end, pat = longest[start]
        fids = {fid for fid, _ in index.owners[pat]}
        base = frozenset().union(*(index.frame_signs[f] for f in fids))
        window = lemmas[max(0, start - negation_window):start]
        negated = any(tok in particles for tok in window)
        out.append(make_match(start, end, fids, base, negated))
    return out
