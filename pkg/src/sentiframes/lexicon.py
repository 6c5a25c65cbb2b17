"""Reading, writing and summarizing frame lexicons.

The canonical file is a UTF-8 JSON document::

    {
      "format": "sentiframes-lexicon",
      "version": 1,
      "frame_count": 1,
      "frames": [
        {
          "id": "осудить",
          "title": "осудить",
          "roles": {"A0": "who condemns", "A1": "who is condemned"},
          "polarity": [["A0", "A1", "neg", 1.0]],
          "effect": [["A1", "-", 1.0]],
          "state": [["A1", "neg", 1.0]],
          "variants": [{"text": "осудить", "kind": "single_word", "pos": "verb"}]
        }
      ]
    }

Variants may also be given as bare strings.  The upstream RuSentiFrames
release (``frames.json``: a mapping of frame id to ``title``, ``variants``,
``roles`` and a nested ``frames`` block) is read by :func:`import_upstream`.
"""

from __future__ import annotations

import io
import json
from collections import Counter
from dataclasses import dataclass, field
from typing import IO, Any, Iterable, Mapping

from .frames import (
    EffectAssertion,
    EntryKind,
    FrameEntry,
    PolarityAssertion,
    Role,
    SentimentFrame,
    Sign,
    StateAssertion,
    Violation,
    validate_frame,
)

FORMAT_NAME = "sentiframes-lexicon"
FORMAT_VERSION = 1
POS_CLASSES = ("verb", "noun", "phrase", "other")


class LexiconError(Exception):
    """Base class for lexicon loading problems."""


class LexiconFormatError(LexiconError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(message + where)
        self.line = line
        self.column = column


class LexiconValidationError(LexiconError):
    def __init__(self, violations: list[Violation]):
        self.violations = violations
        frames = len({v.frame_id for v in violations})
        super().__init__(f"{len(violations)} violation(s) in {frames} frame(s):\n"
                         + "\n".join(str(v) for v in violations))


class DuplicateFrameError(LexiconError):
    pass


@dataclass(frozen=True)
class Lexicon:
    frames: Mapping[str, SentimentFrame] = field(default_factory=dict)

    @classmethod
    def from_frames(cls, frames: Iterable[SentimentFrame]) -> "Lexicon":
        table: dict[str, SentimentFrame] = {}
        for frame in frames:
            if frame.id in table:
                raise DuplicateFrameError(f"duplicate frame id {frame.id!r}")
            table[frame.id] = frame
        return cls(table)

    def __len__(self) -> int:
        return len(self.frames)

    def __iter__(self):
        return iter(self.frames[k] for k in sorted(self.frames))

    @property
    def entry_index_source(self) -> list[tuple[FrameEntry, str]]:
        """All (entry, frame id) memberships in a stable order."""
        return sorted((entry, fid) for fid, frame in self.frames.items()
                      for entry in frame.entries)

    def frames_with_entry(self, text: str) -> list[str]:
        tokens = tuple(text.lower().split())
        return sorted(fid for fid, frame in self.frames.items()
                      if any(e.tokens == tokens for e in frame.entries))

    def violations(self) -> list[Violation]:
        return [v for frame in self for v in validate_frame(frame)]


# --- parsing -----------------------------------------------------------------

def _fail(path: str, message: str) -> LexiconFormatError:
    return LexiconFormatError(f"{path}: {message}")


def _expect(value: Any, kind: type | tuple, path: str) -> Any:
    if not isinstance(value, kind) or isinstance(value, bool) and kind is not bool:
        name = kind.__name__ if isinstance(kind, type) else "/".join(k.__name__ for k in kind)
        raise _fail(path, f"expected {name}, got {type(value).__name__}")
    return value


def _role(value: Any, path: str) -> Role:
    try:
        return Role.parse(_expect(value, str, path))
    except ValueError as exc:
        raise _fail(path, str(exc)) from None


def _sign(value: Any, path: str) -> Sign:
    try:
        return Sign.parse(_expect(value, str, path))
    except ValueError as exc:
        raise _fail(path, str(exc)) from None


def _confidence(value: Any, path: str) -> float:
    return float(_expect(value, (int, float), path))


def _tuples(raw: Any, arity: int, path: str) -> list[list]:
    items = _expect(raw if raw is not None else [], list, path)
    for i, item in enumerate(items):
        _expect(item, list, f"{path}[{i}]")
        if len(item) != arity:
            raise _fail(f"{path}[{i}]", f"expected {arity} fields, got {len(item)}")
    return items


def _parse_variant(raw: Any, path: str) -> FrameEntry:
    if isinstance(raw, str):
        entry = FrameEntry.from_text(raw)
        return entry
    _expect(raw, dict, path)
    text = _expect(raw.get("text"), str, f"{path}.text")
    kind = None
    if raw.get("kind") is not None:
        try:
            kind = EntryKind(_expect(raw["kind"], str, f"{path}.kind").lower())
        except ValueError:
            raise _fail(f"{path}.kind", f"unknown entry kind {raw['kind']!r}") from None
    pos = raw.get("pos")
    if pos is not None:
        pos = _expect(pos, str, f"{path}.pos").lower()
        if pos not in POS_CLASSES:
            raise _fail(f"{path}.pos", f"unknown part of speech {pos!r}")
    return FrameEntry.from_text(text, kind, pos)


def _describe(item: Any) -> str:
    if isinstance(item, FrameEntry):
        return repr(item.text)
    if isinstance(item, PolarityAssertion):
        return f"{item.source.value}->{item.target.value}"
    return item.role.value


def parse_frame(raw: Any, path: str = "frame") -> SentimentFrame:
    """Build a frame from one decoded canonical-format object."""
    _expect(raw, dict, path)
    fid = _expect(raw.get("id"), str, f"{path}.id")
    title = raw.get("title", fid)
    _expect(title, str, f"{path}.title")
    roles_raw = _expect(raw.get("roles", {}), dict, f"{path}.roles")
    roles = {_role(k, f"{path}.roles"): _expect(v, str, f"{path}.roles.{k}")
             for k, v in roles_raw.items()}
    polarity = [PolarityAssertion(_role(s, f"{path}.polarity[{i}][0]"),
                                  _role(t, f"{path}.polarity[{i}][1]"),
                                  _sign(g, f"{path}.polarity[{i}][2]"),
                                  _confidence(c, f"{path}.polarity[{i}][3]"))
                for i, (s, t, g, c) in enumerate(_tuples(raw.get("polarity"), 4, f"{path}.polarity"))]
    effects = [EffectAssertion(_role(r, f"{path}.effect[{i}][0]"),
                               _sign(g, f"{path}.effect[{i}][1]"),
                               _confidence(c, f"{path}.effect[{i}][2]"))
               for i, (r, g, c) in enumerate(_tuples(raw.get("effect"), 3, f"{path}.effect"))]
    states = [StateAssertion(_role(r, f"{path}.state[{i}][0]"),
                             _sign(g, f"{path}.state[{i}][1]"),
                             _confidence(c, f"{path}.state[{i}][2]"))
              for i, (r, g, c) in enumerate(_tuples(raw.get("state"), 3, f"{path}.state"))]
    variants = _expect(raw.get("variants", []), list, f"{path}.variants")
    entries = [_parse_variant(v, f"{path}.variants[{i}]") for i, v in enumerate(variants)]

    frame = SentimentFrame(fid, title, roles, polarity, effects, states, entries)
    # exact repeats would vanish inside the frame's sets; report them here
    extra = []
    for label, items in (("polarity", polarity), ("effect", effects),
                         ("state", states), ("entry", entries)):
        extra += [Violation(fid, f"duplicate_{label}", f"{label} {_describe(k)} listed more than once")
                  for k, n in Counter(items).items() if n > 1]
    if extra:
        raise LexiconValidationError(sorted(set(validate_frame(frame)) | set(extra)))
    return frame


def _decode(source: bytes | str | IO) -> Any:
    if hasattr(source, "read"):
        source = source.read()
    if isinstance(source, bytes):
        try:
            source = source.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise LexiconFormatError(f"not valid UTF-8: {exc}") from None
    if not source.strip():
        return None
    try:
        return json.loads(source)
    except json.JSONDecodeError as exc:
        raise LexiconFormatError(exc.msg, exc.lineno, exc.colno) from None


def load_lexicon(source: bytes | str | IO, validate: bool = True) -> Lexicon:
    """Parse a canonical lexicon document.

    An empty document is an empty lexicon.  With ``validate`` every frame
    is checked and all violations are raised together.
    """
    doc = _decode(source)
    if doc is None:
        return Lexicon({})
    _expect(doc, dict, "document")
    if doc.get("format") != FORMAT_NAME:
        raise LexiconFormatError(f"document: 'format' must be {FORMAT_NAME!r}")
    if doc.get("version") != FORMAT_VERSION:
        raise LexiconFormatError(f"document: unsupported version {doc.get('version')!r}")
    frames_raw = _expect(doc.get("frames", []), list, "document.frames")
    declared = doc.get("frame_count")
    if declared is not None and declared != len(frames_raw):
        raise LexiconFormatError(
            f"document: frame_count is {declared} but {len(frames_raw)} frames are present")
    frames = []
    violations: list[Violation] = []
    for i, raw in enumerate(frames_raw):
        try:
            frames.append(parse_frame(raw, f"frames[{i}]"))
        except LexiconValidationError as exc:
            violations.extend(exc.violations)
    lexicon = Lexicon.from_frames(frames)
    if validate:
        violations.extend(lexicon.violations())
    if violations:
        raise LexiconValidationError(sorted(set(violations)))
    return lexicon


def read_lexicon(path, validate: bool = True) -> Lexicon:
    """Load a lexicon file in either the canonical or the upstream layout."""
    with open(path, "rb") as fh:
        data = fh.read()
    doc = _decode(data)
    if isinstance(doc, dict) and "format" not in doc and doc:
        return import_upstream(doc).lexicon
    return load_lexicon(data, validate=validate)


# --- writing -----------------------------------------------------------------

def _dump(value: Any) -> str:
    return json.dumps(value, ensure_ascii=False)


def _frame_lines(frame: SentimentFrame) -> list[str]:
    roles = {r.value: d for r, d in sorted(frame.roles.items(), key=lambda kv: kv[0].value)}
    polarity = [[p.source.value, p.target.value, p.sign.value, p.confidence]
                for p in sorted(frame.polarity)]
    effect = [[e.role.value, e.sign.effect_symbol, e.confidence] for e in sorted(frame.effects)]
    state = [[s.role.value, s.sign.value, s.confidence] for s in sorted(frame.states)]
    variants = []
    for e in sorted(frame.entries):
        item = {"text": e.text, "kind": e.kind.value}
        if e.pos is not None:
            item["pos"] = e.pos
        variants.append(item)

    def block(name: str, rows: list, last: bool = False) -> list[str]:
        tail = "" if last else ","
        if not rows:
            return [f'      "{name}": []{tail}']
        body = [f"        {_dump(r)}," for r in rows]
        body[-1] = body[-1][:-1]
        return [f'      "{name}": ['] + body + [f"      ]{tail}"]

    return ([
        "    {",
        f'      "id": {_dump(frame.id)},',
        f'      "title": {_dump(frame.title)},',
        f'      "roles": {_dump(roles)},',
    ] + block("polarity", polarity) + block("effect", effect) + block("state", state)
      + block("variants", variants, last=True) + ["    }"])


def serialize_lexicon(lexicon: Lexicon) -> bytes:
    """Render a lexicon in the canonical layout with stable ordering."""
    lines = ["{", f'  "format": "{FORMAT_NAME}",', f'  "version": {FORMAT_VERSION},',
             f'  "frame_count": {len(lexicon)},']
    frames = list(lexicon)
    if not frames:
        lines.append('  "frames": []')
    else:
        lines.append('  "frames": [')
        for i, frame in enumerate(frames):
            chunk = _frame_lines(frame)
            if i < len(frames) - 1:
                chunk[-1] += ","
            lines.extend(chunk)
        lines.append("  ]")
    lines.append("}")
    return ("\n".join(lines) + "\n").encode("utf-8")


# --- upstream import ---------------------------------------------------------

@dataclass
class ImportResult:
    lexicon: Lexicon
    unmapped: list[str]
    notes: list[str]
    violations: list[Violation]


_UPSTREAM_FRAME_KEYS = {"title", "variants", "roles", "frames"}
_UPSTREAM_CONNOTATION_KEYS = {"polarity", "effect", "state"}


def import_upstream(source: Any) -> ImportResult:
    """Map an upstream RuSentiFrames ``frames.json`` onto the frame model.

    Unknown fields are reported in ``unmapped`` rather than rejected, and
    frames are not validated strictly: their violations are returned for
    inspection.  Duplicate variants inside one frame are merged.
    """
    doc = source if isinstance(source, dict) else _decode(source)
    _expect(doc, dict, "document")
    unmapped: set[str] = set()
    notes: list[str] = []
    frames = []
    for fid in sorted(doc):
        raw = _expect(doc[fid], dict, f"frames[{fid!r}]")
        unmapped.update(f"<frame>.{k}" for k in raw if k not in _UPSTREAM_FRAME_KEYS)
        block = raw.get("frames", {}) or {}
        _expect(block, dict, f"frames[{fid!r}].frames")
        unmapped.update(f"<frame>.frames.{k}" for k in block if k not in _UPSTREAM_CONNOTATION_KEYS)
        title = raw.get("title", fid)
        if isinstance(title, list):
            title = ", ".join(str(t) for t in title)
        canonical = {
            "id": str(fid),
            "title": str(title),
            "roles": raw.get("roles", {}) or {},
            "polarity": [list(p)[:4] for p in block.get("polarity", []) or []],
            "effect": [list(e)[:3] for e in block.get("effect", []) or []],
            "state": [list(s)[:3] for s in block.get("state", []) or []],
            "variants": [],
        }
        seen: set[str] = set()
        for v in raw.get("variants", []) or []:
            text = " ".join(str(v).lower().split())
            if not text:
                notes.append(f"{fid}: empty variant dropped")
            elif text in seen:
                notes.append(f"{fid}: duplicate variant {text!r} merged")
            else:
                seen.add(text)
                canonical["variants"].append(text)
        # later duplicates of the same role pair are dropped, first wins
        for key, width in (("polarity", 2), ("effect", 1), ("state", 1)):
            kept, keys = [], set()
            for item in canonical[key]:
                k = tuple(str(x).upper() for x in item[:width])
                if k in keys:
                    notes.append(f"{fid}: duplicate {key} assertion {list(k)} dropped")
                    continue
                keys.add(k)
                kept.append(item)
            canonical[key] = kept
        frames.append(parse_frame(canonical, f"frames[{fid!r}]"))
    lexicon = Lexicon.from_frames(frames)
    return ImportResult(lexicon, sorted(unmapped), notes, lexicon.violations())


# --- statistics --------------------------------------------------------------

ATTITUDE_DIMENSIONS = ((Role.A0, Role.A1), (Role.AUTHOR, Role.A0), (Role.AUTHOR, Role.A1))
EFFECT_DIMENSIONS = (Role.A0, Role.A1)


def _pos_class(entry: FrameEntry) -> str:
    if entry.pos is not None:
        return entry.pos
    return "phrase" if len(entry.tokens) > 1 else "other"


def _dimension_name(source: Role, target: Role) -> str:
    src = "Author" if source is Role.AUTHOR else source.value
    return f"{src}->{target.value}"


@dataclass
class LexiconStats:
    pos_unique: dict[str, int]
    pos_total: dict[str, int]
    unique_entries: int
    total_entries: int
    attitudes: dict[tuple[str, Sign], int]
    effects: dict[tuple[str, Sign], int]

    def cells(self) -> dict[str, int]:
        """Flat view used for reporting and reconciliation."""
        out = {f"entries:{p}:unique": n for p, n in self.pos_unique.items()}
        out.update({f"entries:{p}:total": n for p, n in self.pos_total.items()})
        out["entries:unique"] = self.unique_entries
        out["entries:total"] = self.total_entries
        out.update({f"attitude:{d}:{s.value}": n for (d, s), n in self.attitudes.items()})
        out.update({f"effect:{r}:{s.value}": n for (r, s), n in self.effects.items()})
        return out

    def membership_counts(self) -> Counter:
        """The cells that add up across lexicons with disjoint frames."""
        return Counter({k: v for k, v in self.cells().items()
                        if k != "entries:unique" and not k.endswith(":unique")})


def lexicon_stats(lexicon: Lexicon) -> LexiconStats:
    """Count entries by shape class and by attitude/effect dimension.

    The counting unit is the (entry, frame) membership; an entry shared
    by two frames counts once per frame, and once in ``unique_entries``.
    Confidence is ignored.
    """
    pos_total = Counter({p: 0 for p in POS_CLASSES})
    unique: dict[tuple[str, ...], str] = {}
    attitudes = {(_dimension_name(s, t), g): 0 for s, t in ATTITUDE_DIMENSIONS for g in Sign}
    effects = {(r.value, g): 0 for r in EFFECT_DIMENSIONS for g in Sign}
    total = 0
    for frame in lexicon:
        n = len(frame.entries)
        total += n
        for entry in sorted(frame.entries):
            pos_total[_pos_class(entry)] += 1
            unique.setdefault(entry.tokens, _pos_class(entry))
        for p in frame.polarity:
            key = (_dimension_name(p.source, p.target), p.sign)
            if key in attitudes:
                attitudes[key] += n
        for e in frame.effects:
            key = (e.role.value, e.sign)
            if key in effects:
                effects[key] += n
    pos_unique = Counter({p: 0 for p in POS_CLASSES})
    pos_unique.update(unique.values())
    return LexiconStats(dict(pos_unique), dict(pos_total), len(unique), total,
                        attitudes, effects)


# Counts reported for the RuSentiFrames v2.0 release.
PUBLISHED_V2_COUNTS = {
    "entries:unique": 6788,
    "entries:total": 7034,
    "attitude:A0->A1:pos": 2558,
    "attitude:A0->A1:neg": 3289,
    "attitude:Author->A0:pos": 170,
    "attitude:Author->A0:neg": 1581,
    "attitude:Author->A1:pos": 92,
    "attitude:Author->A1:neg": 249,
    "effect:A0:pos": 1008,
    "effect:A0:neg": 733,
    "effect:A1:pos": 2355,
    "effect:A1:neg": 3504,
}


@dataclass(frozen=True)
class ReconciliationRow:
    cell: str
    expected: int
    observed: int
    tolerance: float

    @property
    def diff(self) -> int:
        return self.observed - self.expected

    @property
    def relative(self) -> float:
        return abs(self.diff) / self.expected if self.expected else float(self.observed != 0)

    @property
    def ok(self) -> bool:
        return self.relative <= self.tolerance


def reconcile(stats: LexiconStats, expected: Mapping[str, int] = PUBLISHED_V2_COUNTS,
              tolerance: float = 0.02) -> list[ReconciliationRow]:
    cells = stats.cells()
    return [ReconciliationRow(k, v, cells.get(k, 0), tolerance) for k, v in expected.items()]


def render_reconciliation(rows: list[ReconciliationRow]) -> str:
    out = io.StringIO()
    out.write("cell\texpected\tobserved\tdiff\trelative\tstatus\n")
    for r in rows:
        out.write(f"{r.cell}\t{r.expected}\t{r.observed}\t{r.diff:+d}\t{r.relative:.4f}\t"
                  f"{'ok' if r.ok else 'MISMATCH'}\n")
    return out.getvalue()


def render_stats_tsv(stats: LexiconStats) -> str:
    """Dimension counts as ``dimension/sign/count`` rows, then the entry summary."""
    out = io.StringIO()
    out.write("dimension\tsign\tcount\n")
    for (dim, sign), n in stats.attitudes.items():
        out.write(f"attitude {dim}\t{sign.value}\t{n}\n")
    for (role, sign), n in stats.effects.items():
        out.write(f"effect {role}\t{sign.value}\t{n}\n")
    out.write("\n")
    out.write("type of lexical unit\tunique\ttotal\n")
    labels = {"verb": "Verbs", "noun": "Nouns", "phrase": "Phrases", "other": "Other"}
    for pos in POS_CLASSES:
        out.write(f"{labels[pos]}\t{stats.pos_unique[pos]}\t{stats.pos_total[pos]}\n")
    out.write(f"Unique entries\t{stats.unique_entries}\t\n")
    out.write(f"Total entries\t\t{stats.total_entries}\n")
    return out.getvalue()
