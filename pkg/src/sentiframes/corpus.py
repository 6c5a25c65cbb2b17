"""Corpus-level attitude extraction, aggregation and pair reports.

Corpus input is JSON Lines, one document per line::

    {"doc_id": "d1",
     "sentences": [{"id": "s1", "text": "Израиль осудил Дамаск.",
                    "entities": [{"start_char": 0, "end_char": 7,
                                  "text": "Израиль", "type": "LOC"}, ...]}]}

A sentence may carry ``tokens`` (list of strings, in text order) to
override the built-in tokenizer.  Entity character offsets are mapped to
the covering tokens; offsets that cut through a token are widened and
counted as misaligned.  Malformed documents are skipped and counted.
"""

from __future__ import annotations

import enum
import io
import json
import logging
import os
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import islice
from pathlib import Path
from typing import Iterable, Iterator, Mapping, Sequence

from .attitudes import EntityMention, PairAttitude, Pairing, extract_sentence_attitudes
from .frames import Sign
from .matching import (
    DEFAULT_NEGATION_PARTICLES,
    EntryIndex,
    EntryMatch,
    Token,
    canonical_entity,
    find_matches,
    tokenize,
)

log = logging.getLogger(__name__)


class CorpusRecordError(ValueError):
    pass


@dataclass(frozen=True)
class Sentence:
    id: str
    text: str
    tokens: tuple[Token, ...]
    mentions: tuple[EntityMention, ...]
    misaligned: int = 0


@dataclass(frozen=True)
class CorpusDocument:
    doc_id: str
    sentences: tuple[Sentence, ...]


@dataclass
class PipelineConfig:
    negation_window: int = 1
    particles: frozenset[str] = DEFAULT_NEGATION_PARTICLES
    pairing: Pairing = Pairing.ALL_PAIRS
    lemma_table: Mapping[str, str] = field(default_factory=dict)
    aliases: Mapping[str, str] = field(default_factory=dict)
    min_total: int = 1
    top_k: int = 10
    workers: int = 1

    def __post_init__(self) -> None:
        for name in ("negation_window", "min_total", "top_k", "workers"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")


# --- parsing -----------------------------------------------------------------

def _align_tokens(text: str, words: list, lemma_table: Mapping[str, str]) -> list[Token]:
    tokens, pos = [], 0
    for i, w in enumerate(words):
        if not isinstance(w, str) or not w or any(c.isspace() for c in w):
            raise CorpusRecordError(f"token {i} is not a non-empty string without spaces")
        at = text.find(w, pos)
        if at < 0:
            raise CorpusRecordError(f"token {i} {w!r} not found in sentence text")
        low = w.lower()
        tokens.append(Token(w, lemma_table.get(low, low), i, at, at + len(w)))
        pos = at + len(w)
    return tokens


def _mention(ent: dict, text: str, tokens: Sequence[Token], aliases: Mapping[str, str],
             where: str) -> tuple[EntityMention, bool]:
    if not isinstance(ent, dict):
        raise CorpusRecordError(f"{where}: entity must be an object")
    start, end = ent.get("start_char"), ent.get("end_char")
    if not isinstance(start, int) or not isinstance(end, int) or isinstance(start, bool) \
            or isinstance(end, bool):
        raise CorpusRecordError(f"{where}: start_char/end_char must be integers")
    if not 0 <= start < end <= len(text):
        raise CorpusRecordError(f"{where}: offsets [{start}, {end}) outside sentence text")
    covering = [t for t in tokens if t.start_char < end and t.end_char > start]
    if not covering:
        raise CorpusRecordError(f"{where}: offsets [{start}, {end}) cover no token")
    misaligned = covering[0].start_char != start or covering[-1].end_char != end
    surface = ent.get("text")
    if surface is not None and not isinstance(surface, str):
        raise CorpusRecordError(f"{where}: text must be a string")
    if surface is None or misaligned:
        surface = text[covering[0].start_char:covering[-1].end_char]
    etype = ent.get("type")
    return EntityMention(covering[0].index, covering[-1].index, surface,
                         canonical_entity(surface, aliases),
                         etype if isinstance(etype, str) else None), misaligned


def parse_document(line: str, lemma_table: Mapping[str, str] | None = None,
                   aliases: Mapping[str, str] | None = None) -> CorpusDocument:
    """Decode and check one corpus line; raise :class:`CorpusRecordError` if unusable."""
    lemma_table = lemma_table or {}
    aliases = aliases or {}
    try:
        raw = json.loads(line)
    except json.JSONDecodeError as exc:
        raise CorpusRecordError(f"invalid JSON: {exc.msg} at column {exc.colno}") from None
    if not isinstance(raw, dict):
        raise CorpusRecordError("record must be a JSON object")
    doc_id = raw.get("doc_id")
    if not isinstance(doc_id, str) or not doc_id:
        raise CorpusRecordError("missing or invalid doc_id")
    sents = raw.get("sentences")
    if not isinstance(sents, list):
        raise CorpusRecordError(f"{doc_id}: 'sentences' must be a list")
    seen: set[str] = set()
    out = []
    for k, s in enumerate(sents):
        where = f"{doc_id}: sentences[{k}]"
        if not isinstance(s, dict):
            raise CorpusRecordError(f"{where}: must be an object")
        sid, text = s.get("id"), s.get("text")
        if not isinstance(sid, str) or not sid:
            raise CorpusRecordError(f"{where}: missing or invalid id")
        if sid in seen:
            raise CorpusRecordError(f"{where}: duplicate sentence id {sid!r}")
        seen.add(sid)
        if not isinstance(text, str):
            raise CorpusRecordError(f"{where}: missing or invalid text")
        if s.get("tokens") is not None:
            if not isinstance(s["tokens"], list):
                raise CorpusRecordError(f"{where}: tokens must be a list")
            try:
                tokens = _align_tokens(text, s["tokens"], lemma_table)
            except CorpusRecordError as exc:
                raise CorpusRecordError(f"{where}: {exc}") from None
        else:
            tokens = tokenize(text, lemma_table)
        ents = s.get("entities", [])
        if not isinstance(ents, list):
            raise CorpusRecordError(f"{where}: entities must be a list")
        mentions, misaligned = [], 0
        for j, ent in enumerate(ents):
            m, bad = _mention(ent, text, tokens, aliases, f"{where}.entities[{j}]")
            mentions.append(m)
            misaligned += bad
        mentions.sort(key=lambda m: (m.start, m.end))
        for a, b in zip(mentions, mentions[1:]):
            if b.start <= a.end:
                raise CorpusRecordError(f"{where}: entity mentions overlap at tokens "
                                        f"[{a.start}, {a.end}] and [{b.start}, {b.end}]")
        out.append(Sentence(sid, text, tuple(tokens), tuple(mentions), misaligned))
    return CorpusDocument(doc_id, tuple(out))


# --- per-document extraction -------------------------------------------------

def match_record(m: EntryMatch) -> dict:
    return {
        "span": [m.start, m.end],
        "frame_ids": list(m.frame_ids),
        "negated": m.negated,
        "base": sorted(s.value for s in m.base_polarities),
        "effective": sorted(s.value for s in m.effective_polarities),
    }


def attitude_record(att: PairAttitude, doc_id: str) -> dict:
    return {
        "doc_id": doc_id,
        "sentence_id": att.sentence_id,
        "source": att.source,
        "target": att.target,
        "sentiment": att.sentiment.value,
        "source_span": list(att.source_span),
        "target_span": list(att.target_span),
        "evidence": [match_record(m) for m in att.evidence],
    }


def attitude_from_record(rec: dict) -> PairAttitude:
    evidence = tuple(
        EntryMatch(e["span"][0], e["span"][1], tuple(e["frame_ids"]), bool(e["negated"]),
                   frozenset(Sign(s) for s in e["base"]),
                   frozenset(Sign(s) for s in e["effective"]))
        for e in rec.get("evidence", []))
    return PairAttitude(rec["source"], rec["target"], Sign(rec["sentiment"]), evidence,
                        rec.get("sentence_id", ""), tuple(rec.get("source_span", (0, 0))),
                        tuple(rec.get("target_span", (0, 0))))


def dump_record(rec: dict) -> str:
    return json.dumps(rec, ensure_ascii=False, separators=(", ", ": "))


def document_attitudes(doc: CorpusDocument, index: EntryIndex,
                       config: PipelineConfig) -> list[PairAttitude]:
    out = []
    for sent in doc.sentences:
        if len(sent.mentions) < 2:
            continue
        matches = find_matches(index, list(sent.tokens), config.negation_window, config.particles)
        out.extend(extract_sentence_attitudes(sent.mentions, matches, config.pairing, sent.id))
    return out


@dataclass
class LineResult:
    lineno: int
    records: list[dict]
    counters: Counter
    error: str | None = None


def process_line(lineno: int, line: str, index: EntryIndex, config: PipelineConfig) -> LineResult:
    counters: Counter = Counter()
    if not line.strip():
        return LineResult(lineno, [], counters)
    try:
        doc = parse_document(line, config.lemma_table, config.aliases)
    except CorpusRecordError as exc:
        counters["skipped_records"] += 1
        return LineResult(lineno, [], counters, str(exc))
    counters["documents"] += 1
    counters["sentences"] += len(doc.sentences)
    counters["misaligned_mentions"] += sum(s.misaligned for s in doc.sentences)
    records = [attitude_record(a, doc.doc_id) for a in document_attitudes(doc, index, config)]
    counters["attitudes"] += len(records)
    return LineResult(lineno, records, counters)


_worker_state: tuple[EntryIndex, PipelineConfig] | None = None


def _init_worker(index: EntryIndex, config: PipelineConfig) -> None:
    global _worker_state
    _worker_state = (index, config)


def _process_batch(batch: list[tuple[int, str]]) -> list[LineResult]:
    index, config = _worker_state
    return [process_line(n, line, index, config) for n, line in batch]


def _batches(lines: Iterable[str], size: int) -> Iterator[list[tuple[int, str]]]:
    numbered = enumerate(lines, 1)
    while batch := list(islice(numbered, size)):
        yield batch


def process_corpus(lines: Iterable[str], index: EntryIndex, config: PipelineConfig,
                   batch_size: int = 64) -> Iterator[LineResult]:
    """Yield one result per input line, in input order, for any worker count."""
    if config.workers == 1:
        for n, line in enumerate(lines, 1):
            yield process_line(n, line, index, config)
        return
    with ProcessPoolExecutor(config.workers, initializer=_init_worker,
                             initargs=(index, config)) as pool:
        for results in pool.map(_process_batch, _batches(lines, batch_size)):
            yield from results


# --- aggregation -------------------------------------------------------------

@dataclass(frozen=True, order=True)
class PairStats:
    source: str
    target: str
    positive: int = 0
    negative: int = 0

    @property
    def total(self) -> int:
        return self.positive + self.negative

    def __add__(self, other: "PairStats") -> "PairStats":
        if (self.source, self.target) != (other.source, other.target):
            raise ValueError("cannot add stats of different pairs")
        return PairStats(self.source, self.target, self.positive + other.positive,
                         self.negative + other.negative)



def aggregate_attitudes(attitudes: Iterable[PairAttitude]) -> dict[tuple[str, str], PairStats]:
    counts: dict[tuple[str, str], list[int]] = {}
    for att in attitudes:
        cell = counts.setdefault((att.source, att.target), [0, 0])
        cell[0 if att.sentiment is Sign.POS else 1] += 1
    return {k: PairStats(k[0], k[1], p, n) for k, (p, n) in counts.items()}


def merge_stats(*tables: Mapping[tuple[str, str], PairStats]) -> dict[tuple[str, str], PairStats]:
    out: dict[tuple[str, str], PairStats] = {}
    for table in tables:
        for key, st in table.items():
            out[key] = out[key] + st if key in out else st
    return out


class Direction(str, enum.Enum):
    MOST_POSITIVE = "pos"
    MOST_NEGATIVE = "neg"


def share_tenths(count: int, total: int) -> int:
    """Percentage share in tenths of a percent, rounded half up."""
    if total <= 0:
        raise ValueError("total must be positive")
    return (2000 * count + total) // (2 * total)


def format_share(count: int, total: int) -> str:
    t = share_tenths(count, total)
    return f"{t // 10}.{t % 10}%"


@dataclass(frozen=True)
class RankedPair:
    rank: int
    stats: PairStats

    @property
    def positive_share(self) -> str:
        return format_share(self.stats.positive, self.stats.total)

    @property
    def negative_share(self) -> str:
        return format_share(self.stats.negative, self.stats.total)


def rank_pairs(stats: Mapping[tuple[str, str], PairStats], direction: Direction,
               min_total: int = 1, top_k: int = 10) -> list[RankedPair]:
    """Pairs with the largest positive (or negative) share first.

    Ties are broken by larger total, then by (source, target).
    """
    if min_total < 1 or top_k < 1:
        raise ValueError("min_total and top_k must be >= 1")

    def key(st: PairStats):
        part = st.positive if direction is Direction.MOST_POSITIVE else st.negative
        return (-Fraction(part, st.total), -st.total, st.source, st.target)

    chosen = sorted((s for s in stats.values() if s.total >= min_total), key=key)[:top_k]
    return [RankedPair(i, s) for i, s in enumerate(chosen, 1)]


# --- rendering ---------------------------------------------------------------

REPORT_HEADER = ("A0", "A1", "total", "positive", "negative")
TITLES = {
    Direction.MOST_NEGATIVE: "Most negative attitudes",
    Direction.MOST_POSITIVE: "Most positive attitudes",
}


def _rows(ranked: Sequence[RankedPair]) -> list[tuple[str, ...]]:
    return [(r.stats.source, r.stats.target, str(r.stats.total),
             f"{r.stats.positive} ({r.positive_share})",
             f"{r.stats.negative} ({r.negative_share})") for r in ranked]


def render_report_tsv(ranked: Sequence[RankedPair]) -> str:
    lines = ["\t".join(REPORT_HEADER)] + ["\t".join(row) for row in _rows(ranked)]
    return "\n".join(lines) + "\n"


def render_report_text(ranked: Sequence[RankedPair], direction: Direction) -> str:
    rows = [REPORT_HEADER] + _rows(ranked)
    widths = [max(len(r[i]) for r in rows) for i in range(len(REPORT_HEADER))]
    numeric = {2, 3, 4}

    def fmt(row):
        cells = [c.rjust(w) if i in numeric else c.ljust(w)
                 for i, (c, w) in enumerate(zip(row, widths))]
        return "  ".join(cells).rstrip()

    rule = "  ".join("-" * w for w in widths)
    out = [TITLES[direction], fmt(rows[0]), rule] + [fmt(r) for r in rows[1:]]
    if not ranked:
        out.append("(no pairs)")
    return "\n".join(out) + "\n"


def render_pair_stats_tsv(stats: Mapping[tuple[str, str], PairStats]) -> str:
    buf = io.StringIO()
    buf.write("source\ttarget\ttotal\tpositive\tnegative\n")
    for key in sorted(stats):
        s = stats[key]
        buf.write(f"{s.source}\t{s.target}\t{s.total}\t{s.positive}\t{s.negative}\n")
    return buf.getvalue()


def read_pair_stats_tsv(lines: Iterable[str]) -> dict[tuple[str, str], PairStats]:
    out = {}
    it = iter(lines)
    next(it, None)
    for line in it:
        if not line.strip():
            continue
        source, target, _total, pos, neg = line.rstrip("\n").split("\t")
        out[(source, target)] = PairStats(source, target, int(pos), int(neg))
    return out


# --- whole run ---------------------------------------------------------------

ATTITUDES_FILE = "attitudes.jsonl"
PAIR_STATS_FILE = "pair_stats.tsv"
SUMMARY_FILE = "summary.json"
REPORT_TEXT_FILE = "report.txt"
REPORT_FILES = {Direction.MOST_NEGATIVE: "report_negative", Direction.MOST_POSITIVE: "report_positive"}
COUNTER_NAMES = ("documents", "sentences", "skipped_records", "misaligned_mentions", "attitudes")


@dataclass
class PipelineResult:
    counters: dict[str, int]
    stats: dict[tuple[str, str], PairStats]
    diagnostics: list[str]
    files: list[Path]


class _AtomicDir:
    """Collects output files as temporaries and moves them in place together."""

    def __init__(self, out_dir: Path):
        self.out_dir = out_dir
        self.pending: list[tuple[Path, Path]] = []

    def path(self, name: str) -> Path:
        final = self.out_dir / name
        tmp = self.out_dir / f".{name}.{os.getpid()}.tmp"
        self.pending.append((tmp, final))
        return tmp

    def write_text(self, name: str, text: str) -> None:
        self.path(name).write_text(text, encoding="utf-8", newline="\n")

    def commit(self) -> list[Path]:
        for tmp, final in self.pending:
            os.replace(tmp, final)
        return [final for _, final in self.pending]

    def abort(self) -> None:
        for tmp, _ in self.pending:
            tmp.unlink(missing_ok=True)


def render_full_report(stats: Mapping[tuple[str, str], PairStats], counters: Mapping[str, int],
                       config: PipelineConfig) -> str:
    parts = []
    for direction in (Direction.MOST_NEGATIVE, Direction.MOST_POSITIVE):
        ranked = rank_pairs(stats, direction, config.min_total, config.top_k)
        parts.append(render_report_text(ranked, direction))
    summary = "\n".join(f"{name}: {counters.get(name, 0)}" for name in COUNTER_NAMES)
    return "\n".join(parts) + "\n" + summary + "\n"


def write_reports(target: _AtomicDir, stats: Mapping[tuple[str, str], PairStats],
                  config: PipelineConfig, figures: bool = True) -> None:
    for direction, stem in REPORT_FILES.items():
        ranked = rank_pairs(stats, direction, config.min_total, config.top_k)
        target.write_text(f"{stem}.tsv", render_report_tsv(ranked))
        if figures:
            from .plotting import plot_pair_report

            plot_pair_report(ranked, direction, target.path(f"{stem}.png"))


def run_pipeline(lexicon_path, corpus_path, out_dir, config: PipelineConfig | None = None,
                 figures: bool = True) -> PipelineResult:
    """Extract attitudes from a corpus file and write all outputs to ``out_dir``.

    Outputs are the attitude records, per-pair counts, ranked reports in
    TSV and aligned text, and a run summary.  Nothing is moved into
    ``out_dir`` unless the whole run succeeds.
    """
    from .lexicon import read_lexicon
    from .matching import build_entry_index

    config = config or PipelineConfig()
    lexicon = read_lexicon(lexicon_path)
    index = build_entry_index(lexicon, config.lemma_table)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    target = _AtomicDir(out_dir)
    counters: Counter = Counter({name: 0 for name in COUNTER_NAMES})
    diagnostics: list[str] = []
    shard_tables = []
    try:
        with open(corpus_path, encoding="utf-8") as src, \
                open(target.path(ATTITUDES_FILE), "w", encoding="utf-8", newline="\n") as dst:
            for res in process_corpus(src, index, config):
                counters.update(res.counters)
                if res.error:
                    msg = f"{corpus_path}:{res.lineno}: skipped: {res.error}"
                    log.warning(msg)
                    diagnostics.append(msg)
                for rec in res.records:
                    dst.write(dump_record(rec) + "\n")
                shard_tables.append(aggregate_attitudes(attitude_from_record(r) for r in res.records))
        stats = merge_stats(*shard_tables)
        target.write_text(PAIR_STATS_FILE, render_pair_stats_tsv(stats))
        write_reports(target, stats, config, figures)
        target.write_text(REPORT_TEXT_FILE, render_full_report(stats, counters, config))
        summary = {name: counters[name] for name in COUNTER_NAMES}
        target.write_text(SUMMARY_FILE, json.dumps(summary, indent=2) + "\n")
        files = target.commit()
    except BaseException:
        target.abort()
        raise
    return PipelineResult({n: counters[n] for n in COUNTER_NAMES}, stats, diagnostics, files)
