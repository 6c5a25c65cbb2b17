import json
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sentiframes.frames import (
    EffectAssertion,
    EntryKind,
    FrameEntry,
    PolarityAssertion,
    Role,
    SentimentFrame,
    Sign,
    StateAssertion,
    validate_frame,
)
from sentiframes.lexicon import (
    PUBLISHED_V2_COUNTS,
    DuplicateFrameError,
    Lexicon,
    LexiconFormatError,
    LexiconValidationError,
    import_upstream,
    lexicon_stats,
    load_lexicon,
    reconcile,
    render_reconciliation,
    render_stats_tsv,
    serialize_lexicon,
)

A0, A1, A2, A3, AUTHOR = Role.A0, Role.A1, Role.A2, Role.A3, Role.AUTHOR
POS, NEG = Sign.POS, Sign.NEG


def doc(*frames):
    return json.dumps({"format": "sentiframes-lexicon", "version": 1, "frames": list(frames)},
                      ensure_ascii=False)


def raw_frame(fid, polarity=(), variants=("слово",), **kw):
    out = {"id": fid, "roles": {"A0": "a", "A1": "b"}, "polarity": [list(p) for p in polarity],
           "variants": list(variants)}
    out.update(kw)
    return out


def test_fig1_document(fig1_lexicon):
    assert len(fig1_lexicon) == 1
    f = fig1_lexicon.frames["осудить"]
    assert (len(f.roles), len(f.polarity), len(f.effects), len(f.states)) == (4, 5, 1, 1)
    assert f.roles[A3] == "punishment"
    assert PolarityAssertion(A1, A0, NEG, 1.0) in f.polarity
    assert f.entries == {FrameEntry(("осудить",), EntryKind.SINGLE_WORD, "verb")}


@pytest.mark.parametrize("text", ["", "   \n", b""])
def test_empty_document(text):
    lex = load_lexicon(text)
    assert len(lex) == 0
    stats = lexicon_stats(lex)
    assert stats.total_entries == stats.unique_entries == 0
    assert all(v == 0 for v in stats.cells().values())


def test_zero_frame_document_roundtrip():
    empty = Lexicon({})
    out = serialize_lexicon(empty)
    assert b'"frame_count": 0' in out
    assert len(load_lexicon(out)) == 0


def test_shared_entry_kept_by_both_frames():
    lex = load_lexicon(doc(raw_frame("преуспеть", [["A0", "A1", "pos", 0.7]], ["выгореть"]),
                           raw_frame("сгореть", [["A0", "A1", "neg", 0.7]], ["выгореть", "сгореть"])))
    assert lex.frames_with_entry("выгореть") == ["преуспеть", "сгореть"]
    pairs = [(e.text, fid) for e, fid in lex.entry_index_source]
    assert pairs.count(("выгореть", "преуспеть")) == 1 and pairs.count(("выгореть", "сгореть")) == 1
    assert len(pairs) == len(set(pairs)) == 3


def test_entries_lowercased():
    lex = load_lexicon(doc(raw_frame("f", variants=["Налагать  Вето"])))
    (entry,) = lex.frames["f"].entries
    assert entry.tokens == ("налагать", "вето")


def test_parse_error_has_position():
    with pytest.raises(LexiconFormatError) as err:
        load_lexicon('{\n  "format": "sentiframes-lexicon",\n  "frames": [,]\n}')
    assert err.value.line == 3 and err.value.column is not None
    assert "line 3" in str(err.value)


@pytest.mark.parametrize("bad, fragment", [
    ('{"format": "other", "version": 1, "frames": []}', "format"),
    ('{"format": "sentiframes-lexicon", "version": 9, "frames": []}', "version"),
    ('{"format": "sentiframes-lexicon", "version": 1, "frame_count": 2, "frames": []}', "frame_count"),
    ('[1, 2]', "expected dict"),
])
def test_structural_errors(bad, fragment):
    with pytest.raises(LexiconFormatError, match=fragment):
        load_lexicon(bad)


def test_field_errors_name_the_path():
    with pytest.raises(LexiconFormatError, match=r"frames\[0\]\.polarity\[0\]"):
        load_lexicon(doc(raw_frame("f", [["A0", "A1", "neg"]])))
    with pytest.raises(LexiconFormatError, match="unknown sign"):
        load_lexicon(doc(raw_frame("f", [["A0", "A1", "neutral", 1.0]])))
    with pytest.raises(LexiconFormatError, match="unknown role"):
        load_lexicon(doc(raw_frame("f", [["A0", "A9", "neg", 1.0]])))
    with pytest.raises(LexiconFormatError, match="kind"):
        load_lexicon(doc(raw_frame("f", variants=[{"text": "x", "kind": "weird"}])))


def test_duplicate_frame_id():
    with pytest.raises(DuplicateFrameError):
        load_lexicon(doc(raw_frame("f"), raw_frame("f")))


def test_validation_errors_are_aggregated():
    with pytest.raises(LexiconValidationError) as err:
        load_lexicon(doc(raw_frame("a", [["A0", "A1", "neg", 0.5]]),
                         raw_frame("b", effect=[["AUTHOR", "-", 1.0]]),
                         raw_frame("c", [["A0", "A1", "neg", 1.0], ["A0", "A1", "neg", 1.0]])))
    found = {(v.frame_id, v.code) for v in err.value.violations}
    assert found == {("a", "invalid_confidence"), ("b", "author_in_effect"), ("c", "duplicate_polarity")}


def test_exact_repeated_variant_is_reported():
    with pytest.raises(LexiconValidationError) as err:
        load_lexicon(doc(raw_frame("a", variants=["слово", "слово"])))
    assert [v.code for v in err.value.violations] == ["duplicate_entry"]


def test_fig1_roundtrip(fig1_lexicon):
    out = serialize_lexicon(fig1_lexicon)
    again = load_lexicon(out)
    assert again == fig1_lexicon
    assert serialize_lexicon(again) == out
    assert validate_frame(again.frames["осудить"]) == validate_frame(fig1_lexicon.frames["осудить"])


def test_effect_signs_written_as_symbols(fig1_lexicon):
    text = serialize_lexicon(fig1_lexicon).decode()
    assert '["A1", "-", 1.0]' in text and '"neg", 1.0]' in text


def test_serialization_is_stable_under_input_order(micro_lexicon):
    frames = list(micro_lexicon)
    shuffled = Lexicon.from_frames(reversed(frames))
    assert serialize_lexicon(shuffled) == serialize_lexicon(micro_lexicon)


# --- random valid frames ------------------------------------------------------

WORDS = st.text(alphabet="абвгдежзиклмнопрстуфхцчшщыэюяabcxyz-", min_size=1, max_size=8)
PARTICIPANTS = [A0, A1, A2, A3]


@st.composite
def valid_frames(draw, fid):
    roles = draw(st.sets(st.sampled_from(PARTICIPANTS), min_size=2, max_size=4))
    roles_l = sorted(roles, key=lambda r: r.value)
    pairs = [(s, t) for s in roles_l + [AUTHOR] for t in roles_l if s != t]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True, max_size=len(pairs))) if pairs else []
    sign = st.sampled_from(list(Sign))
    conf = st.sampled_from([1.0, 0.7])
    polarity = [PolarityAssertion(s, t, draw(sign), draw(conf)) for s, t in chosen]
    eff_roles = draw(st.lists(st.sampled_from(roles_l), unique=True))
    st_roles = draw(st.lists(st.sampled_from(roles_l), unique=True))
    effects = [EffectAssertion(r, draw(sign), draw(conf)) for r in eff_roles]
    states = [StateAssertion(r, draw(sign), draw(conf)) for r in st_roles]
    texts = draw(st.lists(st.lists(WORDS, min_size=1, max_size=3).map(tuple), unique=True, max_size=5))
    entries = []
    for t in texts:
        if len(t) == 1:
            kind = draw(st.sampled_from([EntryKind.SINGLE_WORD, EntryKind.OTHER]))
        else:
            kind = draw(st.sampled_from([k for k in EntryKind if k is not EntryKind.SINGLE_WORD]))
        pos = draw(st.sampled_from([None, "verb", "noun", "phrase", "other"]))
        entries.append(FrameEntry(tuple(w.lower() for w in t), kind, pos))
    title = draw(st.text(min_size=1, max_size=12))
    return SentimentFrame(fid, title, {r: draw(st.text(max_size=10)) for r in roles_l},
                          polarity, effects, states, entries)


@st.composite
def lexicons(draw, max_frames=8):
    n = draw(st.integers(0, max_frames))
    return Lexicon.from_frames([draw(valid_frames(f"frame-{i}")) for i in range(n)])


@settings(max_examples=100, deadline=None)
@given(lexicons())
def test_roundtrip_random_lexicons(lex):
    assert lex.violations() == []
    out = serialize_lexicon(lex)
    again = load_lexicon(out)
    assert again == lex
    assert serialize_lexicon(again) == out


@settings(max_examples=60, deadline=None)
@given(lexicons(), lexicons())
def test_stats_additive_over_disjoint_lexicons(a, b):
    b = Lexicon({f"other-{k}": SentimentFrame(f"other-{k}", f.title, f.roles, f.polarity,
                                              f.effects, f.states, f.entries)
                 for k, f in b.frames.items()})
    union = Lexicon({**a.frames, **b.frames})
    sa, sb, su = lexicon_stats(a), lexicon_stats(b), lexicon_stats(union)
    ca, cb, cu = sa.membership_counts(), sb.membership_counts(), su.membership_counts()
    assert set(ca) == set(cb) == set(cu)
    assert all(cu[k] == ca[k] + cb[k] for k in cu)
    assert su.total_entries == sum(len(f.entries) for f in union.frames.values())
    assert su.unique_entries <= su.total_entries


# --- statistics ---------------------------------------------------------------

def test_fig1_stats(fig1_lexicon):
    s = lexicon_stats(fig1_lexicon)
    assert s.attitudes[("A0->A1", NEG)] == 1
    assert s.attitudes[("A0->A1", POS)] == 0
    assert s.effects[("A1", NEG)] == 1
    assert s.effects[("A0", NEG)] == 0
    assert (s.unique_entries, s.total_entries) == (1, 1)
    assert s.pos_total["verb"] == 1


def brute_count(lexicon, source, target, sign):
    n = 0
    for f in lexicon.frames.values():
        for _entry in f.entries:
            for p in f.polarity:
                if (p.source, p.target, p.sign) == (source, target, sign):
                    n += 1
    return n


def test_three_entries_positive_frame():
    lex = load_lexicon(doc(raw_frame("f", [["A0", "A1", "pos", 1.0]], ["раз", "два", "три слова"])))
    s = lexicon_stats(lex)
    assert s.attitudes[("A0->A1", POS)] == brute_count(lex, A0, A1, POS) == 3
    assert s.attitudes[("A0->A1", NEG)] == 0


def test_micro_stats_against_brute_force(micro_lexicon):
    s = lexicon_stats(micro_lexicon)
    for source, target, name in ((A0, A1, "A0->A1"), (AUTHOR, A0, "Author->A0"), (AUTHOR, A1, "Author->A1")):
        for sign in Sign:
            assert s.attitudes[(name, sign)] == brute_count(micro_lexicon, source, target, sign)
    assert s.total_entries == sum(len(f.entries) for f in micro_lexicon.frames.values())
    # выгореть is shared by two frames
    assert s.unique_entries == s.total_entries - 1
    assert sum(s.pos_total.values()) == s.total_entries
    assert sum(s.pos_unique.values()) == s.unique_entries


def test_pos_fallback_heuristic():
    lex = load_lexicon(doc(raw_frame("f", variants=["одно", "два слова", {"text": "глагол", "pos": "verb"}])))
    s = lexicon_stats(lex)
    assert s.pos_total == {"verb": 1, "noun": 0, "phrase": 1, "other": 1}


def test_stats_tsv_layout(fig1_lexicon):
    text = render_stats_tsv(lexicon_stats(fig1_lexicon))
    lines = text.splitlines()
    assert lines[0] == "dimension\tsign\tcount"
    assert "attitude A0->A1\tneg\t1" in lines
    assert "effect A1\tneg\t1" in lines
    assert "Verbs\t1\t1" in lines
    assert "Unique entries\t1\t" in lines and "Total entries\t\t1" in lines


def test_reconcile_reports_every_published_cell(micro_lexicon):
    rows = reconcile(lexicon_stats(micro_lexicon))
    assert [r.cell for r in rows] == list(PUBLISHED_V2_COUNTS)
    assert not any(r.ok for r in rows if r.expected > 0)
    text = render_reconciliation(rows)
    assert text.count("MISMATCH") == len(rows)


def test_reconcile_tolerance_boundary():
    from sentiframes.lexicon import ReconciliationRow
    assert ReconciliationRow("x", 1000, 1020, 0.02).ok
    assert not ReconciliationRow("x", 1000, 1021, 0.02).ok


# --- upstream adapter ---------------------------------------------------------

UPSTREAM = {
    "осудить": {
        "title": ["осудить"],
        "variants": ["осудить", "Осуждать", "осудить", "вынести порицание"],
        "roles": {"a0": "who condemns", "a1": "who is condemned", "a2": "grounds"},
        "frames": {
            "polarity": [["a0", "a1", "neg", 1.0], ["a0", "a2", "neg", 1.0], ["a0", "a1", "neg", 0.7]],
            "effect": [["a1", "-", 1.0]],
            "state": [["a1", "neg", 1.0]],
            "value": [["a1", "-", 1.0]],
        },
        "comment": "example",
    },
    "помочь": {
        "title": "помочь",
        "variants": ["помочь"],
        "roles": {"a0": "helper", "a1": "helped"},
        "frames": {"polarity": [["author", "a0", "pos", 0.7], ["a0", "a1", "pos", 1.0]]},
    },
}


def test_upstream_import_maps_fields():
    res = import_upstream(UPSTREAM)
    assert res.unmapped == ["<frame>.comment", "<frame>.frames.value"]
    f = res.lexicon.frames["осудить"]
    assert {e.text for e in f.entries} == {"осудить", "осуждать", "вынести порицание"}
    assert f.polarity_sign(A0, A1) is NEG and len(f.polarity) == 2
    assert f.effects == {EffectAssertion(A1, NEG, 1.0)}
    assert res.lexicon.frames["помочь"].polarity_sign(AUTHOR, A0) is POS
    assert any("duplicate variant" in n for n in res.notes)
    assert any("duplicate polarity" in n for n in res.notes)
    assert res.violations == []
    s = lexicon_stats(res.lexicon)
    assert (s.unique_entries, s.total_entries) == (4, 4)
    assert s.attitudes[("Author->A0", POS)] == 1


def test_upstream_reads_from_bytes_and_file(tmp_path):
    from sentiframes.lexicon import read_lexicon
    p = tmp_path / "frames.json"
    p.write_text(json.dumps(UPSTREAM, ensure_ascii=False), encoding="utf-8")
    assert set(read_lexicon(p).frames) == {"осудить", "помочь"}
    assert set(import_upstream(p.read_bytes()).lexicon.frames) == {"осудить", "помочь"}
