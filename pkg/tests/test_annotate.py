import pytest
from hypothesis import given, strategies as st

from tempolm.annotate import (
    SpanKind,
    annotate_document,
    split_sentences,
    tag_persons_heuristic,
    tag_temporal_expressions,
    tag_temporal_signals,
    tokenize_raw,
)
from tempolm.errors import AnnotationAlignmentError, NotInLexiconError, TimestampParseError
from tempolm.lexicon import Relation, SignalLexicon
from tempolm.timescale import Granularity


def texts(tokens):
    return [t.text for t in tokens]


def test_tokenize_empty():
    assert tokenize_raw("") == []


def test_tokenize_sentence():
    assert texts(tokenize_raw("Before 2006, he quit.")) == ["Before", "2006", ",", "he", "quit", "."]


def test_tokenize_decade_phrase():
    assert texts(tokenize_raw("the 1990s")) == ["the", "1990s"]


def test_tokenize_initialism_kept_whole():
    assert texts(tokenize_raw("Notorious B.I.G. sang")) == ["Notorious", "B.I.G.", "sang"]


@given(st.text(max_size=200))
def test_tokenize_offsets_partition_nonspace(text):
    tokens = tokenize_raw(text)
    covered = []
    last_end = 0
    for t in tokens:
        assert t.char_start >= last_end
        assert text[t.char_start : t.char_end] == t.text
        assert text[last_end : t.char_start].strip() == ""  # only separators between tokens
        covered.append((t.char_start, t.char_end))
        last_end = t.char_end
    assert text[last_end:].strip() == ""
    # reconstruction with original separators
    rebuilt = []
    pos = 0
    for s, e in covered:
        rebuilt.append(text[pos:s])
        rebuilt.append(text[s:e])
        pos = e
    rebuilt.append(text[pos:])
    assert "".join(rebuilt) == text


@pytest.mark.parametrize(
    "text,expect_surface,expect_norm",
    [
        ("in 2006", "2006", "2006"),
        ("the 1990s", "the 1990s", "1990s"),
        ("May 4, 2007", "May 4, 2007", "2007-05-04"),
        ("May 2007", "May 2007", "2007-05"),
        ("2007-05-04", "2007-05-04", "2007-05-04"),
        ("on 5/4/2007", "5/4/2007", "2007-05-04"),
        ("summer 2006", "summer 2006", "2006"),
        ("early 1990s", "early 1990s", "1990s"),
        ("late 2006", "late 2006", "2006"),
    ],
)
def test_expression_patterns(text, expect_surface, expect_norm):
    tokens = tokenize_raw(text)
    spans = tag_temporal_expressions(tokens, text)
    assert len(spans) == 1
    assert spans[0].surface == expect_surface
    assert spans[0].normalized is not None
    assert spans[0].normalized.render() == expect_norm


def test_expression_granularities():
    spans = tag_temporal_expressions(tokenize_raw("in 2006"), "in 2006")
    assert spans[0].normalized.granularity is Granularity.YEAR
    spans = tag_temporal_expressions(tokenize_raw("the 1990s"), "the 1990s")
    assert spans[0].normalized.granularity is Granularity.DECADE
    assert spans[0].normalized.year == 1990
    spans = tag_temporal_expressions(tokenize_raw("May 4, 2007"), "May 4, 2007")
    assert spans[0].normalized.granularity is Granularity.DAY


def test_expression_unanchored_month_day():
    spans = tag_temporal_expressions(tokenize_raw("May 4"), "May 4")
    assert len(spans) == 1
    assert spans[0].normalized is None


def test_short_decade_tagged_unnormalized():
    text = "the '90s"
    spans = tag_temporal_expressions(tokenize_raw(text), text)
    assert len(spans) == 1
    assert spans[0].surface == "the '90s"
    assert spans[0].normalized is None


def test_no_expressions_in_plain_text():
    text = "he quit his job and moved away"
    assert tag_temporal_expressions(tokenize_raw(text), text) == []


def test_longest_match_wins():
    text = "in early 1990s bands formed"
    spans = tag_temporal_expressions(tokenize_raw(text), text)
    assert [s.surface for s in spans] == ["early 1990s"]


def test_signal_before_year():
    text = "Before 2006"
    tokens = tokenize_raw(text)
    spans = tag_temporal_signals(tokens, SignalLexicon.default(), text=text)
    signals = [s for s in spans if s.kind is SpanKind.TEMPORAL_SIGNAL]
    assert len(signals) == 1
    assert signals[0].surface == "Before"
    assert signals[0].relation is Relation.BEFORE


def test_signal_during_unrestricted():
    text = "during the war"
    spans = tag_temporal_signals(tokenize_raw(text), SignalLexicon.default(), text=text)
    assert [s.surface for s in spans] == ["during"]
    assert spans[0].relation is Relation.OVERLAP


def test_signal_multiword():
    text = "prior to the vote"
    spans = tag_temporal_signals(tokenize_raw(text), SignalLexicon.default(), text=text)
    assert [s.surface for s in spans] == ["prior to"]
    assert spans[0].relation is Relation.BEFORE


def test_restricted_preposition_requires_expression():
    lex = SignalLexicon.default()
    with_expr = "in 2006"
    spans = tag_temporal_signals(tokenize_raw(with_expr), lex, text=with_expr)
    assert [s.surface for s in spans] == ["in"]
    without = "in the house"
    assert tag_temporal_signals(tokenize_raw(without), lex, text=without) == []


def test_signals_suppressed_inside_expressions():
    # "May 4, 2007" contains no separate signal; "on" before it is restricted and fires
    text = "on May 4, 2007"
    spans = tag_temporal_signals(tokenize_raw(text), SignalLexicon.default(), text=text)
    assert [s.surface for s in spans] == ["on"]


def test_classify_signal():
    lex = SignalLexicon.default()
    assert lex.classify("after") is Relation.AFTER
    assert lex.classify("before") is Relation.BEFORE
    assert lex.classify("in") is Relation.OVERLAP
    with pytest.raises(NotInLexiconError):
        lex.classify("zweiundvierzig")


def test_lexicon_file_roundtrip(tmp_path):
    path = tmp_path / "signals.tsv"
    path.write_text("# comment\nbefore\tBEFORE\nprior to\tAFTER\n", encoding="utf-8")
    lex = SignalLexicon.load(path)
    assert lex.classify("prior to") is Relation.AFTER
    lex.save(tmp_path / "out.tsv")
    again = SignalLexicon.load(tmp_path / "out.tsv")
    assert again.entries == lex.entries


def test_person_heuristic_honorific():
    text = "Mr. Smith said so"
    spans = tag_persons_heuristic(tokenize_raw(text), text)
    assert [s.surface for s in spans] == ["Mr. Smith"]


def test_person_heuristic_bigram():
    text = "with Tupac Shakur on stage"
    spans = tag_persons_heuristic(tokenize_raw(text), text)
    assert [s.surface for s in spans] == ["Tupac Shakur"]


def test_person_heuristic_initialism_run():
    text = "then Notorious B.I.G. arrived"
    spans = tag_persons_heuristic(tokenize_raw(text), text)
    assert [s.surface for s in spans] == ["Notorious B.I.G."]


def test_person_heuristic_lowercase_yields_nothing():
    text = "all lowercase words here"
    assert tag_persons_heuristic(tokenize_raw(text), text) == []


def test_person_external_snapping():
    text = "A tribute to Tupac Shakur aired."
    start = text.index("Tupac")
    end = start + len("Tupac Shakur")
    doc = annotate_document("d1", "2007-05-04", text, persons=[(start, end, "Tupac Shakur")])
    persons = doc.spans_of_kind(SpanKind.PERSON)
    assert [p.surface for p in persons] == ["Tupac Shakur"]


def test_person_external_out_of_bounds():
    text = "short"
    with pytest.raises(AnnotationAlignmentError):
        annotate_document("d1", "2007-05-04", text, persons=[(0, 99, "x")])


def test_sentence_splitting_basic():
    tokens = tokenize_raw("He left in 1999. She stayed. All was well.")
    bounds = split_sentences(tokens)
    assert len(bounds) == 3


def test_sentence_splitting_abbreviation():
    tokens = tokenize_raw("Mr. Smith left. She stayed.")
    bounds = split_sentences(tokens)
    assert len(bounds) == 2


def test_annotate_document_composition():
    doc = annotate_document("d1", "2007-05-04", "Before 2006, he quit.")
    assert doc.timestamp.render() == "2007-05-04"
    assert len(doc.spans_of_kind(SpanKind.TEMPORAL_SIGNAL)) == 1
    assert len(doc.spans_of_kind(SpanKind.TEMPORAL_EXPRESSION)) == 1


def test_annotate_empty_text():
    doc = annotate_document("d1", "2007-05-04", "")
    assert doc.tokens == [] and doc.spans == [] and doc.sentence_bounds == []


def test_annotate_bad_timestamp():
    with pytest.raises(TimestampParseError):
        annotate_document("d1", "2007-13-01", "text")


def test_annotation_deterministic():
    text = "Before 2006, Mr. Smith quit his job in May 2007. The 1990s were better."
    a = annotate_document("d", "2007-05-04", text)
    b = annotate_document("d", "2007-05-04", text)
    assert a.tokens == b.tokens and a.spans == b.spans and a.sentence_bounds == b.sentence_bounds


def test_spans_disjoint_per_kind_and_signals_avoid_expressions():
    text = "Before 2006 and during May 4, 2007 the band played in 1999 with Tupac Shakur."
    doc = annotate_document("d", "2007-05-04", text)
    for kind in SpanKind:
        spans = doc.spans_of_kind(kind)
        positions = set()
        for s in spans:
            rng = set(range(s.token_start, s.token_end))
            assert not (rng & positions)
            positions |= rng
    expr = {
        i for s in doc.spans_of_kind(SpanKind.TEMPORAL_EXPRESSION)
        for i in range(s.token_start, s.token_end)
    }
    sig = {
        i for s in doc.spans_of_kind(SpanKind.TEMPORAL_SIGNAL)
        for i in range(s.token_start, s.token_end)
    }
    assert not (expr & sig)


def test_spans_confined_to_sentences():
    text = "He spoke of 1999. Smith Jones nodded."
    doc = annotate_document("d", "2007-05-04", text)
    for s in doc.spans:
        assert any(a <= s.token_start and s.token_end <= b for a, b in doc.sentence_bounds)
