import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import make_corpus
from segaug.corpus import (
    Corpus,
    ParallelPair,
    Provenance,
    Sentence,
    Token,
    corpus_stats,
    read_parallel,
    read_tsv,
    write_parallel,
)
from segaug.errors import CorpusIOError, EmptyLine, EncodingError, InvariantViolation, LineCountMismatch


def _write(path, text):
    path.write_text(text, encoding="utf-8")
    return path


def test_read_three_lines(tmp_path):
    s = _write(tmp_path / "a.ja", "a b\nc\nd e f\n")
    t = _write(tmp_path / "a.zh", "x\ny z\nw\n")
    c = read_parallel(s, t, ("ja", "zh"))
    assert [p.id for p in c.pairs] == [0, 1, 2]
    assert all(p.provenance is Provenance.ORIGINAL for p in c)
    assert c.pairs[2].source.texts == ("d", "e", "f")


def test_line_count_mismatch(tmp_path):
    s = _write(tmp_path / "a.ja", "a\nb\nc\n")
    t = _write(tmp_path / "a.zh", "x\ny\n")
    with pytest.raises(LineCountMismatch):
        read_parallel(s, t, ("ja", "zh"))


def test_pretokenized_split(tmp_path):
    s = _write(tmp_path / "a.ja", "a b , c\n")
    t = _write(tmp_path / "a.zh", "x\n")
    c = read_parallel(s, t, ("ja", "zh"))
    assert c.pairs[0].source.texts == ("a", "b", ",", "c")


def test_raw_mode_keeps_line(tmp_path):
    s = _write(tmp_path / "a.ja", "a b , c\n")
    t = _write(tmp_path / "a.zh", "x\n")
    c = read_parallel(s, t, ("ja", "zh"), pretokenized=False)
    assert c.pairs[0].source.texts == ("a b , c",)


def test_missing_trailing_newline_and_crlf(tmp_path):
    s = _write(tmp_path / "a.ja", "a\r\nb")
    t = _write(tmp_path / "a.zh", "x\ny\n")
    c = read_parallel(s, t, ("ja", "zh"))
    assert [p.source.texts for p in c] == [("a",), ("b",)]


def test_encoding_error_reports_offset(tmp_path):
    s = tmp_path / "a.ja"
    s.write_bytes(b"ab\n\xff\n")
    t = _write(tmp_path / "a.zh", "x\ny\n")
    with pytest.raises(EncodingError) as exc:
        read_parallel(s, t, ("ja", "zh"))
    assert exc.value.byte_offset == 3


def test_blank_line_is_an_error(tmp_path):
    s = _write(tmp_path / "a.ja", "a\n  \nc\n")
    t = _write(tmp_path / "a.zh", "x\ny\nz\n")
    with pytest.raises(EmptyLine) as exc:
        read_parallel(s, t, ("ja", "zh"))
    assert exc.value.line_number == 2


def test_missing_file(tmp_path):
    t = _write(tmp_path / "a.zh", "x\n")
    with pytest.raises(CorpusIOError):
        read_parallel(tmp_path / "nope", t)


def test_tsv_reader(tmp_path):
    f = _write(tmp_path / "c.tsv", "a b\tx\nc\ty z\n")
    c = read_tsv(f, ("ja", "zh"))
    assert [p.key for p in c] == [(("a", "b"), ("x",)), (("c",), ("y", "z"))]
    bad = _write(tmp_path / "bad.tsv", "a b x\n")
    with pytest.raises(CorpusIOError):
        read_tsv(bad)


def test_write_joiners(tmp_path):
    c = make_corpus([(["a", "b"], ["x", "y"]), (["c"], ["z"])])
    write_parallel(c, tmp_path / "o.ja", tmp_path / "o.zh", source_joiner="", target_joiner=" ")
    assert (tmp_path / "o.ja").read_text(encoding="utf-8") == "ab\nc\n"
    assert (tmp_path / "o.zh").read_text(encoding="utf-8") == "x y\nz\n"


def test_write_empty_corpus_refused(tmp_path):
    with pytest.raises(CorpusIOError):
        write_parallel(Corpus((), "ja", "zh"), tmp_path / "a", tmp_path / "b")


token_text = st.text(st.characters(blacklist_categories=("Zs", "Zl", "Zp", "Cc", "Cs")), min_size=1, max_size=4)
sentence = st.lists(token_text, min_size=1, max_size=8)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(sentence, sentence), min_size=1, max_size=6))
def test_round_trip(tmp_path_factory, rows):
    tmp = tmp_path_factory.mktemp("rt")
    c = make_corpus(rows)
    write_parallel(c, tmp / "o.ja", tmp / "o.zh")
    back = read_parallel(tmp / "o.ja", tmp / "o.zh", ("ja", "zh"))
    assert [p.key for p in back] == [p.key for p in c]


def test_stats_empty():
    r = corpus_stats(Corpus((), "ja", "zh"))
    assert r.total == 0 and sum(r.by_provenance.values()) == 0 and r.long_pairs == 0


def test_stats_counts_by_provenance():
    base = make_corpus([(["a", ",", "b"], ["x", "，", "y"])] * 1 + [(["c"], ["z"])] * 2)
    extra = tuple(ParallelPair(10 + k, base.pairs[0].source, base.pairs[0].target, Provenance.PSEUDO)
                  for k in range(2))
    c = Corpus(base.pairs + extra, "ja", "zh")
    r = corpus_stats(c)
    assert r.by_provenance["Original"] == 3 and r.by_provenance["Pseudo"] == 2 and r.total == 5
    assert sum(r.by_provenance.values()) == r.total
    assert r.long_pairs == 3
    assert r.mean_source_tokens == pytest.approx((3 + 1 + 1 + 3 + 3) / 5)


def test_stats_baseline_shape():
    # Baseline row: 300k original pairs and nothing else
    s = Sentence((Token("a"),), "ja")
    t = Sentence((Token("x"),), "zh")
    c = Corpus(tuple(ParallelPair(i, s, t) for i in range(300_000)), "ja", "zh")
    r = corpus_stats(c)
    assert r.total == r.originals == 300_000
    assert r.by_provenance["Original"] == 300_000


def test_type_invariants():
    with pytest.raises(ValueError):
        Token("")
    with pytest.raises(ValueError):
        Token("a\nb")
    s = Sentence((Token("a"),), "ja")
    with pytest.raises(ValueError):
        ParallelPair(0, s, s)
    t = Sentence((Token("x"),), "zh")
    with pytest.raises(InvariantViolation):
        Corpus((ParallelPair(0, s, t), ParallelPair(0, s, t)), "ja", "zh")
    with pytest.raises(InvariantViolation):
        Corpus((ParallelPair(0, s, t),), "zh", "ja")
