import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import make_corpus
from oracles import model1_em
from segaug.aligner import (
    Direction,
    Heuristic,
    TranslationTable,
    WordAlignment,
    align_corpus,
    format_pharaoh,
    load_table,
    parse_pharaoh,
    read_pharaoh,
    save_table,
    symmetrize,
    train_and_align,
    train_model1,
    viterbi_align,
)
from segaug.errors import ConfigError, EmptyCorpus, IndexOutOfRange, LineCountMismatch, MalformedLink

WA = lambda *links: WordAlignment(frozenset(links))  # noqa: E731


# --- Pharaoh format ---------------------------------------------------------

def test_parse_examples():
    assert parse_pharaoh("0-0 1-2 2-1") == WA((0, 0), (1, 2), (2, 1))
    assert parse_pharaoh("") == WA()
    with pytest.raises(MalformedLink) as exc:
        parse_pharaoh("0-0 x-1")
    assert exc.value.position == 2 and exc.value.item == "x-1"


@pytest.mark.parametrize("bad", ["0-", "-1", "1_2", "0-0-0", "a-b", "1-2x"])
def test_parse_rejects(bad):
    with pytest.raises(MalformedLink):
        parse_pharaoh(bad)


def test_format_examples():
    assert format_pharaoh(WA((1, 2), (0, 0))) == "0-0 1-2"
    assert format_pharaoh(WA()) == ""


links_st = st.frozensets(st.tuples(st.integers(0, 60), st.integers(0, 60)), max_size=25)


@given(links_st)
def test_pharaoh_round_trip(links):
    a = WordAlignment(links)
    s = format_pharaoh(a)
    assert parse_pharaoh(s) == a
    assert format_pharaoh(parse_pharaoh(s)) == s


def test_read_pharaoh_checks(tmp_path):
    c = make_corpus([(["a", "b"], ["x"]), (["c"], ["y", "z"])])
    f = tmp_path / "a.pharaoh"
    f.write_text("0-0 1-0\n0-1\n", encoding="utf-8")
    assert read_pharaoh(f, c) == [WA((0, 0), (1, 0)), WA((0, 1))]
    f.write_text("0-0\n", encoding="utf-8")
    with pytest.raises(LineCountMismatch):
        read_pharaoh(f, c)
    f.write_text("0-0\n0-2\n", encoding="utf-8")
    with pytest.raises(IndexOutOfRange):
        read_pharaoh(f, c)
    f.write_text("0-0\n\n", encoding="utf-8")
    assert read_pharaoh(f, c)[1] == WA()


# --- IBM Model 1 -------------------------------------------------------------

TWO_PAIRS = [(["a"], ["x"]), (["a", "b"], ["x", "y"])]


def _table_matches_oracle(table, oracle, direction):
    for (f, e), p in oracle.items():
        assert table.prob(f, e) == pytest.approx(p, rel=1e-9, abs=1e-12), (f, e)
    assert len(oracle) == len(table.probs)


def test_two_pair_example_against_oracle():
    table = train_model1(make_corpus(TWO_PAIRS), Direction.TGT_GIVEN_SRC, 5)
    oracle, history = model1_em(TWO_PAIRS, 5)
    _table_matches_oracle(table, oracle, Direction.TGT_GIVEN_SRC)
    assert table.loglik_history == pytest.approx(history, rel=1e-12)
    # frozen from the oracle
    assert table.prob("x", "a") == pytest.approx(0.8775979370264828, rel=1e-12)
    assert table.prob("y", "a") == pytest.approx(0.12240206297351722, rel=1e-12)
    assert table.prob("x", "a") > table.prob("y", "a")


def test_single_pair():
    # each conditional has a single outcome, so both probabilities are exactly 1
    table = train_model1(make_corpus([(["a"], ["x"])]), Direction.TGT_GIVEN_SRC, 5)
    oracle, _ = model1_em([(["a"], ["x"])], 5)
    assert table.prob("x", "a") == oracle[("x", "a")] == 1.0
    assert table.prob("x", None) == oracle[("x", None)] == 1.0
    assert np.allclose(table.conditional_sums(), 1.0)


def test_reverse_direction_is_transposed_problem():
    rev = train_model1(make_corpus(TWO_PAIRS), Direction.SRC_GIVEN_TGT, 4)
    oracle, _ = model1_em([(t, s) for s, t in TWO_PAIRS], 4)
    _table_matches_oracle(rev, oracle, Direction.SRC_GIVEN_TGT)


words = st.sampled_from(["a", "b", "c", "d", "e"])
tgt_words = st.sampled_from(["v", "w", "x", "y", "z"])
small_corpus = st.lists(st.tuples(st.lists(words, min_size=1, max_size=4),
                                  st.lists(tgt_words, min_size=1, max_size=4)),
                        min_size=1, max_size=6)


@settings(max_examples=40, deadline=None)
@given(small_corpus, st.integers(1, 6))
def test_em_matches_oracle(rows, iters):
    table = train_model1(make_corpus(rows), Direction.TGT_GIVEN_SRC, iters)
    oracle, history = model1_em(rows, iters)
    _table_matches_oracle(table, oracle, Direction.TGT_GIVEN_SRC)
    assert table.loglik_history == pytest.approx(history, rel=1e-9)


@settings(max_examples=40, deadline=None)
@given(small_corpus, st.sampled_from(list(Direction)))
def test_em_invariants(rows, direction):
    table = train_model1(make_corpus(rows), direction, 8)
    h = table.loglik_history
    assert all(b >= a - 1e-9 for a, b in zip(h, h[1:]))
    assert np.all((table.probs >= 0) & (table.probs <= 1))
    assert np.allclose(table.conditional_sums(), 1.0, atol=1e-9)


def test_iters_monotone_one_vs_two():
    rng = random.Random(3)
    rows = [([rng.choice("abcdef") for _ in range(4)], [rng.choice("uvwxyz") for _ in range(3)])
            for _ in range(20)]
    c = make_corpus(rows)
    ll1 = train_model1(c, iters=1).loglik_history[-1]
    ll2 = train_model1(c, iters=2).loglik_history[-1]
    assert ll2 >= ll1


def dictionary_corpus(n_pairs=50, vocab=20, seed=0):
    rng = random.Random(seed)
    rows = []
    for _ in range(n_pairs):
        ws = rng.sample(range(vocab), rng.randint(3, 6))
        tw = list(ws)
        rng.shuffle(tw)
        rows.append(([f"s{w}" for w in ws], [f"t{w}" for w in tw]))
    return make_corpus(rows), vocab


def test_dictionary_recovery():
    c, vocab = dictionary_corpus()
    fwd = train_model1(c, Direction.TGT_GIVEN_SRC, 10)
    rev = train_model1(c, Direction.SRC_GIVEN_TGT, 10)
    for k in range(vocab):
        assert fwd.prob(f"t{k}", f"s{k}") > 0.9
        assert rev.prob(f"s{k}", f"t{k}") > 0.9


def test_errors():
    with pytest.raises(EmptyCorpus):
        train_model1(make_corpus([]), iters=1)
    with pytest.raises(ConfigError):
        train_model1(make_corpus(TWO_PAIRS), iters=0)


def test_sharded_e_step_matches_single():
    c, _ = dictionary_corpus(200, 40, seed=5)
    one = train_model1(c, iters=6, workers=1)
    many = train_model1(c, iters=6, workers=7)
    np.testing.assert_allclose(many.probs, one.probs, rtol=1e-9, atol=1e-15)
    np.testing.assert_allclose(many.loglik_history, one.loglik_history, rtol=1e-9)


def test_table_tsv_round_trip(tmp_path):
    table = train_model1(make_corpus(TWO_PAIRS), iters=3)
    save_table(table, tmp_path / "t.tsv")
    rows = (tmp_path / "t.tsv").read_text(encoding="utf-8").splitlines()
    assert all(len(r.split("\t")) == 3 for r in rows)
    back = load_table(tmp_path / "t.tsv")
    for e, f, p in table.rows():
        assert back.prob(f, None if e == "<NULL>" else e) == p


# --- Viterbi -----------------------------------------------------------------

def manual_table(entries, direction=Direction.TGT_GIVEN_SRC):
    """entries: {(f, e or None): prob}"""
    dep = sorted({f for f, _ in entries})
    cond = ["<NULL>"] + sorted({e for _, e in entries if e is not None})
    di = {w: i for i, w in enumerate(dep)}
    ci = {w: i for i, w in enumerate(cond)}
    keys = list(entries)
    return TranslationTable(
        dep, cond,
        np.array([di[f] for f, _ in keys], dtype=np.int64),
        np.array([0 if e is None else ci[e] for _, e in keys], dtype=np.int64),
        np.array([entries[k] for k in keys], dtype=np.float64),
        direction,
    )


def pair_of(src, tgt):
    return make_corpus([(src, tgt)]).pairs[0]


def test_viterbi_argmax():
    t = manual_table({("x", "a"): 0.9, ("x", None): 0.1})
    assert viterbi_align(pair_of(["a"], ["x"]), t) == WA((0, 0))


def test_viterbi_null_wins():
    t = manual_table({("x", "a"): 0.1, ("x", None): 0.9})
    assert viterbi_align(pair_of(["a"], ["x"]), t) == WA()


def test_viterbi_tie_goes_to_smaller_index():
    t = manual_table({("x", "a"): 0.4, ("x", "b"): 0.4, ("x", None): 0.2})
    assert viterbi_align(pair_of(["a", "b"], ["x"]), t) == WA((0, 0))
    assert viterbi_align(pair_of(["b", "a"], ["x"]), t) == WA((0, 0))


def test_viterbi_null_tie_means_no_link():
    t = manual_table({("x", "a"): 0.5, ("x", None): 0.5})
    assert viterbi_align(pair_of(["a"], ["x"]), t) == WA()


def test_viterbi_oov():
    t = manual_table({("x", "a"): 0.9, ("x", None): 0.1})
    # unseen target word links to nothing; unseen source word contributes 0
    assert viterbi_align(pair_of(["a"], ["q"]), t) == WA()
    assert viterbi_align(pair_of(["zz", "a"], ["x"]), t) == WA((1, 0))


def test_viterbi_reverse_orientation():
    t = manual_table({("a", "x"): 0.9, ("a", None): 0.1}, Direction.SRC_GIVEN_TGT)
    # dependent side is the source; links still come back as (source, target)
    assert viterbi_align(pair_of(["a"], ["y", "x"]), t) == WA((0, 1))


def test_align_corpus_matches_per_pair():
    c, _ = dictionary_corpus(30, 15, seed=2)
    t = train_model1(c, iters=5)
    assert align_corpus(c, t) == [viterbi_align(p, t) for p in c.pairs]


# --- Symmetrization ----------------------------------------------------------

def test_symmetrize_examples():
    fwd, rev = WA((0, 0), (1, 1)), WA((0, 0))
    assert symmetrize(fwd, rev, Heuristic.INTERSECTION) == WA((0, 0))
    assert symmetrize(fwd, rev, Heuristic.UNION) == WA((0, 0), (1, 1))


def test_grow_diag_final_hand_trace():
    fwd, rev = WA((0, 0), (1, 1)), WA((0, 0), (2, 1))
    got = symmetrize(fwd, rev, Heuristic.GROW_DIAG_FINAL, src_len=3, tgt_len=2)
    assert got == WA((0, 0), (1, 1), (2, 1))


def test_grow_diag_final_final_step():
    # (2,2) is not adjacent to the intersection, so only the final step can add it
    fwd, rev = WA((0, 0), (2, 2)), WA((0, 0))
    assert symmetrize(fwd, rev, Heuristic.GROW_DIAG_FINAL) == WA((0, 0), (2, 2))
    # both words of (0,1) are already aligned, so neither growth nor final adds it
    fwd, rev = WA((0, 0), (1, 1)), WA((0, 0), (1, 1), (0, 1))
    assert symmetrize(fwd, rev, Heuristic.GROW_DIAG_FINAL) == WA((0, 0), (1, 1))


@given(links_st, links_st, st.sampled_from(list(Heuristic)))
def test_symmetrize_laws(a, b, h):
    fwd, rev = WordAlignment(a), WordAlignment(b)
    inter = symmetrize(fwd, rev, Heuristic.INTERSECTION).links
    union = symmetrize(fwd, rev, Heuristic.UNION).links
    gdf = symmetrize(fwd, rev, Heuristic.GROW_DIAG_FINAL).links
    assert inter <= gdf <= union
    assert symmetrize(fwd, fwd, h) == fwd


def test_heuristic_parse():
    assert Heuristic.parse("grow_diag_final") is Heuristic.GROW_DIAG_FINAL
    with pytest.raises(ConfigError):
        Heuristic.parse("grow-diag-final-and")


def test_train_and_align_bounds():
    c, _ = dictionary_corpus(20, 10, seed=1)
    res = train_and_align(c, iters=3)
    for p, a in zip(c.pairs, res.alignments):
        a.check_bounds(len(p.source), len(p.target))
    assert math.isfinite(res.forward.loglik_history[-1])
