import io
import random

import pytest
from hypothesis import given, settings, strategies as st

from wubimt.subword import (
    UNK,
    BpeModel,
    GranularityConfig,
    Vocabulary,
    apply_vocab,
    bpe_apply,
    bpe_learn,
    bpe_undo,
    build_vocab,
    from_characters,
    load_bpe,
    load_vocab,
    merge_pair,
    to_characters,
)

from oracles import brute_force_bpe
from corpora import word_corpus


# --- vocabulary ---------------------------------------------------------------


def test_build_vocab_hand_case():
    v = build_vocab(["a a b c"], 2)
    assert v.entries == [("a", 2), ("b", 1)]
    assert v.coverage == 0.75


def test_build_vocab_full_coverage():
    v = build_vocab(["a a b c"], 10)
    assert v.coverage == 1.0
    assert build_vocab(["x"], 1).entries == [("x", 1)]
    assert build_vocab(["x"], 1).coverage == 1.0


def test_build_vocab_empty():
    v = build_vocab([], 5)
    assert v.entries == [] and v.coverage == 1.0


def test_tie_break_is_lexicographic():
    v = build_vocab(["c b a c b a d"], 2)
    assert v.entries == [("a", 2), ("b", 2)]


def test_apply_vocab():
    v = build_vocab(["a b"], 10)
    assert apply_vocab("a c b", v) == f"a {UNK} b"
    assert apply_vocab("a b", v) == "a b"
    assert apply_vocab("", v) == ""


def test_vocab_file_round_trip():
    v = build_vocab(["a a b c"], 2)
    buf = io.StringIO()
    v.dump(buf)
    assert buf.getvalue() == "a\t2\nb\t1\n"
    loaded = load_vocab(io.StringIO(buf.getvalue()))
    assert loaded.entries == v.entries


@given(st.lists(st.sampled_from("abcdefgh"), max_size=60), st.integers(1, 9))
def test_coverage_monotone(tokens, cap):
    line = [" ".join(tokens)]
    assert build_vocab(line, cap).coverage <= build_vocab(line, cap + 1).coverage


def test_granularity_config():
    cfg = GranularityConfig()
    assert (cfg.word_cap, cfg.bpe_cap) == (50_000, 10_000)
    with pytest.raises(ValueError):
        GranularityConfig(level="byte")
    with pytest.raises(ValueError):
        GranularityConfig(word_cap=0)


# --- BPE ----------------------------------------------------------------------


def test_merge_pair_left_to_right():
    assert merge_pair(("a", "a", "a"), ("a", "a")) == ("aa", "a")
    assert merge_pair(("a", "b", "a", "b"), ("a", "b")) == ("ab", "ab")


def test_low_lower_hand_trace():
    # (l,o) and (o,w) both occur 3 times; (l,o) is lexicographically first
    m = bpe_learn(["low low lower"], 100)
    assert m.merges == [("l", "o"), ("lo", "w"), ("low", "</w>")]
    assert m.segment("low") == ("low</w>",)
    assert m.segment("lower") == ("low", "e", "r", "</w>")
    assert bpe_apply("low lower", m) == "low low@@ e@@ r"


def test_matches_oracle_on_small_corpus():
    corpus = ["low low lower", "newest newest widest", "lowest wider new"]
    for size in (5, 12, 20, 40):
        merges, _ = brute_force_bpe(corpus, size)
        assert bpe_learn(corpus, size).merges == merges


def test_zero_merges_when_no_headroom():
    corpus = ["ab ab ab"]
    # alphabet {a, b} + marker = 3 symbols
    assert bpe_learn(corpus, 3).merges == []
    assert bpe_learn(["a"], 100).merges == []


def test_zero_merge_model_splits_characters():
    m = bpe_learn(["ab"], 3)
    assert bpe_apply("abc xy", m) == "a@@ b@@ c x@@ y"


def test_vocab_bounds():
    corpus = word_corpus(200, vocab_size=50, seed=3)
    for size in (12, 30, 80):
        m = bpe_learn(corpus, size)
        assert len(m.vocab) <= size
        assert len(m.merges) <= size - len(m.alphabet) - 1
    # a target below the alphabet size cannot shrink the alphabet
    small = bpe_learn(corpus, 5)
    assert small.merges == [] and small.vocab == small.alphabet | {"</w>"}


def test_merges_file_round_trip():
    m = bpe_learn(["low low lower newest"], 30)
    buf = io.StringIO()
    m.dump(buf)
    assert buf.getvalue().startswith("#bpe ")
    loaded = load_bpe(io.StringIO(buf.getvalue()))
    assert loaded.merges == m.merges
    assert loaded.vocab == m.vocab
    assert loaded.word_end_marker == m.word_end_marker


def test_load_bpe_requires_header():
    with pytest.raises(ValueError):
        load_bpe(io.StringIO("l o\n"))


def test_training_words_replay_learning_segmentation():
    corpus = word_corpus(300, vocab_size=40, seed=5)
    corpus = [line.replace("w", "") + " " + line for line in corpus]
    merges, final_words = brute_force_bpe(corpus, 60)
    m = bpe_learn(corpus, 60)
    assert m.merges == merges
    occurrences = [w for line in corpus for w in line.split()]
    for word, symbols in zip(occurrences, final_words):
        assert m.segment(word) == tuple(symbols)


@settings(max_examples=200)
@given(st.lists(st.text("abcd", min_size=1, max_size=6), min_size=1, max_size=12), st.text("abcdex ", max_size=30))
def test_bpe_round_trip(train, sentence):
    m = bpe_learn([" ".join(train)], 12)
    out = bpe_apply(sentence, m)
    assert bpe_undo(out) == " ".join(sentence.split())
    for piece in out.split():
        assert not piece.endswith("@@@@")


# --- characters ---------------------------------------------------------------


def test_to_characters():
    assert to_characters("重 要") == "重 <sp> 要"
    assert to_characters("ab") == "a b"
    assert to_characters("") == ""


@given(st.text(st.characters(blacklist_categories=("Cs",), blacklist_characters="\n"), max_size=30))
def test_characters_round_trip(s):
    assert from_characters(to_characters(s)) == s
