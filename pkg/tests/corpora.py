"""Seeded synthetic corpora for tests."""

import random

from wubimt.codec import default_punctuation
from wubimt.table import default_table

LATIN_ALPHABET = "abcdefghijklmnopqrstuvwxyzABCXYZ0123456789|^.,()<>'\"-?!:;[]\\@#%"
LOOKALIKES = ["sk", "bd|yad", "ukd0", "a|b", "ab|", "|", "^", "^sk", ".", ",", "\\,", "1a", "zz", "1995", "A|b", "x9|"]


def chinese_word(rng, chars, max_len=4):
    return "".join(rng.choice(chars) for _ in range(rng.randint(1, max_len)))


def latin_token(rng):
    if rng.random() < 0.4:
        return rng.choice(LOOKALIKES)
    return "".join(rng.choice(LATIN_ALPHABET) for _ in range(rng.randint(1, 6)))


def strict_sentence(rng, chars=None, marks=None, max_tokens=15, p_latin=0.2, p_punct=0.15):
    """A sentence that strict-mode encoding accepts."""
    if chars is None:
        chars = sorted(default_table().forward)
    if marks is None:
        marks = sorted(default_punctuation().forward)
    tokens = []
    for _ in range(rng.randint(0, max_tokens)):
        u = rng.random()
        if u < p_latin:
            tokens.append(latin_token(rng))
        elif u < p_latin + p_punct:
            tokens.append(rng.choice(marks))
        else:
            tokens.append(chinese_word(rng, chars))
    return " ".join(tokens)


def chinese_corpus(n, seed=0, **kw):
    rng = random.Random(seed)
    chars = sorted(default_table().forward)
    marks = sorted(default_punctuation().forward)
    return [strict_sentence(rng, chars, marks, **kw) for _ in range(n)]


def word_corpus(n_sentences, vocab_size=20, seed=0, max_len=12):
    rng = random.Random(seed)
    vocab = [f"w{i}" for i in range(vocab_size)]
    return [" ".join(rng.choice(vocab) for _ in range(rng.randint(0, max_len))) for _ in range(n_sentences)]
