"""Forward maximum matching word segmentation.

A dictionary-driven stand-in for statistical segmenters, so the pipeline can
run on raw Chinese text. Han runs are matched greedily against the lexicon
(longest word first, single-character fallback); runs of other characters are
kept whole; non-ASCII punctuation marks always stand alone.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass
from typing import Iterable

from .errors import TableParseError
from .table import _iter_lines, is_han


@dataclass(frozen=True)
class Lexicon:
    words: frozenset
    max_len: int

    @classmethod
    def from_words(cls, words: Iterable[str]) -> "Lexicon":
        ws = frozenset(words)
        return cls(ws, max((len(w) for w in ws), default=0))

    def __contains__(self, word):
        return word in self.words

    def __len__(self):
        return len(self.words)


def load_lexicon(source) -> Lexicon:
    words = set()
    for line_no, line in enumerate(_iter_lines(source), start=1):
        word = line.strip()
        if not word:
            continue
        if any(c.isspace() for c in word):
            raise TableParseError(line_no, f"lexicon entry {word!r} contains whitespace")
        words.add(word)
    return Lexicon.from_words(words)


def read_lexicon(path) -> Lexicon:
    with open(path, "rb") as fh:
        return load_lexicon(fh)


def _is_mark(ch):
    return not ch.isascii() and unicodedata.category(ch).startswith("P")


def _fmm(run: str, lex: Lexicon) -> list[str]:
    out = []
    i = 0
    n = len(run)
    while i < n:
        for size in range(min(lex.max_len, n - i), 1, -1):
            if run[i:i + size] in lex.words:
                break
        else:
            size = 1
        out.append(run[i:i + size])
        i += size
    return out


def segment(sentence: str, lex: Lexicon) -> str:
    tokens: list[str] = []
    buf = ""
    buf_han = False

    def flush():
        nonlocal buf
        if buf:
            tokens.extend(_fmm(buf, lex) if buf_han else [buf])
            buf = ""

    for ch in sentence:
        if ch.isspace():
            flush()
        elif _is_mark(ch):
            flush()
            tokens.append(ch)
        else:
            han = is_han(ch)
            if buf and han != buf_han:
                flush()
            buf += ch
            buf_han = han
    flush()
    return " ".join(tokens)
