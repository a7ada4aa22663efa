"""Word, subword (BPE) and character granularities."""

from __future__ import annotations

import heapq
import json
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable

from .table import _iter_lines

UNK = "<unk>"
SPACE_TOKEN = "<sp>"
WORD_END = "</w>"
CONTINUATION = "@@"
BPE_FORMAT_VERSION = 1

WORD_CAP = 50_000
BPE_CAP = 10_000


@dataclass(frozen=True)
class GranularityConfig:
    level: str = "word"
    word_cap: int = WORD_CAP
    bpe_cap: int = BPE_CAP

    def __post_init__(self):
        if self.level not in ("word", "subword", "character"):
            raise ValueError(f"unknown granularity {self.level!r}")
        if self.word_cap <= 0 or self.bpe_cap <= 0:
            raise ValueError("vocabulary caps must be positive")


def _tokens(corpus: Iterable[str]):
    for line in corpus:
        yield from line.split()


# --- word level --------------------------------------------------------------


@dataclass
class Vocabulary:
    entries: list[tuple[str, int]]
    cap: int
    total: int

    def __post_init__(self):
        self._index = {tok for tok, _ in self.entries}

    @property
    def coverage(self) -> float:
        if self.total == 0:
            return 1.0
        return sum(c for _, c in self.entries) / self.total

    def __contains__(self, token):
        return token in self._index

    def __len__(self):
        return len(self.entries)

    def dump(self, fh):
        for tok, count in self.entries:
            fh.write(f"{tok}\t{count}\n")


def vocab_from_counts(counts: Counter, cap: int) -> Vocabulary:
    if cap <= 0:
        raise ValueError("cap must be positive")
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return Vocabulary(ranked[:cap], cap, sum(counts.values()))


def build_vocab(corpus: Iterable[str], cap: int) -> Vocabulary:
    """Keep the ``cap`` most frequent whitespace tokens of ``corpus`` (lines)."""
    return vocab_from_counts(Counter(_tokens(corpus)), cap)


def load_vocab(source) -> Vocabulary:
    """Read a ``<token>\\t<count>`` file. Coverage of a loaded vocabulary is 1.0
    because the dropped tail is not recorded."""
    entries = []
    for line in _iter_lines(source):
        if not line:
            continue
        tok, count = line.rsplit("\t", 1)
        entries.append((tok, int(count)))
    return Vocabulary(entries, len(entries), sum(c for _, c in entries))


def apply_vocab(sentence: str, vocab: Vocabulary) -> str:
    return " ".join(t if t in vocab else UNK for t in sentence.split())


# --- subword level -----------------------------------------------------------


def merge_pair(symbols: tuple, pair: tuple) -> tuple:
    """Replace non-overlapping occurrences of ``pair``, scanning left to right."""
    a, b = pair
    out = []
    i = 0
    n = len(symbols)
    while i < n:
        if i + 1 < n and symbols[i] == a and symbols[i + 1] == b:
            out.append(a + b)
            i += 2
        else:
            out.append(symbols[i])
            i += 1
    return tuple(out)


@dataclass
class BpeModel:
    merges: list[tuple[str, str]]
    alphabet: frozenset
    target_size: int
    word_end_marker: str = WORD_END
    vocab: frozenset = field(init=False)

    def __post_init__(self):
        self.alphabet = frozenset(self.alphabet)
        self.vocab = self.alphabet | {self.word_end_marker} | {a + b for a, b in self.merges}
        self._ranks = {pair: i for i, pair in enumerate(self.merges)}
        self._cache: dict[str, tuple] = {}

    def segment(self, word: str) -> tuple:
        """Symbols of ``word`` after replaying the merges in learned order."""
        cached = self._cache.get(word)
        if cached is not None:
            return cached
        symbols = tuple(word) + (self.word_end_marker,)
        ranks = self._ranks
        step = 0
        while len(symbols) > 1:
            # merges earlier than `step` have already had their turn
            best = None
            for pair in zip(symbols, symbols[1:]):
                r = ranks.get(pair)
                if r is not None and r >= step and (best is None or r < best):
                    best = r
            if best is None:
                break
            symbols = merge_pair(symbols, self.merges[best])
            step = best + 1
        if len(self._cache) < 200_000:
            self._cache[word] = symbols
        return symbols

    def render(self, symbols: tuple) -> list[str]:
        marker = self.word_end_marker
        pieces = list(symbols)
        if pieces[-1] == marker:
            pieces.pop()
        elif pieces[-1].endswith(marker):
            pieces[-1] = pieces[-1][: -len(marker)]
        return [p + CONTINUATION for p in pieces[:-1]] + pieces[-1:]

    def dump(self, fh):
        header = {
            "version": BPE_FORMAT_VERSION,
            "word_end_marker": self.word_end_marker,
            "target_size": self.target_size,
            "alphabet": sorted(self.alphabet),
        }
        fh.write("#bpe " + json.dumps(header, ensure_ascii=False) + "\n")
        for a, b in self.merges:
            fh.write(f"{a} {b}\n")

    def __reduce__(self):
        return (BpeModel, (self.merges, self.alphabet, self.target_size, self.word_end_marker))


def load_bpe(source) -> BpeModel:
    lines = iter(_iter_lines(source))
    first = next(lines, "")
    if not first.startswith("#bpe "):
        raise ValueError("missing '#bpe' header line in merges file")
    header = json.loads(first[len("#bpe "):])
    if header.get("version") != BPE_FORMAT_VERSION:
        raise ValueError(f"unsupported merges file version {header.get('version')!r}")
    merges = []
    for line in lines:
        if not line:
            continue
        a, b = line.split(" ")
        merges.append((a, b))
    return BpeModel(merges, frozenset(header["alphabet"]), header["target_size"], header["word_end_marker"])


def word_counts(corpus: Iterable[str]) -> Counter:
    return Counter(_tokens(corpus))


def bpe_learn(corpus: Iterable[str], target_size: int, word_end_marker: str = WORD_END) -> BpeModel:
    return bpe_learn_counts(word_counts(corpus), target_size, word_end_marker)


def bpe_learn_counts(counts: Counter, target_size: int, word_end_marker: str = WORD_END) -> BpeModel:
    """Learn merges from a word-frequency table.

    Symbol inventory starts as the character alphabet plus the end marker and
    grows by one per merge; learning stops when the next merge would push it
    past ``target_size`` or when no pair occurs at least twice. Frequency ties
    go to the lexicographically smallest pair.
    """
    if target_size <= 0:
        raise ValueError("target_size must be positive")
    words = [tuple(w) + (word_end_marker,) for w in counts]
    freqs = [counts[w] for w in counts]
    alphabet = frozenset(ch for w in counts for ch in w)

    pair_counts: Counter = Counter()
    where: dict[tuple, set] = {}
    for idx, (syms, f) in enumerate(zip(words, freqs)):
        for pair in zip(syms, syms[1:]):
            pair_counts[pair] += f
            where.setdefault(pair, set()).add(idx)

    # (-count, pair): highest count first, ties to the smallest pair; stale
    # entries are skipped on pop
    heap = [(-c, pair) for pair, c in pair_counts.items()]
    heapq.heapify(heap)

    merges: list[tuple[str, str]] = []
    size = len(alphabet) + 1
    while size < target_size and heap:
        neg, best = heapq.heappop(heap)
        if pair_counts.get(best, 0) != -neg:
            continue
        if -neg < 2:
            break
        merges.append(best)
        size += 1
        touched = set()
        for idx in sorted(where.pop(best, ())):
            old = words[idx]
            new = merge_pair(old, best)
            if new == old:
                continue
            f = freqs[idx]
            for pair in zip(old, old[1:]):
                pair_counts[pair] -= f
                touched.add(pair)
            for pair in zip(new, new[1:]):
                pair_counts[pair] += f
                touched.add(pair)
                where.setdefault(pair, set()).add(idx)
            words[idx] = new
        for pair in touched:
            c = pair_counts[pair]
            if c > 0:
                heapq.heappush(heap, (-c, pair))
            else:
                del pair_counts[pair]
    return BpeModel(merges, alphabet, target_size, word_end_marker)


def bpe_apply(sentence: str, model: BpeModel) -> str:
    out: list[str] = []
    for word in sentence.split():
        out.extend(model.render(model.segment(word)))
    return " ".join(out)


def bpe_undo(sentence: str) -> str:
    """Join ``@@``-continued pieces back into words.

    Words that themselves end in ``@@`` are outside the invertible domain.
    """
    return sentence.replace(CONTINUATION + " ", "")


# --- character level ---------------------------------------------------------


def to_characters(sentence: str) -> str:
    return " ".join(SPACE_TOKEN if ch == " " else ch for ch in sentence)


def from_characters(chars: str) -> str:
    if chars == "":
        return ""
    return "".join(" " if t == SPACE_TOKEN else t for t in chars.split(" "))
