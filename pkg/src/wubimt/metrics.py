"""Corpus statistics and BLEU-based evaluation.

BLEU here works on whitespace tokens of the given lines; no retokenization is
done. Corpus BLEU is unsmoothed. Sentence BLEU adds one to numerator and
denominator of the 2- to 4-gram precisions so that short sentences still get
a usable score.
"""

from __future__ import annotations

import math
import statistics
from collections import Counter
from dataclasses import asdict, dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .codec import LENIENT, PunctuationMap, encode_sentence
from .table import WubiTable, is_han

NGRAM_ORDER = 4
DEFAULT_BIN_WIDTH = 4
DEFAULT_SAMPLES = 1500


@dataclass(frozen=True)
class CorpusStats:
    words_per_sentence: tuple[float, float]
    chars_per_word: tuple[float, float]
    chars_per_sentence: tuple[float, float]
    sentence_count: int


def _mean_std(values) -> tuple[float, float]:
    return statistics.fmean(values), statistics.pstdev(values)


def corpus_stats(corpus: Iterable[str]) -> CorpusStats:
    words_per_sent = []
    chars_per_sent = []
    chars_per_word = []
    for line in corpus:
        words = line.split()
        lengths = [len(w) for w in words]
        words_per_sent.append(len(words))
        chars_per_sent.append(sum(lengths))
        chars_per_word.extend(lengths)
    if not words_per_sent:
        raise ValueError("corpus statistics are undefined for an empty corpus")
    if not chars_per_word:
        raise ValueError("corpus contains no words")
    return CorpusStats(
        _mean_std(words_per_sent),
        _mean_std(chars_per_word),
        _mean_std(chars_per_sent),
        len(words_per_sent),
    )


def output_length_stats(hypotheses: Iterable[str]) -> tuple[float, float]:
    counts = [len(h.split()) for h in hypotheses]
    if not counts:
        raise ValueError("no hypotheses given")
    return _mean_std(counts)


# --- BLEU --------------------------------------------------------------------


def _ngrams(tokens, n):
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def sentence_stats(hypothesis: str, reference: str) -> tuple[int, ...]:
    """Sufficient statistics of one pair.

    Returns ``(m1..m4, t1..t4, hyp_len, ref_len)`` where ``m`` are clipped
    n-gram matches and ``t`` hypothesis n-gram totals.
    """
    hyp = hypothesis.split()
    ref = reference.split()
    matches = []
    totals = []
    for n in range(1, NGRAM_ORDER + 1):
        h = _ngrams(hyp, n)
        r = _ngrams(ref, n)
        matches.append(sum(min(c, r[g]) for g, c in h.items()))
        totals.append(max(len(hyp) - n + 1, 0))
    return (*matches, *totals, len(hyp), len(ref))


def _brevity_penalty(hyp_len, ref_len):
    if hyp_len >= ref_len:
        return 1.0
    if hyp_len == 0:
        return 0.0
    return math.exp(1.0 - ref_len / hyp_len)


def bleu_from_stats(stats: Sequence[int]) -> tuple[float, list[float], float]:
    """Unsmoothed BLEU from summed statistics: ``(score, precisions, bp)``.

    Orders for which the hypotheses contain no n-grams at all are left out of
    the geometric mean.
    """
    matches = stats[:NGRAM_ORDER]
    totals = stats[NGRAM_ORDER:2 * NGRAM_ORDER]
    hyp_len, ref_len = stats[-2], stats[-1]
    precisions = [m / t if t else 0.0 for m, t in zip(matches, totals)]
    bp = _brevity_penalty(hyp_len, ref_len)
    used = [p for p, t in zip(precisions, totals) if t]
    if not used or min(used) == 0.0:
        return 0.0, precisions, bp
    log_mean = sum(math.log(p) for p in used) / len(used)
    return 100.0 * bp * math.exp(log_mean), precisions, bp


def smoothed_sentence_bleu(stats: Sequence[int]) -> float:
    matches = stats[:NGRAM_ORDER]
    totals = stats[NGRAM_ORDER:2 * NGRAM_ORDER]
    if totals[0] == 0 or matches[0] == 0:
        return 0.0
    logs = [math.log(matches[0] / totals[0])]
    logs += [math.log((m + 1) / (t + 1)) for m, t in zip(matches[1:], totals[1:])]
    bp = _brevity_penalty(stats[-2], stats[-1])
    return 100.0 * bp * math.exp(sum(logs) / NGRAM_ORDER)


@dataclass(frozen=True)
class LengthBin:
    start: int
    end: int
    mean_bleu: float
    count: int


@dataclass
class BleuReport:
    corpus_bleu: float
    ngram_precisions: list[float]
    brevity_penalty: float
    hyp_len: int
    ref_len: int
    per_sentence: list[tuple[int, int, float]] = field(default_factory=list)
    bins: list[LengthBin] = field(default_factory=list)
    bin_width: int = DEFAULT_BIN_WIDTH

    def to_dict(self) -> dict:
        return {
            "corpus_bleu": self.corpus_bleu,
            "precisions": [100.0 * p for p in self.ngram_precisions],
            "bp": self.brevity_penalty,
            "hyp_len": self.hyp_len,
            "ref_len": self.ref_len,
            "bin_width": self.bin_width,
            "bins": [asdict(b) for b in self.bins],
        }

    def summary(self) -> str:
        prec = "/".join(f"{100 * p:.1f}" for p in self.ngram_precisions)
        ratio = self.hyp_len / self.ref_len if self.ref_len else 0.0
        return (
            f"BLEU = {self.corpus_bleu:.2f} {prec} (BP = {self.brevity_penalty:.3f} "
            f"ratio = {ratio:.3f} hyp_len = {self.hyp_len} ref_len = {self.ref_len})"
        )


def _check_parallel(*streams):
    lengths = {len(s) for s in streams}
    if len(lengths) > 1:
        raise ValueError(f"streams differ in length: {[len(s) for s in streams]}")


def report_from_stats(
    stats: Sequence[Sequence[int]],
    source_lengths: Sequence[int],
    bin_width: int = DEFAULT_BIN_WIDTH,
) -> BleuReport:
    """Build a report from per-sentence statistics (see :func:`sentence_stats`)."""
    _check_parallel(stats, source_lengths)
    total = [sum(col) for col in zip(*stats)] or [0] * (2 * NGRAM_ORDER + 2)
    score, precisions, bp = bleu_from_stats(total)
    per_sentence = [
        (i, src_len, smoothed_sentence_bleu(s))
        for i, (s, src_len) in enumerate(zip(stats, source_lengths))
    ]
    report = BleuReport(score, precisions, bp, total[-2], total[-1], per_sentence, bin_width=bin_width)
    report.bins = length_binned_bleu(report, bin_width)
    return report


def corpus_bleu(
    hypotheses: Sequence[str],
    references: Sequence[str],
    source_lengths: Sequence[int] | None = None,
    bin_width: int = DEFAULT_BIN_WIDTH,
) -> BleuReport:
    """Corpus BLEU plus per-sentence scores binned by source length.

    Without ``source_lengths`` the reference word counts stand in for them.
    """
    _check_parallel(hypotheses, references)
    if source_lengths is None:
        source_lengths = [len(r.split()) for r in references]
    stats = [sentence_stats(h, r) for h, r in zip(hypotheses, references)]
    return report_from_stats(stats, source_lengths, bin_width)


def length_binned_bleu(report: BleuReport, bin_width: int) -> list[LengthBin]:
    if bin_width <= 0:
        raise ValueError("bin_width must be positive")
    groups: dict[int, list[float]] = {}
    for _, src_len, score in report.per_sentence:
        groups.setdefault(src_len // bin_width, []).append(score)
    return [
        LengthBin(k * bin_width, (k + 1) * bin_width, statistics.fmean(v), len(v))
        for k, v in sorted(groups.items())
    ]


def format_bins(bins: Iterable[LengthBin]) -> str:
    return "".join(f"{b.start}\t{b.end}\t{b.mean_bleu:.4f}\t{b.count}\n" for b in bins)


# --- Wubi normalization ------------------------------------------------------


def _is_chinese_side(line, punct):
    return any(is_han(c) or c in punct.forward for c in line)


def normalize_line(line: str, table: WubiTable, punct: PunctuationMap) -> tuple[str, list[str]]:
    """Wubi form of one line plus lenient-mode notes.

    A line containing Han characters or mapped Chinese punctuation is encoded;
    any other line is taken to be Wubi already and returned unchanged.
    """
    if not _is_chinese_side(line, punct):
        return line, []
    enc = encode_sentence(line, table, punct, mode=LENIENT)
    return enc.render(), enc.diagnostics


def normalize_for_bleu(
    lines: Iterable[str],
    table: WubiTable,
    punct: PunctuationMap,
    diagnostics: list | None = None,
) -> list[str]:
    """Map Chinese lines into Wubi so they can be scored against Wubi output.

    Problems are appended to ``diagnostics`` as ``(line_index, message)``.
    """
    out = []
    for i, line in enumerate(lines):
        text, notes = normalize_line(line, table, punct)
        if diagnostics is not None:
            diagnostics.extend((i, msg) for msg in notes)
        out.append(text)
    return out


# --- significance ------------------------------------------------------------


@dataclass(frozen=True)
class SignificanceResult:
    p_value: float
    samples: int
    delta: float
    seed: int
    bleu_a: float
    bleu_b: float
    b_at_least_a: int

    def to_dict(self) -> dict:
        return asdict(self)


def resample_indices(n: int, samples: int, seed: int):
    """Yield one index array per resample, each from its own seeded stream."""
    for i in range(samples):
        rng = np.random.default_rng([seed, i])
        yield rng.integers(0, n, size=n)


def paired_bootstrap_from_stats(stats_a, stats_b, samples: int = DEFAULT_SAMPLES, seed: int = 0) -> SignificanceResult:
    a = np.asarray(stats_a, dtype=np.int64)
    b = np.asarray(stats_b, dtype=np.int64)
    if a.shape != b.shape:
        raise ValueError(f"statistics differ in shape: {a.shape} vs {b.shape}")
    if samples <= 0:
        raise ValueError("samples must be positive")
    n = a.shape[0]
    if n == 0:
        raise ValueError("cannot resample an empty corpus")
    bleu_a = bleu_from_stats(a.sum(axis=0).tolist())[0]
    bleu_b = bleu_from_stats(b.sum(axis=0).tolist())[0]
    b_wins = 0
    for idx in resample_indices(n, samples, seed):
        weights = np.bincount(idx, minlength=n)
        score_a = bleu_from_stats((weights @ a).tolist())[0]
        score_b = bleu_from_stats((weights @ b).tolist())[0]
        # ties count for B
        if score_b >= score_a:
            b_wins += 1
    return SignificanceResult(
        p_value=(b_wins + 1) / (samples + 1),
        samples=samples,
        delta=bleu_a - bleu_b,
        seed=seed,
        bleu_a=bleu_a,
        bleu_b=bleu_b,
        b_at_least_a=b_wins,
    )


def paired_bootstrap(
    hyp_a: Sequence[str],
    hyp_b: Sequence[str],
    references: Sequence[str],
    samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
) -> SignificanceResult:
    """Paired bootstrap test that system A beats system B.

    ``p_value`` is ``(1 + #resamples where BLEU(B) >= BLEU(A)) / (samples + 1)``,
    so identical systems give 1.0 and the smallest attainable value is
    ``1 / (samples + 1)``.
    """
    _check_parallel(hyp_a, hyp_b, references)
    stats_a = [sentence_stats(h, r) for h, r in zip(hyp_a, references)]
    stats_b = [sentence_stats(h, r) for h, r in zip(hyp_b, references)]
    return paired_bootstrap_from_stats(stats_a, stats_b, samples, seed)
