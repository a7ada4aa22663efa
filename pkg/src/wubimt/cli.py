"""Command-line entry point: ``wubimt <subcommand> ...``.

Every subcommand reads one sentence per line (stdin or a file) and writes data
to stdout; diagnostics go to stderr. Common options can also be given through
``WUBIMT_<OPTION>`` environment variables (``WUBIMT_TABLE``, ``WUBIMT_PUNCT``,
``WUBIMT_MODE``, ``WUBIMT_LEXICON``, ``WUBIMT_THREADS``, ``WUBIMT_SEED``);
command-line flags win.

Exit status: 0 success, 1 data or validation error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from contextlib import contextmanager
from dataclasses import asdict

from . import codec as codec_mod
from .codec import LENIENT, STRICT, Codec
from .errors import WubiError
from .metrics import (
    DEFAULT_BIN_WIDTH,
    DEFAULT_SAMPLES,
    corpus_stats,
    format_bins,
    normalize_line,
    output_length_stats,
    paired_bootstrap_from_stats,
    report_from_stats,
    sentence_stats,
)
from .parallel import ordered_map
from .segmenter import Lexicon, read_lexicon, segment
from .subword import (
    BPE_CAP,
    WORD_CAP,
    apply_vocab,
    bpe_apply,
    bpe_learn_counts,
    bpe_undo,
    from_characters,
    load_bpe,
    load_vocab,
    to_characters,
    vocab_from_counts,
    word_counts,
)
from .table import default_table_path, read_table, validate

ENV_PREFIX = "WUBIMT_"

log = logging.getLogger("wubimt")


class DataError(Exception):
    """Aborts a subcommand with exit status 1."""


def _env(name, default=None):
    return os.environ.get(ENV_PREFIX + name.upper(), default)


# --- line jobs (module level so they pickle) ---------------------------------


class EncodeJob:
    def __init__(self, codec: Codec, lexicon: Lexicon | None = None):
        self.codec = codec
        self.lexicon = lexicon

    def __call__(self, line):
        if self.lexicon is not None:
            line = segment(line, self.lexicon)
        enc = codec_mod.encode_sentence(line, self.codec.table, self.codec.punct, self.codec.mode)
        return enc.render(), enc.diagnostics


class DecodeJob:
    def __init__(self, codec: Codec):
        self.codec = codec

    def __call__(self, line):
        return self.codec.decode(line)


class RoundTripJob:
    def __init__(self, codec: Codec):
        self.codec = codec

    def __call__(self, line):
        return self.codec.decode(self.codec.encode(line)) == line


class SegmentJob:
    def __init__(self, lexicon: Lexicon):
        self.lexicon = lexicon

    def __call__(self, line):
        return segment(line, self.lexicon)


class BpeJob:
    def __init__(self, model=None):
        self.model = model

    def __call__(self, line):
        if self.model is None:
            return bpe_undo(line)
        return bpe_apply(line, self.model)


class CharsJob:
    def __init__(self, inverse=False):
        self.inverse = inverse

    def __call__(self, line):
        return from_characters(line) if self.inverse else to_characters(line)


class VocabApplyJob:
    def __init__(self, vocab):
        self.vocab = vocab

    def __call__(self, line):
        return apply_vocab(line, self.vocab)


class StatsJob:
    """Sufficient BLEU statistics for a ``(hyp, ref)`` pair, optionally after
    mapping Chinese lines into Wubi."""

    def __init__(self, codec: Codec | None = None):
        self.codec = codec

    def __call__(self, pair):
        hyp, ref = pair
        notes = []
        if self.codec is not None:
            hyp, n1 = normalize_line(hyp, self.codec.table, self.codec.punct)
            ref, n2 = normalize_line(ref, self.codec.table, self.codec.punct)
            notes = [f"hyp: {n}" for n in n1] + [f"ref: {n}" for n in n2]
        return sentence_stats(hyp, ref), notes


# --- I/O helpers -------------------------------------------------------------


def _strip(line):
    return line.rstrip("\n").rstrip("\r")


@contextmanager
def _open_in(path):
    if path in (None, "-"):
        if hasattr(sys.stdin, "reconfigure"):
            sys.stdin.reconfigure(encoding="utf-8")
        yield sys.stdin
        return
    try:
        fh = open(path, encoding="utf-8", newline="\n")
    except OSError as exc:
        raise DataError(f"{path}: {exc.strerror}") from None
    with fh:
        yield fh


@contextmanager
def _open_out(path):
    if path in (None, "-"):
        if hasattr(sys.stdout, "reconfigure"):
            sys.stdout.reconfigure(encoding="utf-8")
        yield sys.stdout
        sys.stdout.flush()
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        yield fh


def _read_lines(path):
    with _open_in(path) as fh:
        return [_strip(line) for line in fh]


def _name(path):
    return "<stdin>" if path in (None, "-") else path


def _run_lines(args, job, items, out, name, strict):
    """Stream ``items`` through ``job``; write each result line to ``out``."""
    errors = 0
    for line_no, res in enumerate(ordered_map(job, items, args.threads), start=1):
        for note in res.notes:
            log.warning("%s:%d: %s", name, line_no, note)
        if res.error is not None:
            if strict:
                raise DataError(f"{name}:{line_no}: {res.error}")
            errors += 1
            log.warning("%s:%d: %s", name, line_no, res.error)
            continue
        out.write(f"{res.value}\n")
    return errors


def _codec(args) -> Codec:
    try:
        table = read_table(args.table)
        punct = codec_mod.read_punctuation(args.punct)
    except OSError as exc:
        raise DataError(f"{exc.filename}: {exc.strerror}") from None
    except WubiError as exc:
        raise DataError(str(exc)) from None
    report = validate(table)
    if report:
        raise DataError("table failed validation:\n" + "\n".join(report.lines()))
    return Codec(table, punct, args.mode)


def _lexicon(path) -> Lexicon:
    try:
        return read_lexicon(path)
    except OSError as exc:
        raise DataError(f"{path}: {exc.strerror}") from None
    except WubiError as exc:
        raise DataError(f"{path}: {exc}") from None


def _lines_iter(path):
    with _open_in(path) as fh:
        for line in fh:
            yield _strip(line)


# --- subcommands -------------------------------------------------------------


def cmd_encode(args):
    codec = _codec(args)
    lexicon = _lexicon(args.segment) if args.segment else None
    with _open_out(args.output) as out:
        _run_lines(args, EncodeJob(codec, lexicon), _lines_iter(args.input), out,
                   _name(args.input), args.mode == STRICT)
    return 0


def cmd_decode(args):
    codec = _codec(args)
    with _open_out(args.output) as out:
        _run_lines(args, DecodeJob(codec), _lines_iter(args.input), out,
                   _name(args.input), args.mode == STRICT)
    return 0


def cmd_roundtrip(args):
    codec = _codec(args)
    name = _name(args.input)
    mismatches = failures = total = 0
    for line_no, res in enumerate(ordered_map(RoundTripJob(codec), _lines_iter(args.input), args.threads), 1):
        total += 1
        if res.error is not None:
            failures += 1
            log.warning("%s:%d: %s", name, line_no, res.error)
        elif not res.value:
            mismatches += 1
            log.warning("%s:%d: round trip differs", name, line_no)
    with _open_out(args.output) as out:
        out.write(f"{total} lines, {mismatches} mismatches, {failures} errors\n")
    return 0 if mismatches == 0 and failures == 0 else 1


def cmd_segment(args):
    lexicon = _lexicon(args.lexicon)
    with _open_out(args.output) as out:
        _run_lines(args, SegmentJob(lexicon), _lines_iter(args.input), out, _name(args.input), True)
    return 0


def cmd_vocab(args):
    if args.apply:
        with _open_in(args.apply) as fh:
            vocab = load_vocab(fh)
        with _open_out(args.output) as out:
            _run_lines(args, VocabApplyJob(vocab), _lines_iter(args.input), out, _name(args.input), True)
        return 0
    vocab = vocab_from_counts(word_counts(_lines_iter(args.input)), args.cap)
    with _open_out(args.output) as out:
        vocab.dump(out)
    log.info("vocabulary %d/%d entries, coverage %.4f%%", len(vocab), args.cap, 100 * vocab.coverage)
    return 0


def cmd_bpe_learn(args):
    model = bpe_learn_counts(word_counts(_lines_iter(args.input)), args.bpe_size)
    with _open_out(args.output) as out:
        model.dump(out)
    log.info("learned %d merges, %d symbols", len(model.merges), len(model.vocab))
    return 0


def cmd_bpe_apply(args):
    if args.undo:
        job = BpeJob(None)
    else:
        if not args.merges:
            raise DataError("bpe-apply needs --merges (or --undo)")
        with _open_in(args.merges) as fh:
            try:
                job = BpeJob(load_bpe(fh))
            except (ValueError, KeyError) as exc:
                raise DataError(f"{args.merges}: {exc}") from None
    with _open_out(args.output) as out:
        _run_lines(args, job, _lines_iter(args.input), out, _name(args.input), True)
    return 0


def cmd_chars(args):
    with _open_out(args.output) as out:
        _run_lines(args, CharsJob(args.inverse), _lines_iter(args.input), out, _name(args.input), True)
    return 0


def cmd_stats(args):
    lines = _read_lines(args.input)
    try:
        if args.lengths:
            mean, std = output_length_stats(lines)
            result = {"word_count": [mean, std], "sentence_count": len(lines)}
        else:
            result = asdict(corpus_stats(lines))
    except ValueError as exc:
        raise DataError(f"{_name(args.input)}: {exc}") from None
    with _open_out(args.output) as out:
        if args.json:
            out.write(json.dumps(result) + "\n")
        else:
            for key, value in result.items():
                if isinstance(value, (list, tuple)):
                    out.write(f"{key}\t{value[0]:.4f}\t{value[1]:.4f}\n")
                else:
                    out.write(f"{key}\t{value}\n")
    return 0


def _bleu_stats(args, hyp_path):
    hyps = _read_lines(hyp_path)
    refs = _read_lines(args.ref)
    if len(hyps) != len(refs):
        raise DataError(f"{hyp_path} has {len(hyps)} lines but {args.ref} has {len(refs)}")
    job = StatsJob(_codec(args) if args.normalize_cn else None)
    stats = []
    for line_no, res in enumerate(ordered_map(job, zip(hyps, refs), args.threads), 1):
        for note in res.notes:
            log.warning("%s:%d: %s", _name(hyp_path), line_no, note)
        stats.append(res.value)
    return stats, refs


def _source_lengths(args, refs):
    if args.source:
        src = _read_lines(args.source)
        if len(src) != len(refs):
            raise DataError(f"{args.source} has {len(src)} lines but {args.ref} has {len(refs)}")
        return [len(s.split()) for s in src]
    return [len(r.split()) for r in refs]


def _write_report(path, payload):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def cmd_bleu(args):
    stats, refs = _bleu_stats(args, args.hyp)
    try:
        report = report_from_stats(stats, _source_lengths(args, refs), args.bin_width)
    except ValueError as exc:
        raise DataError(str(exc)) from None
    payload = report.to_dict()
    if args.report:
        _write_report(args.report, payload)
    with _open_out(args.output) as out:
        out.write((json.dumps(payload, sort_keys=True) if args.json else report.summary()) + "\n")
    return 0


def cmd_binned_bleu(args):
    stats, refs = _bleu_stats(args, args.hyp)
    try:
        report = report_from_stats(stats, _source_lengths(args, refs), args.bin_width)
    except ValueError as exc:
        raise DataError(str(exc)) from None
    with _open_out(args.output) as out:
        out.write(format_bins(report.bins))
    return 0


def cmd_bootstrap(args):
    stats_a, _ = _bleu_stats(args, args.hyp_a)
    stats_b, _ = _bleu_stats(args, args.hyp_b)
    try:
        result = paired_bootstrap_from_stats(stats_a, stats_b, args.samples, args.seed)
    except ValueError as exc:
        raise DataError(str(exc)) from None
    payload = result.to_dict()
    if args.report:
        _write_report(args.report, payload)
    with _open_out(args.output) as out:
        if args.json:
            out.write(json.dumps(payload, sort_keys=True) + "\n")
        else:
            out.write(
                f"BLEU(A) = {result.bleu_a:.2f}  BLEU(B) = {result.bleu_b:.2f}  "
                f"delta = {result.delta:.2f}  p = {result.p_value:.4f}  "
                f"(samples = {result.samples}, seed = {result.seed})\n"
            )
    return 0


# --- argument parsing --------------------------------------------------------


def _positive(text):
    value = int(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _non_negative(text):
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--table", default=_env("table", str(default_table_path())),
                        help="Wubi table TSV (default: bundled fixture table)")
    common.add_argument("--punct", default=_env("punct", str(codec_mod.default_punctuation_path())),
                        help="punctuation map TSV (default: bundled map)")
    common.add_argument("--mode", choices=(STRICT, LENIENT), default=_env("mode", STRICT))
    common.add_argument("--threads", "-j", type=_positive, default=int(_env("threads", "1")),
                        help="worker processes; output order never depends on it")
    common.add_argument("--output", "-o", default="-")
    common.add_argument("--quiet", "-q", action="store_true", help="suppress diagnostics")

    parser = argparse.ArgumentParser(prog="wubimt", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, func, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(func=func)
        return p

    p = add("encode", cmd_encode, "segmented Chinese -> Wubi")
    p.add_argument("input", nargs="?")
    seg = p.add_mutually_exclusive_group()
    seg.add_argument("--pre-segmented", dest="segment", action="store_const", const=None,
                     help="input is already space-segmented (default)")
    seg.add_argument("--segment", metavar="LEXICON", default=_env("lexicon"),
                     help="segment raw input with forward maximum matching first")

    p = add("decode", cmd_decode, "Wubi -> segmented Chinese")
    p.add_argument("input", nargs="?")

    p = add("roundtrip-check", cmd_roundtrip, "count lines where decode(encode(x)) != x")
    p.add_argument("input", nargs="?")

    p = add("segment", cmd_segment, "forward maximum matching segmentation")
    p.add_argument("input", nargs="?")
    p.add_argument("--lexicon", required=_env("lexicon") is None, default=_env("lexicon"))

    p = add("vocab", cmd_vocab, "build a capped vocabulary, or apply one (--apply)")
    p.add_argument("input", nargs="?")
    p.add_argument("--cap", type=_positive, default=WORD_CAP)
    p.add_argument("--apply", metavar="VOCAB", help="replace tokens outside VOCAB with <unk>")

    p = add("bpe-learn", cmd_bpe_learn, "learn BPE merges")
    p.add_argument("input", nargs="?")
    p.add_argument("--bpe-size", type=_positive, default=BPE_CAP, help="symbol inventory cap")

    p = add("bpe-apply", cmd_bpe_apply, "split words into BPE subwords (or --undo)")
    p.add_argument("input", nargs="?")
    p.add_argument("--merges")
    p.add_argument("--undo", action="store_true")

    p = add("chars", cmd_chars, "character-level tokens (or --inverse)")
    p.add_argument("input", nargs="?")
    p.add_argument("--inverse", action="store_true")

    p = add("stats", cmd_stats, "words/sentence, chars/word, chars/sentence")
    p.add_argument("input", nargs="?")
    p.add_argument("--lengths", action="store_true", help="only output word-count mean/std")
    p.add_argument("--json", action="store_true")

    def add_scoring(p):
        p.add_argument("--ref", required=True)
        p.add_argument("--normalize-cn", action="store_true",
                       help="encode Chinese hypothesis/reference lines to Wubi before scoring")
        p.add_argument("--source", help="source side, for length binning (default: reference)")
        p.add_argument("--bin-width", type=_positive, default=DEFAULT_BIN_WIDTH)
        p.add_argument("--report", help="write a JSON report here")
        p.add_argument("--json", action="store_true")

    p = add("bleu", cmd_bleu, "corpus BLEU")
    p.add_argument("hyp")
    add_scoring(p)

    p = add("binned-bleu", cmd_binned_bleu, "mean sentence BLEU by source length")
    p.add_argument("hyp")
    add_scoring(p)

    p = add("bootstrap", cmd_bootstrap, "paired bootstrap significance of A over B")
    p.add_argument("hyp_a")
    p.add_argument("hyp_b")
    add_scoring(p)
    p.add_argument("--samples", type=_positive, default=DEFAULT_SAMPLES)
    p.add_argument("--seed", type=_non_negative, default=int(_env("seed", "0")))
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("wubimt: %(message)s"))
    log.handlers[:] = [handler]
    log.setLevel(logging.ERROR if args.quiet else logging.INFO)
    log.propagate = False
    try:
        return args.func(args)
    except DataError as exc:
        log.error("error: %s", exc)
        return 1
    except BrokenPipeError:
        return 0


if __name__ == "__main__":
    sys.exit(main())
