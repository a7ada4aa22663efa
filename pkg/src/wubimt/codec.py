"""Lossless Chinese <-> Wubi sentence codec.

Sentences are pre-segmented: tokens separated by single spaces. Each token is
encoded according to its class:

* all-Han words become per-character codes joined by ``|`` (``承诺`` ->
  ``bd|yad``);
* a single Chinese punctuation mark becomes its ASCII form (``。`` -> ``.``);
* anything without Han or mapped punctuation passes through verbatim, with a
  ``^`` prefix when the bare token could be mistaken for one of the above.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from types import MappingProxyType
from typing import Mapping

from .errors import (
    DecodeError,
    MalformedSentenceError,
    MixedTokenError,
    TableConflictError,
    TableParseError,
    UnknownCharacterError,
)
from .table import WubiTable, _iter_lines, is_han

SEPARATOR = "|"
ESCAPE = "^"
WUBI_WORD_RE = re.compile(r"[a-y]{1,5}[0-9]*(?:\|[a-y]{1,5}[0-9]*)*")
# Anything decode would route to the Wubi path (and reject if malformed).
_WUBI_LIKE_RE = re.compile(r"[a-y0-9|]*[a-y|][a-y0-9|]*")

STRICT = "strict"
LENIENT = "lenient"


class TokenKind(str, Enum):
    WUBI_WORD = "wubi_word"
    PASSTHROUGH = "passthrough"
    PUNCTUATION = "punctuation"


@dataclass(frozen=True)
class EncodedToken:
    kind: TokenKind
    surface: str


@dataclass
class EncodedText:
    tokens: list[EncodedToken]
    diagnostics: list[str] = field(default_factory=list)

    def render(self) -> str:
        return " ".join(t.surface for t in self.tokens)

    def __str__(self):
        return self.render()


class PunctuationMap:
    """Bijective map between Chinese punctuation marks and short ASCII forms."""

    def __init__(self, pairs: Mapping[str, str]):
        forward = dict(pairs)
        reverse: dict[str, str] = {}
        for mark, form in forward.items():
            if len(mark) != 1 or mark.isascii():
                raise ValueError(f"punctuation mark {mark!r} must be one non-ASCII character")
            if not (1 <= len(form) <= 2) or not form.isascii() or not form.isprintable() or " " in form:
                raise ValueError(f"ASCII form {form!r} for {mark!r} must be 1-2 printable ASCII characters")
            if form.startswith(ESCAPE) or _WUBI_LIKE_RE.fullmatch(form):
                raise ValueError(f"ASCII form {form!r} for {mark!r} clashes with Wubi or escape syntax")
            if form in reverse:
                raise ValueError(f"ASCII form {form!r} claimed by both {reverse[form]!r} and {mark!r}")
            reverse[form] = mark
        self.forward = MappingProxyType(forward)
        self.reverse = MappingProxyType(reverse)

    def __contains__(self, mark):
        return mark in self.forward

    def __len__(self):
        return len(self.forward)

    def __eq__(self, other):
        return isinstance(other, PunctuationMap) and dict(self.forward) == dict(other.forward)

    def __reduce__(self):
        return (PunctuationMap, (dict(self.forward),))


def load_punctuation(source) -> PunctuationMap:
    """Parse a ``<mark>\\t<ascii-form>`` file (same layout as the Wubi table)."""
    pairs: dict[str, str] = {}
    for line_no, line in enumerate(_iter_lines(source), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 2:
            raise TableParseError(line_no, f"expected 2 tab-separated fields, got {len(fields)}")
        mark, form = fields
        if mark in pairs and pairs[mark] != form:
            raise TableConflictError(line_no, mark, pairs[mark], form)
        pairs[mark] = form
    try:
        return PunctuationMap(pairs)
    except ValueError as exc:
        raise TableParseError(0, str(exc)) from None


def read_punctuation(path) -> PunctuationMap:
    with open(path, "rb") as fh:
        return load_punctuation(fh)


def default_punctuation_path():
    return resources.files("wubimt") / "data" / "punct.tsv"


def default_punctuation() -> PunctuationMap:
    with default_punctuation_path().open("rb") as fh:
        return load_punctuation(fh)


def normalize_punctuation(mark: str, punct: PunctuationMap) -> str:
    # unmapped marks pass through unchanged
    return punct.forward.get(mark, mark)


def denormalize_punctuation(form: str, punct: PunctuationMap) -> str:
    return punct.reverse.get(form, form)


def encode_char(ch: str, table: WubiTable, position: int | None = None) -> str:
    try:
        return table.forward[ch]
    except KeyError:
        raise UnknownCharacterError(ch, position) from None


def encode_word(word: str, table: WubiTable, offset: int = 0) -> EncodedToken:
    codes = [encode_char(ch, table, offset + i) for i, ch in enumerate(word)]
    return EncodedToken(TokenKind.WUBI_WORD, SEPARATOR.join(codes))


def needs_escape(token: str, punct: PunctuationMap) -> bool:
    """True if a bare passthrough ``token`` would not decode to itself."""
    return (
        token.startswith(ESCAPE)
        or token in punct.reverse
        or _WUBI_LIKE_RE.fullmatch(token) is not None
    )


def _passthrough(token: str, punct: PunctuationMap, escape: bool) -> EncodedToken:
    if escape and needs_escape(token, punct):
        token = ESCAPE + token
    return EncodedToken(TokenKind.PASSTHROUGH, token)


def _char_class(ch: str, table: WubiTable, punct: PunctuationMap) -> str:
    if is_han(ch):
        return "han" if ch in table.forward else "unknown"
    if ch in punct.forward:
        return "punct"
    return "other"


def _runs(token, table, punct):
    """Split into maximal same-class runs; punctuation marks stay single."""
    runs: list[tuple[str, int, str]] = []
    for i, ch in enumerate(token):
        cls = _char_class(ch, table, punct)
        if runs and runs[-1][0] == cls and cls != "punct":
            kind, start, text = runs[-1]
            runs[-1] = (kind, start, text + ch)
        else:
            runs.append((cls, i, ch))
    return runs


def _split_sentence(sentence: str, mode: str):
    """Yield ``(token, offset)`` pairs."""
    if mode == STRICT:
        if sentence == "":
            return
        offset = 0
        for tok in sentence.split(" "):
            if tok == "" or any(c.isspace() for c in tok):
                raise MalformedSentenceError(
                    f"tokens must be separated by single spaces (near position {offset}): {sentence!r}"
                )
            yield tok, offset
            offset += len(tok) + 1
    else:
        for m in re.finditer(r"\S+", sentence):
            yield m.group(), m.start()


def encode_sentence(
    sentence: str,
    table: WubiTable,
    punct: PunctuationMap,
    mode: str = STRICT,
    escape: bool = True,
) -> EncodedText:
    """Encode one segmented sentence.

    In ``strict`` mode unknown characters, mixed-script tokens and irregular
    whitespace raise. In ``lenient`` mode such tokens are split into runs,
    unknown characters are kept verbatim, and a note is appended to
    ``diagnostics``. ``escape=False`` drops the ``^`` prefix on passthrough
    tokens; the output is then no longer guaranteed to decode.
    """
    if mode not in (STRICT, LENIENT):
        raise ValueError(f"unknown mode {mode!r}")
    out: list[EncodedToken] = []
    notes: list[str] = []
    for tok, offset in _split_sentence(sentence, mode):
        runs = _runs(tok, table, punct)
        if len(runs) == 1:
            cls = runs[0][0]
            if cls == "han":
                out.append(encode_word(tok, table, offset))
                continue
            if cls == "punct":
                out.append(EncodedToken(TokenKind.PUNCTUATION, punct.forward[tok]))
                continue
            if cls == "other":
                out.append(_passthrough(tok, punct, escape))
                continue
        if mode == STRICT:
            for cls, start, text in runs:
                if cls == "unknown":
                    raise UnknownCharacterError(text[0], offset + start)
            raise MixedTokenError(tok, offset)

        for cls, start, text in runs:
            if cls == "han":
                out.append(encode_word(text, table, offset + start))
            elif cls == "punct":
                out.append(EncodedToken(TokenKind.PUNCTUATION, punct.forward[text]))
            elif cls == "other":
                out.append(_passthrough(text, punct, escape))
            else:
                notes.append(f"unencodable {text!r} at position {offset + start}")
                out.append(EncodedToken(TokenKind.PASSTHROUGH, text))
        if len(runs) > 1:
            notes.append(f"split mixed token {tok!r} at position {offset}")
    return EncodedText(out, notes)


def _decode_token(tok: str, table: WubiTable, punct: PunctuationMap) -> str:
    if tok.startswith(ESCAPE):
        return tok[len(ESCAPE):]
    if tok in punct.reverse:
        return punct.reverse[tok]
    if _WUBI_LIKE_RE.fullmatch(tok) is None:
        return tok
    if WUBI_WORD_RE.fullmatch(tok) is None:
        raise DecodeError(tok, message=f"malformed Wubi token {tok!r}")
    chars = []
    for code in tok.split(SEPARATOR):
        try:
            chars.append(table.reverse[code])
        except KeyError:
            raise DecodeError(tok, code) from None
    return "".join(chars)


def decode_sentence(
    encoded: str,
    table: WubiTable,
    punct: PunctuationMap,
    mode: str = STRICT,
) -> str:
    """Invert :func:`encode_sentence`.

    ``lenient`` mode leaves undecodable tokens unchanged instead of raising,
    which is what scoring ill-formed system output needs.
    """
    if encoded == "":
        return ""
    out = []
    for tok in encoded.split(" "):
        try:
            out.append(_decode_token(tok, table, punct))
        except DecodeError:
            if mode == STRICT:
                raise
            out.append(tok)
    return " ".join(out)


class Codec:
    """Bundles a table, punctuation map and mode for line-at-a-time use."""

    def __init__(self, table: WubiTable, punct: PunctuationMap, mode: str = STRICT):
        self.table = table
        self.punct = punct
        self.mode = mode

    def encode(self, sentence: str) -> str:
        return encode_sentence(sentence, self.table, self.punct, self.mode).render()

    def decode(self, encoded: str) -> str:
        return decode_sentence(encoded, self.table, self.punct, self.mode)
