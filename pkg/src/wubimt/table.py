"""Wubi character table: parsing, collision disambiguation and validation.

A raw table maps each Chinese character to its base Wubi code (1-5 letters
from ``a``-``y``). Several characters can share a base code; those groups are
made unique by appending a decimal suffix to *every* member, in ascending
codepoint order, so that the final mapping is a bijection.
"""

from __future__ import annotations

import io
import re
from dataclasses import dataclass, field
from importlib import resources
from types import MappingProxyType
from typing import Iterable, Mapping

from .errors import TableConflictError, TableParseError

WUBI_KEYS = frozenset("abcdefghijklmnopqrstuvwxy")
BASE_CODE_RE = re.compile(r"[a-y]{1,5}")
FINAL_CODE_RE = re.compile(r"([a-y]{1,5})(0|[1-9][0-9]*)?")

# Han ideograph blocks (unified, extensions A-H, compatibility) plus U+3007.
_HAN_RANGES = (
    (0x3007, 0x3007),
    (0x3400, 0x4DBF),
    (0x4E00, 0x9FFF),
    (0xF900, 0xFAFF),
    (0x20000, 0x2A6DF),
    (0x2A700, 0x2EBEF),
    (0x2F800, 0x2FA1F),
    (0x30000, 0x323AF),
)


def is_han(ch: str) -> bool:
    cp = ord(ch)
    for lo, hi in _HAN_RANGES:
        if lo <= cp <= hi:
            return True
    return False


@dataclass(frozen=True)
class RawTableEntry:
    character: str
    base_code: str


def split_code(code: str) -> tuple[str, str]:
    """Split a final code into ``(base, suffix)``; suffix is ``''`` if bare.

    Raises ValueError if ``code`` is not a well-formed final code.
    """
    m = FINAL_CODE_RE.fullmatch(code)
    if m is None:
        raise ValueError(f"not a Wubi code: {code!r}")
    return m.group(1), m.group(2) or ""


@dataclass(frozen=True)
class WubiTable:
    forward: Mapping[str, str]
    reverse: Mapping[str, str]
    collision_groups: Mapping[str, tuple[str, ...]] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "forward", MappingProxyType(dict(self.forward)))
        object.__setattr__(self, "reverse", MappingProxyType(dict(self.reverse)))
        groups = {k: tuple(v) for k, v in self.collision_groups.items()}
        object.__setattr__(self, "collision_groups", MappingProxyType(groups))

    def __len__(self):
        return len(self.forward)

    def __contains__(self, ch):
        return ch in self.forward

    @classmethod
    def from_entries(cls, entries: Iterable[RawTableEntry]) -> "WubiTable":
        return disambiguate(entries)


def _iter_lines(source):
    if isinstance(source, (bytes, bytearray)):
        source = io.BytesIO(source)
    for raw in source:
        if isinstance(raw, bytes):
            raw = raw.decode("utf-8")
        yield raw.rstrip("\n").rstrip("\r")


def load_table(source) -> list[RawTableEntry]:
    """Parse a ``<char>\\t<code>`` table from a binary or text stream.

    Blank lines and lines starting with ``#`` are skipped. Exact duplicate
    lines collapse; a character listed with two different codes raises
    :class:`TableConflictError`.
    """
    entries: list[RawTableEntry] = []
    seen: dict[str, tuple[str, int]] = {}
    for line_no, line in enumerate(_iter_lines(source), start=1):
        if not line.strip() or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 2:
            raise TableParseError(line_no, f"expected 2 tab-separated fields, got {len(fields)}")
        ch, code = fields
        if len(ch) != 1:
            raise TableParseError(line_no, f"character field {ch!r} is not a single character")
        if not is_han(ch):
            raise TableParseError(line_no, f"{ch!r} (U+{ord(ch):04X}) is not a CJK ideograph")
        if BASE_CODE_RE.fullmatch(code) is None:
            raise TableParseError(line_no, f"invalid Wubi code {code!r}")
        if ch in seen:
            prev_code, _ = seen[ch]
            if prev_code != code:
                raise TableConflictError(line_no, ch, prev_code, code)
            continue
        seen[ch] = (code, line_no)
        entries.append(RawTableEntry(ch, code))
    return entries


def disambiguate(entries: Iterable[RawTableEntry]) -> WubiTable:
    by_code: dict[str, set[str]] = {}
    for e in entries:
        by_code.setdefault(e.base_code, set()).add(e.character)

    forward: dict[str, str] = {}
    groups: dict[str, tuple[str, ...]] = {}
    for code in sorted(by_code):
        chars = sorted(by_code[code], key=ord)
        if len(chars) == 1:
            forward[chars[0]] = code
            continue
        groups[code] = tuple(chars)
        for i, ch in enumerate(chars):
            forward[ch] = f"{code}{i}"

    forward = dict(sorted(forward.items(), key=lambda kv: ord(kv[0])))
    reverse = {code: ch for ch, code in forward.items()}
    return WubiTable(forward, reverse, groups)


@dataclass
class ValidationReport:
    injectivity: list[str] = field(default_factory=list)
    suffix_rule: list[str] = field(default_factory=list)
    alphabet: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not (self.injectivity or self.suffix_rule or self.alphabet)

    def __bool__(self):
        # truthy when there is something to report
        return not self.ok

    def lines(self):
        for kind in ("injectivity", "suffix_rule", "alphabet"):
            for msg in getattr(self, kind):
                yield f"{kind}: {msg}"


def validate(table: WubiTable) -> ValidationReport:
    report = ValidationReport()

    owners: dict[str, list[str]] = {}
    for ch, code in table.forward.items():
        owners.setdefault(code, []).append(ch)
    for code, chars in sorted(owners.items()):
        if len(chars) > 1:
            report.injectivity.append(f"code {code!r} assigned to {''.join(chars)!r}")
    for ch, code in table.forward.items():
        if table.reverse.get(code) != ch and len(owners[code]) == 1:
            report.injectivity.append(f"reverse[{code!r}] does not map back to {ch!r}")
    for code, ch in table.reverse.items():
        if table.forward.get(ch) != code:
            report.injectivity.append(f"reverse entry {code!r}->{ch!r} has no forward counterpart")

    bases: dict[str, list[str]] = {}
    for ch, code in table.forward.items():
        if len(ch) != 1 or not is_han(ch):
            report.alphabet.append(f"{ch!r} is not a single CJK ideograph")
        try:
            base, suffix = split_code(code)
        except ValueError:
            report.alphabet.append(f"code {code!r} for {ch!r} is outside the Wubi alphabet")
            continue
        bases.setdefault(base, []).append(suffix)

    for base, suffixes in sorted(bases.items()):
        bare = suffixes.count("")
        numbered = sorted(int(s) for s in suffixes if s)
        if numbered:
            if bare:
                report.suffix_rule.append(f"bare {base!r} coexists with suffixed codes")
            if len(numbered) < 2:
                report.suffix_rule.append(f"{base!r} is suffixed but has no collision partner")
            elif numbered != list(range(len(numbered))):
                report.suffix_rule.append(f"{base!r} suffixes {numbered} are not 0..{len(numbered) - 1}")

    for base, chars in sorted(table.collision_groups.items()):
        expected = [f"{base}{i}" for i in range(len(chars))]
        actual = [table.forward.get(ch) for ch in chars]
        if actual != expected:
            report.suffix_rule.append(f"collision group {base!r} assigned {actual}, expected {expected}")
    return report


def read_table(path) -> WubiTable:
    with open(path, "rb") as fh:
        return disambiguate(load_table(fh))


def default_table_path():
    return resources.files("wubimt") / "data" / "wubi_fixture.tsv"


def default_table() -> WubiTable:
    with default_table_path().open("rb") as fh:
        return disambiguate(load_table(fh))
