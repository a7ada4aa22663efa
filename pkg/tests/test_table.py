import io

import pytest
from hypothesis import given, strategies as st

from wubimt.errors import TableConflictError, TableParseError
from wubimt.table import (
    RawTableEntry,
    WubiTable,
    disambiguate,
    load_table,
    split_code,
    validate,
)


def parse(text):
    return load_table(io.BytesIO(text.encode("utf-8")))


def test_load_single_lines():
    assert parse("设\tymc\n") == [RawTableEntry("设", "ymc")]
    assert parse("哈\tkwgk\n") == [RawTableEntry("哈", "kwgk")]


def test_load_empty_stream():
    assert parse("") == []


def test_comments_blank_lines_and_duplicates():
    entries = parse("# header\n\n设\tymc\n设\tymc\n哈\tkwgk\r\n")
    assert entries == [RawTableEntry("设", "ymc"), RawTableEntry("哈", "kwgk")]


def test_text_stream_accepted():
    assert load_table(io.StringIO("设\tymc\n")) == [RawTableEntry("设", "ymc")]


@pytest.mark.parametrize(
    "line",
    [
        "设 ymc",          # no tab
        "设\tymc\textra",
        "设计\tymc",       # two characters
        "a\tymc",          # not CJK
        "设\tymcz",        # z is not a Wubi key
        "设\tymcaaa",      # six letters
        "设\tYMC",
        "设\tym1",         # digits never appear in base codes
        "设\t",
    ],
)
def test_malformed_lines(line):
    with pytest.raises(TableParseError) as exc:
        parse("# ok\n" + line + "\n")
    assert exc.value.line_no == 2


def test_bom_is_rejected():
    with pytest.raises(TableParseError):
        load_table(b"\xef\xbb\xbf\xe8\xae\xbe\tymc\n")


def test_conflicting_codes():
    with pytest.raises(TableConflictError) as exc:
        parse("设\tymc\n设\tymd\n")
    assert exc.value.line_no == 2
    assert exc.value.character == "设"


def test_unique_codes_pass_through():
    entries = [RawTableEntry("设", "ymc"), RawTableEntry("哈", "kwgk")]
    t = disambiguate(entries)
    assert dict(t.forward) == {"设": "ymc", "哈": "kwgk"}
    assert dict(t.collision_groups) == {}


def test_collision_suffix_by_codepoint():
    # 编 U+7F16 < 缗 U+7F17
    t = disambiguate([RawTableEntry("缗", "xyna"), RawTableEntry("编", "xyna")])
    assert t.forward["编"] == "xyna0"
    assert t.forward["缗"] == "xyna1"
    assert "xyna" not in t.reverse
    assert t.collision_groups["xyna"] == ("编", "缗")


def test_more_than_ten_collisions():
    chars = [chr(0x4E00 + i) for i in range(12)]
    t = disambiguate([RawTableEntry(c, "aa") for c in chars])
    assert [t.forward[c] for c in chars] == [f"aa{i}" for i in range(12)]
    assert validate(t).ok


def test_fixture_table_suffixes(table):
    assert table.forward["编"] == "xyna0"
    assert table.forward["问"] == "ukd0"
    assert table.forward["题"] == "jghm1"
    assert table.forward["正"] == "ghd0"
    assert table.forward["额"] == "ptkm0"
    assert validate(table).ok


def test_split_code():
    assert split_code("ymc") == ("ymc", "")
    assert split_code("jghm1") == ("jghm", "1")
    assert split_code("aa10") == ("aa", "10")
    with pytest.raises(ValueError):
        split_code("aa01")


def test_validate_injectivity_violation():
    t = WubiTable({"一": "sk", "二": "sk"}, {"sk": "二"})
    report = validate(t)
    assert report.injectivity
    assert any("'sk'" in msg for msg in report.injectivity)


def test_validate_lonely_suffix():
    t = WubiTable({"一": "sk0"}, {"sk0": "一"})
    report = validate(t)
    assert report.suffix_rule and not report.injectivity


def test_validate_bare_and_suffixed_mix():
    t = WubiTable({"一": "sk", "二": "sk0", "三": "sk1"}, {"sk": "一", "sk0": "二", "sk1": "三"})
    assert validate(t).suffix_rule


def test_validate_suffix_gap():
    t = WubiTable({"一": "sk0", "二": "sk2"}, {"sk0": "一", "sk2": "二"})
    assert validate(t).suffix_rule


def test_validate_alphabet():
    t = WubiTable({"一": "SK", "a": "ab"}, {"SK": "一", "ab": "a"})
    report = validate(t)
    assert len(report.alphabet) == 2


def test_table_is_immutable(table):
    with pytest.raises(TypeError):
        table.forward["新"] = "u"


# --- properties ---------------------------------------------------------------

han = st.integers(0x4E00, 0x9FFF).map(chr)
code = st.text(alphabet="abcdefghijklmnopqrstuvwxy", min_size=1, max_size=2)
entries_st = st.dictionaries(han, code, max_size=60).map(
    lambda d: [RawTableEntry(c, k) for c, k in d.items()]
)


@given(entries_st)
def test_disambiguate_properties(entries):
    t = disambiguate(entries)
    assert validate(t).ok
    assert len(t.forward) == len(t.reverse) == len(entries)
    for ch, final in t.forward.items():
        assert t.reverse[final] == ch
    bare = {c for c in t.reverse if split_code(c)[1] == ""}
    suffixed = {c for c in t.reverse if split_code(c)[1] != ""}
    assert not bare & suffixed
    for base, group in t.collision_groups.items():
        assert sorted(split_code(t.forward[c])[1] for c in group) == sorted(str(i) for i in range(len(group)))


@given(entries_st, st.randoms())
def test_disambiguate_order_independent(entries, rnd):
    shuffled = list(entries)
    rnd.shuffle(shuffled)
    assert disambiguate(shuffled) == disambiguate(entries)
