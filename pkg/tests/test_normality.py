import pytest

from dualitylab.nilpotent import Partition
from dualitylab.normality import (NormalityLookupError, load_normality_table,
                                  parse_normality_table)


def test_builtin_table_loads_and_covers_suite_cases():
    table = load_normality_table()
    for family, parts, normal in [
        ("sp", [2, 1, 1, 1, 1], True),
        ("so", [3, 1, 1, 1], True),
        ("sp", [2, 1, 1], True),
        ("sp", [2, 2], False),
        ("so", [3, 1, 1], False),
        ("sp", [4], True),
        ("so", [5], True),
        ("sp", [6], True),
        ("so", [2, 2, 1], True),
    ]:
        entry = table.require(family, Partition.of(parts))
        assert entry.normal is normal
        assert entry.citation


def test_gl_rule_builtin():
    table = load_normality_table()
    entry = table.lookup("gl", Partition.of([5, 3, 1]))
    assert entry is not None and entry.normal


def test_so_families_share_entries():
    table = load_normality_table()
    p = Partition.of([3, 1, 1, 1])
    assert table.require("so-even", p) == table.require("so", p)


def test_missing_entry_raises_with_partition_named():
    table = load_normality_table()
    with pytest.raises(NormalityLookupError, match=r"\[9,1\]"):
        table.require("sp", Partition.of([9, 1]))


def test_parse_rejects_malformed_lines():
    with pytest.raises(ValueError):
        parse_normality_table("sp 2,2 maybe Kraft")
    with pytest.raises(ValueError):
        parse_normality_table("sp 2,2")


def test_parse_custom_table(tmp_path):
    path = tmp_path / "table.txt"
    path.write_text("# comment\nsp 8,2 no some citation text\n")
    table = load_normality_table(str(path))
    entry = table.require("sp", Partition.of([8, 2]))
    assert not entry.normal
    assert entry.citation == "some citation text"
    assert table.lookup("sp", Partition.of([2, 2])) is None
