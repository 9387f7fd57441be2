"""Orbit-closure normality lookup table.

Normality of a nilpotent orbit closure is one hypothesis of the
verified centralizer theorems.  There is no algorithm in this package
for it: the facts are data, shipped as a plain-text table with
literature citations and editable by the user.  Every scenario report
echoes the entry it relied on.

File format, one record per line (blank lines and ``#`` comments ok):

    <family> <partition-as-comma-list> <yes|no> <citation ...>

``family`` is the base family ``so``/``sp``/``gl`` (the orthogonal
entry covers both odd and even dimensions; the partition determines n).
General-linear orbit closures are all normal; that rule is built in and
gl entries are optional.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Dict, Optional, Tuple

from .nilpotent import Partition

GL_CITATION = "all nilpotent orbit closures in gl_n are normal (Kraft-Procesi 1979)"


class NormalityLookupError(Exception):
    """No table entry for the requested (family, partition)."""


@dataclass(frozen=True)
class NormalityEntry:
    family: str
    partition: Tuple[int, ...]
    normal: bool
    citation: str


class NormalityTable:
    def __init__(self, entries: Dict[Tuple[str, Tuple[int, ...]], NormalityEntry],
                 source: str):
        self.entries = entries
        self.source = source

    @staticmethod
    def _base_family(family: str) -> str:
        if family in ("so-odd", "so-even", "so"):
            return "so"
        if family in ("sp", "gl"):
            return family
        raise ValueError(f"unknown family {family!r}")

    def lookup(self, family: str, partition: Partition) -> Optional[NormalityEntry]:
        base = self._base_family(family)
        if base == "gl":
            return NormalityEntry("gl", partition.parts, True, GL_CITATION)
        return self.entries.get((base, partition.parts))

    def require(self, family: str, partition: Partition) -> NormalityEntry:
        entry = self.lookup(family, partition)
        if entry is None:
            raise NormalityLookupError(
                f"no normality entry for family {self._base_family(family)!r}, "
                f"partition {partition}; add one to the table ({self.source})")
        return entry


def parse_normality_table(text: str, source: str = "<string>") -> NormalityTable:
    entries: Dict[Tuple[str, Tuple[int, ...]], NormalityEntry] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split(None, 3)
        if len(fields) < 4:
            raise ValueError(f"{source}:{lineno}: expected "
                             f"'family partition yes|no citation', got {raw!r}")
        family, partition_text, flag, citation = fields
        family = NormalityTable._base_family(family)
        parts = Partition.of([int(x) for x in partition_text.split(",")]).parts
        if flag not in ("yes", "no"):
            raise ValueError(f"{source}:{lineno}: flag must be yes or no")
        entries[(family, parts)] = NormalityEntry(
            family, parts, flag == "yes", citation)
    return NormalityTable(entries, source)


def load_normality_table(path: Optional[str] = None) -> NormalityTable:
    if path is None:
        ref = resources.files("dualitylab").joinpath("data/normality_table.txt")
        return parse_normality_table(ref.read_text(), "builtin:normality_table.txt")
    p = Path(path)
    return parse_normality_table(p.read_text(), str(p))
