"""Benign-ratio tables over the countries and ASNs pages communicate with.

Every occurrence of an item in a record's communication list adds one to that
item's benign or malicious count. Items seen fewer than ``threshold`` times are
left out of the table; lookups for them fall back to the prior used by the
communication rank (ratio 0.75, normalized weight 1).
"""

from __future__ import annotations

import enum
import os
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Union

from .errors import EmptyTableError, InvalidInputError, SchemaError
from .model import DomainRecord, Label

Item = Union[str, int]

DEFAULT_THRESHOLD = 10
UNRANKED_RATIO = 0.75
UNRANKED_NORM = 1.0

FORMAT_NAME = "ratio-table"
FORMAT_VERSION = 1


class TableKind(str, enum.Enum):
    COUNTRIES = "countries"
    ASNS = "asns"


@dataclass(frozen=True)
class TableEntry:
    benign: int
    malicious: int
    benign_ratio: float
    norm: float

    @property
    def total(self) -> int:
        return self.benign + self.malicious

    @property
    def malicious_ratio(self) -> float:
        return self.malicious / self.total


@dataclass(frozen=True)
class RatioTable:
    kind: TableKind
    entries: dict
    threshold: int
    max_occurrences: int

    def lookup(self, item: Item) -> tuple[float, float, bool]:
        return lookup(self, item)


class TablePair(NamedTuple):
    countries: RatioTable
    asns: RatioTable


def _items_of(record: DomainRecord, kind: TableKind) -> tuple:
    comm = record.communication
    if comm is None:
        return ()
    return comm.countries if kind is TableKind.COUNTRIES else comm.asns


def _make_table(kind: TableKind, counts: dict, threshold: int) -> RatioTable:
    retained = {item: bm for item, bm in counts.items() if bm[0] + bm[1] >= threshold}
    max_occ = max((b + m for b, m in retained.values()), default=1)
    entries = {}
    for item in sorted(retained):
        b, m = retained[item]
        entries[item] = TableEntry(b, m, b / (b + m), (b + m) / max_occ)
    return RatioTable(kind, entries, threshold, max_occ)


def build_table(
    records: Iterable[DomainRecord],
    kind: TableKind | str,
    threshold: int = DEFAULT_THRESHOLD,
) -> RatioTable:
    kind = TableKind(kind)
    if threshold < 1:
        raise InvalidInputError("threshold must be >= 1")
    benign: Counter = Counter()
    malicious: Counter = Counter()
    seen_profile = False
    for r in records:
        if r.communication is None:
            continue
        seen_profile = True
        target = malicious if r.label == Label.MALICIOUS else benign
        target.update(_items_of(r, kind))
    if not seen_profile:
        raise EmptyTableError(f"no record carries communication data for {kind.value}")
    counts = {item: (benign[item], malicious[item]) for item in benign.keys() | malicious.keys()}
    return _make_table(kind, counts, threshold)


def build_tables(records, threshold: int = DEFAULT_THRESHOLD) -> TablePair:
    records = list(records)
    return TablePair(
        build_table(records, TableKind.COUNTRIES, threshold),
        build_table(records, TableKind.ASNS, threshold),
    )


def lookup(t: RatioTable, item: Item) -> tuple[float, float, bool]:
    """Return ``(benign_ratio, norm, ranked)``; unranked items get the 0.75/1.0 prior."""
    entry = t.entries.get(item)
    if entry is None:
        return UNRANKED_RATIO, UNRANKED_NORM, False
    return entry.benign_ratio, entry.norm, True


# -- persistence -------------------------------------------------------------


def dumps_table(t: RatioTable) -> str:
    lines = [
        f"#{FORMAT_NAME}\tversion={FORMAT_VERSION}\tkind={t.kind.value}"
        f"\tthreshold={t.threshold}\tmax_occurrences={t.max_occurrences}\tentries={len(t.entries)}"
    ]
    for item, e in t.entries.items():
        lines.append(f"{t.kind.value}\t{item}\t{e.benign}\t{e.malicious}")
    return "\n".join(lines) + "\n"


def loads_table(text: str) -> RatioTable:
    lines = text.splitlines()
    if not lines or not lines[0].startswith("#" + FORMAT_NAME):
        raise SchemaError("missing ratio-table header")
    try:
        meta = dict(field.split("=", 1) for field in lines[0].split("\t")[1:])
        version = int(meta["version"])
        kind = TableKind(meta["kind"])
        threshold = int(meta["threshold"])
        max_occ = int(meta["max_occurrences"])
        n_entries = int(meta["entries"])
    except (KeyError, ValueError) as exc:
        raise SchemaError(f"malformed ratio-table header: {exc}") from None
    if version != FORMAT_VERSION:
        raise SchemaError(f"unsupported ratio-table version {version}")
    body = [ln for ln in lines[1:] if ln]
    if len(body) != n_entries:
        raise SchemaError(f"expected {n_entries} entries, found {len(body)} (truncated file?)")

    entries = {}
    for ln in body:
        parts = ln.split("\t")
        if len(parts) != 4 or parts[0] != kind.value:
            raise SchemaError(f"malformed ratio-table line: {ln!r}")
        try:
            item: Item = int(parts[1]) if kind is TableKind.ASNS else parts[1]
            b, m = int(parts[2]), int(parts[3])
        except ValueError:
            raise SchemaError(f"malformed ratio-table line: {ln!r}") from None
        entries[item] = TableEntry(b, m, b / (b + m), (b + m) / max_occ)
    return RatioTable(kind, entries, threshold, max_occ)


def save_table(t: RatioTable, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps_table(t))


def load_table(path: str | os.PathLike) -> RatioTable:
    with open(path, encoding="utf-8") as fh:
        return loads_table(fh.read())
