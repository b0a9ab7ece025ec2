"""Communication rank (CCR/CAR), passive-DNS change count and SSL remaining time."""

from __future__ import annotations

import math
from dataclasses import astuple, dataclass
from typing import Optional, Sequence

from .errors import InvalidInputError
from .model import CertificateInfo, DomainRecord
from .ratio_tables import RatioTable, TableKind, TablePair, lookup

DEFAULT_EPSILON = 1e-6

_LOG_HALF = math.log(0.5)


@dataclass(frozen=True)
class NovelFeatureRow:
    ssl_remaining: float
    ccr: float
    car: float
    pdns_changes: int

    def as_tuple(self) -> tuple[float, ...]:
        return astuple(self)


def _check_kind(items: Sequence, kind: TableKind) -> None:
    if kind is TableKind.ASNS:
        ok = all(isinstance(x, int) and not isinstance(x, bool) for x in items)
    else:
        ok = all(isinstance(x, str) for x in items)
    if not ok:
        raise InvalidInputError(f"items do not match a {kind.value} table")


def communication_rank(items: Sequence, table: RatioTable, epsilon: float = DEFAULT_EPSILON) -> float:
    """Sum of ``log_0.5(ratio + epsilon) / norm`` over the items.

    Items missing from the table (never seen, or seen fewer times than the table
    threshold) use ratio 0.75 and norm 1. The sum is exactly rounded, so the
    result does not depend on item order.
    """
    if epsilon <= 0:
        raise InvalidInputError("epsilon must be positive")
    _check_kind(items, table.kind)
    terms = []
    for item in items:
        ratio, norm, _ = lookup(table, item)
        terms.append(math.log(ratio + epsilon) / _LOG_HALF / norm)
    return math.fsum(terms)


def ccr(r: DomainRecord, countries_table: RatioTable, epsilon: float = DEFAULT_EPSILON) -> float:
    if r.communication is None:
        return 0.0
    return communication_rank(r.communication.countries, countries_table, epsilon)


def car(r: DomainRecord, asns_table: RatioTable, epsilon: float = DEFAULT_EPSILON) -> float:
    if r.communication is None:
        return 0.0
    return communication_rank(r.communication.asns, asns_table, epsilon)


def pdns_changes(r: DomainRecord) -> int:
    return r.pdns_change_count


def ssl_remaining(c: Optional[CertificateInfo]) -> float:
    """Seconds of certificate validity, zero for absent or invalid certificates."""
    if c is None or not c.valid:
        return 0.0
    return float(max(0, c.expires - c.updated))


def extract_novel(r: DomainRecord, tables: TablePair, epsilon: float = DEFAULT_EPSILON) -> NovelFeatureRow:
    return NovelFeatureRow(
        ssl_remaining=ssl_remaining(r.certificate),
        ccr=ccr(r, tables.countries, epsilon),
        car=car(r, tables.asns, epsilon),
        pdns_changes=pdns_changes(r),
    )
