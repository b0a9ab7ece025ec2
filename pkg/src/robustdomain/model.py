"""Domain types shared by every stage of the pipeline.

All types are frozen dataclasses holding tuples, so instances can be shared
freely between threads. ``validate_record`` reports invariant violations as
plain strings instead of raising.
"""

from __future__ import annotations

import datetime as dt
import enum
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence
from urllib.parse import urlsplit

TTL_MAX = 2**31 - 1
MIN_DOMAIN_LENGTH = 4


class Label(enum.IntEnum):
    BENIGN = 0
    MALICIOUS = 1


class FeatureSetId(str, enum.Enum):
    B = "B"
    BR = "BR"
    TCP = "TCP"
    BRTCP = "BRTCP"
    BTCP = "BTCP"

    @property
    def columns(self) -> tuple[str, ...]:
        return FEATURE_SET_COLUMNS[self]

    @property
    def uses_tables(self) -> bool:
        return self in (FeatureSetId.TCP, FeatureSetId.BRTCP, FeatureSetId.BTCP)


BASE_COLUMNS = (
    "length",
    "consecutive",
    "entropy",
    "ip_count",
    "geo_count",
    "ttl_mean",
    "ttl_std",
    "lifetime",
    "active",
)
ROBUST_BASE_COLUMNS = ("consecutive", "ttl_mean", "lifetime", "active")
NOVEL_COLUMNS = ("ssl_remaining", "ccr", "car", "pdns_changes")
ALL_COLUMNS = BASE_COLUMNS + NOVEL_COLUMNS

FEATURE_SET_COLUMNS: dict[FeatureSetId, tuple[str, ...]] = {
    FeatureSetId.B: BASE_COLUMNS,
    FeatureSetId.BR: ROBUST_BASE_COLUMNS,
    FeatureSetId.TCP: NOVEL_COLUMNS,
    FeatureSetId.BRTCP: ROBUST_BASE_COLUMNS + NOVEL_COLUMNS,
    FeatureSetId.BTCP: BASE_COLUMNS + NOVEL_COLUMNS,
}


@dataclass(frozen=True)
class DnsSnapshot:
    ip: str
    country: str
    ttl: int
    observed_at: int  # UTC seconds


@dataclass(frozen=True)
class WhoisInfo:
    created: dt.date
    updated: dt.date
    expires: dt.date


@dataclass(frozen=True)
class CommunicationProfile:
    """Countries and ASNs of every IP a page talked to; one entry per IP."""

    countries: tuple[str, ...] = ()
    asns: tuple[int, ...] = ()


@dataclass(frozen=True)
class CertificateInfo:
    valid: int
    updated: int  # UTC seconds
    expires: int  # UTC seconds


@dataclass(frozen=True)
class DomainRecord:
    url: str
    domain: str
    label: Label
    dns: tuple[DnsSnapshot, ...] = ()
    whois: Optional[WhoisInfo] = None
    pdns_change_count: int = 0
    communication: Optional[CommunicationProfile] = None
    certificate: Optional[CertificateInfo] = None


@dataclass(frozen=True)
class FeatureVector:
    set_id: FeatureSetId
    values: tuple[float, ...]
    feature_names: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if not self.feature_names:
            object.__setattr__(self, "feature_names", self.set_id.columns)
        expected = len(self.set_id.columns)
        if len(self.values) != expected or len(self.feature_names) != expected:
            raise ValueError(
                f"feature set {self.set_id.value} expects {expected} values, got {len(self.values)}"
            )
        if not all(math.isfinite(v) for v in self.values):
            raise ValueError("feature values must be finite")


def normalize_domain(text: str) -> str:
    """Reduce a URL or host to the lowercase ``name.tld`` form used by lexical features.

    Scheme, credentials, port, path, query and a leading ``www.`` label are removed.

    >>> normalize_domain("http://www.ariel-cyber.co.il/about")
    'ariel-cyber.co.il'
    """
    text = text.strip()
    if not text:
        return ""
    if "://" not in text:
        text = "//" + text
    host = urlsplit(text).hostname or ""
    host = host.lower().rstrip(".")
    if host.startswith("www."):
        host = host[4:]
    return host


def _is_date(value) -> bool:
    return isinstance(value, dt.date) and not isinstance(value, dt.datetime)


def validate_record(r: DomainRecord) -> list[str]:
    """Return every violated invariant of ``r`` as ``"<field>: <rule>"`` strings."""
    problems: list[str] = []

    d = r.domain
    if not isinstance(d, str) or not d:
        problems.append("domain: empty")
    else:
        if d != d.lower():
            problems.append("domain: not lowercase")
        if "." not in d:
            problems.append("domain: missing dot")
        if len(d) < MIN_DOMAIN_LENGTH:
            problems.append("domain: shorter than 4 characters")

    if not isinstance(r.label, Label):
        problems.append("label: not Benign/Malicious")

    if not isinstance(r.pdns_change_count, int) or r.pdns_change_count < 0:
        problems.append("pdns_change_count: negative")

    for i, snap in enumerate(r.dns):
        if not isinstance(snap.ttl, int) or not 0 <= snap.ttl <= TTL_MAX:
            problems.append(f"dns[{i}]: ttl out of range")
        if not snap.ip:
            problems.append(f"dns[{i}]: empty ip")

    w = r.whois
    if w is not None:
        if not (_is_date(w.created) and _is_date(w.updated) and _is_date(w.expires)):
            problems.append("whois: dates must be calendar dates")
        else:
            if w.created > w.updated:
                problems.append("whois: created after updated")
            if w.created > w.expires:
                problems.append("whois: created after expires")

    c = r.communication
    if c is not None:
        if any(not isinstance(a, int) or isinstance(a, bool) or a < 0 for a in c.asns):
            problems.append("communication: asn must be a non-negative integer")
        if any(not isinstance(x, str) or not x for x in c.countries):
            problems.append("communication: country must be non-empty text")

    cert = r.certificate
    if cert is not None:
        if cert.valid not in (0, 1):
            problems.append("certificate: valid must be 0 or 1")
        elif cert.valid == 1 and cert.expires < cert.updated:
            problems.append("certificate: expires before updated")

    return problems


def feature_index(names: Sequence[str], name: str) -> int:
    try:
        return list(names).index(name)
    except ValueError:
        return -1
