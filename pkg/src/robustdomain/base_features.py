"""The nine classic domain features: lexical, DNS and Whois derived."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import astuple, dataclass
from typing import Optional, Sequence

from .errors import InvalidInputError
from .model import DnsSnapshot, DomainRecord, WhoisInfo

DAYS_PER_YEAR = 365.25

_LOG_BASES = {2: math.log(2.0), 10: math.log(10.0), "e": 1.0}


@dataclass(frozen=True)
class BaseFeatureRow:
    length: int
    consecutive: int
    entropy: float
    ip_count: int
    geo_count: int
    ttl_mean: float
    ttl_std: float
    lifetime: float
    active: float

    def as_tuple(self) -> tuple[float, ...]:
        return astuple(self)


def _require_domain(domain: str) -> None:
    if not domain:
        raise InvalidInputError("domain must be non-empty")


def domain_length(domain: str) -> int:
    _require_domain(domain)
    return len(domain)


def max_consecutive(domain: str) -> int:
    """Longest run of one repeated character, dots included."""
    _require_domain(domain)
    best = run = 1
    for prev, cur in zip(domain, domain[1:]):
        run = run + 1 if cur == prev else 1
        best = max(best, run)
    return best


def domain_entropy(domain: str, base=2) -> float:
    """Entropy of the domain string, summed over character positions.

    Every position contributes ``-p(c) * log p(c)`` for its character ``c``, so a
    character seen k times contributes k times. With the default base 2,
    ``"ddcd.cc"`` scores about 3.544.

    Args:
        domain: normalized domain, e.g. ``"google.com"``.
        base: logarithm base, one of 2, 10 or ``"e"``.
    """
    _require_domain(domain)
    try:
        log_base = _LOG_BASES[base]
    except KeyError:
        raise InvalidInputError(f"unsupported entropy base {base!r}") from None
    n = len(domain)
    total = 0.0
    for count in Counter(domain).values():
        p = count / n
        total -= count * p * math.log(p)
    # -0.0 for single-symbol strings
    return abs(total / log_base)


def ip_count(dns: Sequence[DnsSnapshot]) -> int:
    return len({s.ip for s in dns})


def geo_count(dns: Sequence[DnsSnapshot]) -> int:
    return len({s.country for s in dns})


def ttl_mean(dns: Sequence[DnsSnapshot]) -> float:
    if not dns:
        return 0.0
    return math.fsum(s.ttl for s in dns) / len(dns)


def ttl_std(dns: Sequence[DnsSnapshot]) -> float:
    """Population standard deviation of the TTLs (0 for fewer than two snapshots)."""
    n = len(dns)
    if n <= 1:
        return 0.0
    mean = ttl_mean(dns)
    return math.sqrt(math.fsum((s.ttl - mean) ** 2 for s in dns) / n)


def lifetime_years(w: Optional[WhoisInfo]) -> float:
    if w is None:
        return 0.0
    return (w.expires - w.created).days / DAYS_PER_YEAR


def active_years(w: Optional[WhoisInfo]) -> float:
    if w is None:
        return 0.0
    return (w.updated - w.created).days / DAYS_PER_YEAR


def extract_base(r: DomainRecord, entropy_base=2) -> BaseFeatureRow:
    return BaseFeatureRow(
        length=domain_length(r.domain),
        consecutive=max_consecutive(r.domain),
        entropy=domain_entropy(r.domain, entropy_base),
        ip_count=ip_count(r.dns),
        geo_count=geo_count(r.dns),
        ttl_mean=ttl_mean(r.dns),
        ttl_std=ttl_std(r.dns),
        lifetime=lifetime_years(r.whois),
        active=active_years(r.whois),
    )
