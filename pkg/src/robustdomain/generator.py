"""Synthetic domain records drawn from per-class clamped Gaussian feature targets.

Every record gets a latent target per feature (13 values); a raw
:class:`DomainRecord` is then built so that the feature extractors recover
those targets. Except for the communication lists, realization uses only the
targets and class-independent randomness, so the Bayes rule on the realized
values (see :func:`bayes_accuracy`) bounds what any classifier can reach on
the extracted features.

Communication lists are built against ratio tables of the generated corpus
itself (see the comment above :func:`realize_lists`); their realization
depends on the target only, so the same bound holds for them as long as the
tables are built from the whole corpus.
"""

from __future__ import annotations

import datetime as dt
import json
import math
import os
import string
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.stats import norm

from .errors import ConfigurationError
from .model import (
    ALL_COLUMNS,
    TTL_MAX,
    CertificateInfo,
    CommunicationProfile,
    DnsSnapshot,
    DomainRecord,
    Label,
    WhoisInfo,
)
from .novel_features import DEFAULT_EPSILON
from .ratio_tables import DEFAULT_THRESHOLD, TableKind

# (benign mean, benign std, malicious mean, malicious std)
DEFAULT_STATS: dict[str, tuple[float, float, float, float]] = {
    "length": (14.38, 4.06, 15.54, 4.09),
    "consecutive": (1.29, 0.46, 1.46, 0.50),
    "entropy": (4.85, 1.18, 5.16, 1.34),
    "ip_count": (2.09, 1.25, 1.94, 0.94),
    "geo_count": (1.00, 0.17, 1.02, 0.31),
    "ttl_mean": (7578.13, 17781.47, 8039.92, 15466.29),
    "ttl_std": (2971.65, 8777.26, 2531.38, 7456.62),
    "lifetime": (10.98, 7.46, 6.75, 5.77),
    "active": (8.40, 6.79, 4.64, 5.66),
    "ssl_remaining": (1.547e7, 2.304e7, 4.365e6, 1.545e7),
    "ccr": (31.31, 91.16, 59.40, 215.15),
    "car": (935.59, 12258.99, 12979.38, 46384.86),
    "pdns_changes": (26.40, 111.99, 8.01, 16.63),
}

# Clamp bounds of the latent targets.
LEGAL_RANGES: dict[str, tuple[float, float]] = {
    "length": (4.0, 253.0),
    "consecutive": (1.0, 63.0),
    "entropy": (0.0, math.inf),
    "ip_count": (1.0, 50.0),
    "geo_count": (1.0, 50.0),
    "ttl_mean": (0.0, float(TTL_MAX)),
    "ttl_std": (0.0, float(TTL_MAX)),
    "lifetime": (0.0, 100.0),
    "active": (0.0, 100.0),
    "ssl_remaining": (0.0, math.inf),
    "ccr": (0.0, math.inf),
    "car": (0.0, math.inf),
    "pdns_changes": (0.0, math.inf),
}

SPEC_FORMAT = "robustdomain-generator-spec"

TLDS = ("com", "net", "org", "info", "io", "xyz", "ru", "de", "co", "biz", "top", "site", "dev", "me", "uk", "cn")
NAME_ALPHABET = string.ascii_lowercase + string.digits
COUNTRIES = (
    "US", "DE", "NL", "FR", "GB", "IE", "CA", "JP", "SG", "AU", "SE", "CH", "IT", "ES", "PL", "FI", "NO", "DK",
    "BE", "AT", "CZ", "IL", "KR", "IN", "BR", "MX", "AR", "CL", "ZA", "HK", "TW", "NZ", "PT", "GR", "RO", "BG",
    "HU", "SK", "SI", "HR", "RS", "UA", "RU", "BY", "KZ", "TR", "IR", "IQ", "SA", "AE", "QA", "EG", "NG", "KE",
    "MA", "TN", "DZ", "PK", "BD", "VN", "TH", "MY", "ID", "PH", "CN", "MN", "LT", "LV", "EE", "MD", "GE", "AM",
    "AZ", "UZ", "CO", "PE", "VE", "EC", "PA", "CR", "DO", "CU", "SC", "BZ", "VG", "KY", "LU", "LI", "MT", "CY",
)
HUB_COUNTRY = "US"
HUB_ASN = 13335

_BASE_DATE = dt.date(2000, 1, 1)
_BASE_EPOCH = 1_500_000_000


@dataclass
class GeneratorSpec:
    """Generator parameters; ``stats`` maps feature name to (benign mean, std, malicious mean, std)."""

    n_records: int = 6700
    malicious_fraction: float = 0.25
    seed: int = 0
    snapshots: int = 30
    stats: dict = field(default_factory=lambda: dict(DEFAULT_STATS))
    threshold: int = DEFAULT_THRESHOLD
    epsilon: float = DEFAULT_EPSILON
    max_retries: int = 20

    def validate(self) -> None:
        if not isinstance(self.n_records, int) or self.n_records < 0:
            raise ConfigurationError("n_records must be a non-negative integer")
        if not 0.0 < self.malicious_fraction < 1.0:
            raise ConfigurationError("malicious_fraction must lie in (0, 1)")
        if self.snapshots < 1:
            raise ConfigurationError("snapshots must be >= 1")
        if self.threshold < 0 or self.epsilon <= 0:
            raise ConfigurationError("threshold must be >= 0 and epsilon > 0")
        unknown = set(self.stats) - set(ALL_COLUMNS)
        missing = set(ALL_COLUMNS) - set(self.stats)
        if unknown or missing:
            raise ConfigurationError(f"stats keys mismatch: unknown={sorted(unknown)} missing={sorted(missing)}")
        for name, values in self.stats.items():
            if len(values) != 4 or not all(math.isfinite(v) for v in values):
                raise ConfigurationError(f"stats[{name}] must be four finite numbers")
            if values[1] < 0 or values[3] < 0:
                raise ConfigurationError(f"stats[{name}]: negative std")

    def to_json(self) -> str:
        body = asdict(self)
        body["stats"] = {k: list(v) for k, v in self.stats.items()}
        return json.dumps({"format": SPEC_FORMAT, "version": 1, "spec": body}, indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "GeneratorSpec":
        """Parse a spec file; omitted fields and features keep their defaults."""
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"spec is not valid JSON: {exc}") from None
        if not isinstance(doc, dict) or doc.get("format") != SPEC_FORMAT:
            raise ConfigurationError("not a generator spec file")
        body = dict(doc.get("spec", {}))
        stats = dict(DEFAULT_STATS)
        for name, values in body.pop("stats", {}).items():
            stats[name] = tuple(float(v) for v in values)
        allowed = {f for f in cls.__dataclass_fields__ if f != "stats"}
        unknown = set(body) - allowed
        if unknown:
            raise ConfigurationError(f"unknown spec fields: {sorted(unknown)}")
        spec = cls(stats=stats, **body)
        spec.validate()
        return spec


def save_spec(spec: GeneratorSpec, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(spec.to_json())


def load_spec(path: str | os.PathLike) -> GeneratorSpec:
    with open(path, encoding="utf-8") as fh:
        return GeneratorSpec.from_json(fh.read())


# -- latent targets -----------------------------------------------------------


def _class_params(spec: GeneratorSpec, name: str, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    bm, bs, mm, ms = spec.stats[name]
    return np.where(y == 1, mm, bm), np.where(y == 1, ms, bs)


def sample_targets(spec: GeneratorSpec, n: int, rng: np.random.Generator) -> tuple[np.ndarray, dict]:
    """Draw labels and clamped latent targets for ``n`` records."""
    y = (rng.random(n) < spec.malicious_fraction).astype(np.int64)
    targets = {}
    for name in ALL_COLUMNS:
        mu, sd = _class_params(spec, name, y)
        lo, hi = LEGAL_RANGES[name]
        targets[name] = np.clip(rng.normal(mu, sd), lo, hi)
    return y, targets


def clamped_mean(spec: GeneratorSpec, name: str, label: int) -> float:
    """Expected value of a clamped latent target for one class."""
    mu, sd = spec.stats[name][2 * label: 2 * label + 2]
    lo, hi = LEGAL_RANGES[name]
    if sd == 0:
        return float(np.clip(mu, lo, hi))
    a, b = (lo - mu) / sd, (hi - mu) / sd
    inner = mu * (norm.cdf(b) - norm.cdf(a)) + sd * (norm.pdf(a) - norm.pdf(b))
    lo_mass = lo * norm.cdf(a) if math.isfinite(lo) else 0.0
    hi_mass = hi * norm.sf(b) if math.isfinite(hi) else 0.0
    return float(inner + lo_mass + hi_mass)


def _log_density(spec: GeneratorSpec, name: str, x: np.ndarray, label: int) -> np.ndarray:
    """Log density of a clamped Gaussian: point masses at the bounds, Gaussian inside."""
    mu, sd = spec.stats[name][2 * label: 2 * label + 2]
    lo, hi = LEGAL_RANGES[name]
    sd = max(sd, 1e-12)
    out = norm.logpdf(x, mu, sd)
    out = np.where(x <= lo, norm.logcdf((lo - mu) / sd), out)
    return np.where(x >= hi, norm.logsf((hi - mu) / sd), out)


# Features whose realized value is the rounded latent target.
INTEGER_FEATURES = frozenset({"length", "consecutive", "ip_count", "geo_count", "pdns_changes"})


def _rounded_cdf(spec: GeneratorSpec, name: str, k: np.ndarray, label: int) -> np.ndarray:
    """P(round(clamped target) <= k) for one class."""
    mu, sd = spec.stats[name][2 * label: 2 * label + 2]
    lo, hi = LEGAL_RANGES[name]
    edge = np.asarray(k, dtype=float) + 0.5
    inner = norm.cdf((edge - mu) / max(sd, 1e-12))
    return np.where(edge >= hi, 1.0, np.where(edge < lo, 0.0, inner))


def _rounded_pmf(spec: GeneratorSpec, name: str, k: np.ndarray, label: int) -> np.ndarray:
    return _rounded_cdf(spec, name, k, label) - _rounded_cdf(spec, name, k - 1, label)


def _log_likelihood(spec: GeneratorSpec, columns: Sequence[str], values: dict, label: int) -> np.ndarray:
    n = len(next(iter(values.values())))
    out = np.zeros(n)
    for name in columns:
        x = values[name]
        if name == "geo_count":
            # realized geo = min(round(geo), round(ip)), so its law depends on ip
            ips = values["ip_count"]
            tail_geo = 1.0 - _rounded_cdf(spec, "geo_count", x - 1, label)
            if "ip_count" in columns:
                p = np.where(x < ips, _rounded_pmf(spec, "geo_count", x, label), tail_geo)
            else:
                p = (_rounded_pmf(spec, "geo_count", x, label) * (1.0 - _rounded_cdf(spec, "ip_count", x, label))
                     + _rounded_pmf(spec, "ip_count", x, label) * tail_geo)
            out += np.log(np.maximum(p, 1e-300))
        elif name in INTEGER_FEATURES:
            out += np.log(np.maximum(_rounded_pmf(spec, name, x, label), 1e-300))
        else:
            out += _log_density(spec, name, x, label)
    return out


def bayes_accuracy(
    spec: GeneratorSpec,
    columns: Sequence[str],
    n_samples: int = 400_000,
    seed: int = 12345,
) -> float:
    """Monte Carlo accuracy of the Bayes rule on realized features restricted to ``columns``.

    Integer features are rounded and geo_count is capped by ip_count, as in the
    generated records; the rule uses the exact class-conditional laws of those
    realized values.
    """
    rng = np.random.default_rng(seed)
    y, targets = sample_targets(spec, n_samples, rng)
    values = {k: (np.round(v) if k in INTEGER_FEATURES else v) for k, v in targets.items()}
    values["geo_count"] = np.minimum(values["geo_count"], values["ip_count"])
    prior = spec.malicious_fraction
    score = math.log(prior) - math.log1p(-prior)
    score = score + _log_likelihood(spec, columns, values, 1) - _log_likelihood(spec, columns, values, 0)
    return float(np.mean((score > 0).astype(np.int64) == y))


# -- domain names -------------------------------------------------------------


def _entropy_terms(counts: Sequence[int], total: int) -> float:
    return sum(c * c / total * math.log2(total / c) for c in counts if c > 0)


def _term(c: int, total: int) -> float:
    return c * c / total * math.log2(total / c) if c > 0 else 0.0


def _fit_counts(n_free: int, n_chars: int, cap: int, fixed: float, total: int, target: float) -> list[int]:
    """Greedy unit moves on a count multiset summing to ``n_free`` toward entropy ``target``.

    ``fixed`` is the entropy contributed by characters outside the multiset;
    every count stays within ``cap`` and at most ``n_chars`` counts are non-zero.
    """
    if n_free == 0:
        return []
    k = min(n_chars, n_free)
    counts = [n_free // k + (1 if i < n_free % k else 0) for i in range(k)]
    current = fixed + _entropy_terms(counts, total)
    while True:
        best_gap = abs(current - target)
        best = None
        values = sorted(set(counts)) + ([0] if len(counts) < n_chars else [])
        for u in values:
            if u == 0:
                continue
            for v in values:
                if v + 1 > cap or (u == v and counts.count(u) < 2):
                    continue
                delta = _term(u - 1, total) - _term(u, total) + _term(v + 1, total) - _term(v, total)
                gap = abs(current + delta - target)
                if gap < best_gap - 1e-12:
                    best_gap, best = gap, (u, v, delta)
        if best is None:
            return counts
        u, v, delta = best
        counts.remove(u)
        if u > 1:
            counts.append(u - 1)
        if v:
            counts.remove(v)
        counts.append(v + 1)
        current += delta


def _arrange(pool: dict[str, int], rng: np.random.Generator) -> list[str]:
    """Random sequence of the multiset ``pool`` with no two equal neighbours."""
    out: list[str] = []
    prev = None
    remaining = sum(pool.values())
    while remaining:
        chars = [c for c, k in pool.items() if k and c != prev]
        feasible = []
        for c in chars:
            rest = remaining - 1
            ok = all(
                (k - (c == x)) <= ((rest + 1) // 2 if x != c else rest // 2)
                for x, k in pool.items()
            )
            if ok:
                feasible.append(c)
        choice = feasible or chars
        weights = np.array([pool[c] for c in choice], dtype=float)
        c = choice[int(rng.choice(len(choice), p=weights / weights.sum()))]
        out.append(c)
        pool[c] -= 1
        prev = c
        remaining -= 1
    return out


def realize_domain(length: int, run: int, entropy: float, rng: np.random.Generator) -> Optional[str]:
    """Domain ``name.tld`` with the given length and longest run, entropy as close as reachable.

    Returns ``None`` when no TLD leaves room for the run.
    """
    options = [t for t in TLDS if length - 1 - len(t) >= max(run, 1)]
    if not options:
        return None
    tld = options[int(rng.integers(len(options)))]
    n = length - 1 - len(tld)
    letters = [c for c in NAME_ALPHABET if c not in tld]
    letters = [letters[i] for i in rng.permutation(len(letters))]

    fixed_counts = [tld.count(c) for c in set(tld)] + [1]
    block = run if run > 1 else 0
    m = n - block
    if block:
        fixed_counts.append(block)
    fixed = _entropy_terms(fixed_counts, length)
    counts = _fit_counts(m, len(letters) - (1 if block else 0), (m + 1) // 2, fixed, length, entropy)

    block_char = letters[-1] if block else None
    pool = {letters[i]: c for i, c in enumerate(counts)}
    body = _arrange(pool, rng)
    if block:
        at = int(rng.integers(len(body) + 1))
        body[at:at] = [block_char] * block
    return "".join(body) + "." + tld


# -- DNS, whois, certificate --------------------------------------------------


def realize_ttls(mean: float, std: float, k: int, rng: np.random.Generator) -> list[int]:
    """Two-valued TTL multiset of size ``k`` with the target mean and (population) std.

    When the std is unreachable with non-negative values, the largest
    reachable std is used and the mean is kept.
    """
    if mean <= 0:
        return [0] * k
    if std <= 0 or k == 1:
        return [int(round(mean))] * k
    f_star = 1.0 / (1.0 + (std / mean) ** 2)
    high = k // 2 if f_star >= 0.5 else max(1, int(math.floor(k * f_star)))
    f = high / k
    gap = std / math.sqrt(f * (1.0 - f))
    low = mean - f * gap
    if low < 0:
        low, gap = 0.0, mean / f
    lo_v = int(min(round(low), TTL_MAX))
    hi_v = int(min(round(low + gap), TTL_MAX))
    values = [hi_v] * high + [lo_v] * (k - high)
    return [values[i] for i in rng.permutation(k)]


def _random_ips(count: int, rng: np.random.Generator) -> list[str]:
    seen: list[str] = []
    while len(seen) < count:
        a, b, c, d = rng.integers(1, 224), rng.integers(0, 256), rng.integers(0, 256), rng.integers(1, 255)
        ip = f"{a}.{b}.{c}.{d}"
        if ip not in seen:
            seen.append(ip)
    return seen


def realize_dns(ips: int, geos: int, mean: float, std: float, snapshots: int, rng) -> tuple[DnsSnapshot, ...]:
    k = max(snapshots, ips)
    addresses = _random_ips(ips, rng)
    countries = [COUNTRIES[i] for i in rng.choice(len(COUNTRIES), size=geos, replace=False)]
    ttls = realize_ttls(mean, std, k, rng)
    start = _BASE_EPOCH + int(rng.integers(0, 10_000_000))
    return tuple(
        DnsSnapshot(addresses[s % ips], countries[(s % ips) % geos], ttls[s], start + 3600 * s)
        for s in range(k)
    )


def realize_whois(lifetime: float, active: float, rng) -> WhoisInfo:
    created = _BASE_DATE + dt.timedelta(days=int(rng.integers(0, 7000)))
    return WhoisInfo(
        created=created,
        updated=created + dt.timedelta(days=int(round(active * 365.25))),
        expires=created + dt.timedelta(days=int(round(lifetime * 365.25))),
    )


def realize_certificate(remaining: float, rng) -> Optional[CertificateInfo]:
    updated = _BASE_EPOCH + int(rng.integers(0, 50_000_000))
    if remaining > 0:
        return CertificateInfo(1, updated, updated + int(round(remaining)))
    if rng.random() < 0.5:
        return None
    return CertificateInfo(0, updated, updated + int(rng.integers(1, 40_000_000)))


# -- communication lists ------------------------------------------------------
#
# Targets are split into coins worth u * 2**k, where u is the rank of one
# unranked item. Coin 0 is served by rare items that never reach the table
# threshold. Every other coin gets table entries (benign count b, malicious
# count m) chosen so that -log2(b/(b+m) + eps) * H / (b+m) equals the coin
# value, where H is the count of a benign-only hub item that sets the table's
# max occurrences. Items are assigned from target sizes alone, never from the
# label. Occurrences that fit no item are traded for two coins one step down.

HUB_TOTAL = {TableKind.COUNTRIES: 5_000, TableKind.ASNS: 100_000}
MIN_ITEM_TOTAL = 20
MIN_MIXED_BENIGN = 6


def unranked_rank(epsilon: float) -> float:
    return -math.log2(0.75 + epsilon)


def coin_values(hub_total: int, epsilon: float, min_total: int) -> list[float]:
    """Coin ladder ``u * 2**k`` up to the largest value a pure-malicious item can carry."""
    u = unranked_rank(epsilon)
    top = -math.log2(epsilon) * hub_total / min_total
    coins = [u]
    while coins[-1] * 2 <= top:
        coins.append(coins[-1] * 2)
    return coins


def decompose(target: float, coins: Sequence[float]) -> list[int]:
    """Greedy coin counts for ``target``; the final remainder is rounded to the nearest coin-0 multiple."""
    counts = [0] * len(coins)
    if target <= 0:
        return counts
    rest = target
    counts[-1] = int(rest // coins[-1])
    rest -= counts[-1] * coins[-1]
    for k in range(len(coins) - 2, 0, -1):
        if rest >= coins[k]:
            counts[k] = 1
            rest -= coins[k]
    counts[0] = int(round(rest / coins[0]))
    return counts


def _item_rank(b: int, total: int, hub_total: int, epsilon: float) -> float:
    return -math.log2(b / total + epsilon) * hub_total / total


def _mixed_shape(value: float, share: float, hub_total: int, epsilon: float, min_total: int) -> Optional[tuple[int, int]]:
    """(benign, malicious) counts of a mixed item worth ``value`` with a benign share near ``share``."""
    cap = int(0.8 * hub_total)
    x0 = -math.log2(share + epsilon) * hub_total / value if 0 < share < 1 else float(min_total)
    x0 = int(min(max(round(x0), min_total), cap))
    best, best_err = None, math.inf
    for x in range(max(min_total, x0 - 4), min(cap, x0 + 4) + 1):
        r = 2.0 ** (-value * x / hub_total) - epsilon
        for b in (math.floor(r * x), math.ceil(r * x)):
            if not MIN_MIXED_BENIGN <= b <= x - 1:
                continue
            err = abs(_item_rank(b, x, hub_total, epsilon) / value - 1.0)
            if err < best_err:
                best, best_err = (b, x - b), err
    return best if best_err < 0.05 else None


def _design_coin(value, benign: list, malicious: list, hub_total, epsilon, min_total):
    """Group occurrences (record indices) into items worth ``value``; return items and leftovers."""
    items = []
    nb, nm = len(benign), len(malicious)
    used_b = used_m = 0
    if nb and nm:
        shape = _mixed_shape(value, nb / (nb + nm), hub_total, epsilon, min_total)
        if shape is not None:
            b, m = shape
            for _ in range(min(nb // b, nm // m)):
                items.append(benign[used_b:used_b + b] + malicious[used_m:used_m + m])
                used_b += b
                used_m += m
    x_pure = round(-math.log2(epsilon) * hub_total / value)
    if min_total <= x_pure <= 0.8 * hub_total:
        while nm - used_m >= x_pure:
            items.append(malicious[used_m:used_m + x_pure])
            used_m += x_pure
    return items, benign[used_b:], malicious[used_m:]


def _item_names(kind: TableKind, count: int, rng: np.random.Generator) -> list:
    if kind is TableKind.ASNS:
        pool = rng.choice(np.arange(1000, 4_000_000), size=count + 1, replace=False)
        return [int(a) for a in pool if a != HUB_ASN][:count]
    letters = string.ascii_uppercase
    names = [a + b for a in letters for b in letters]
    if count > len(names) - 1:
        names += [a + b + c for a in letters for b in letters for c in letters]
    names = [n for n in names if n != HUB_COUNTRY]
    return [names[i] for i in rng.permutation(len(names))[:count]]


def realize_lists(
    kind: TableKind,
    targets: np.ndarray,
    labels: np.ndarray,
    threshold: int,
    epsilon: float,
    rng: np.random.Generator,
    hub_total: Optional[int] = None,
) -> list[list]:
    """Item lists whose communication rank, against tables of the whole corpus, tracks ``targets``."""
    n = len(targets)
    hub_total = hub_total or HUB_TOTAL[kind]
    min_total = max(MIN_ITEM_TOTAL, 2 * threshold)
    coins = coin_values(hub_total, epsilon, min_total)
    demand = np.array([decompose(t, coins) for t in targets], dtype=np.int64).reshape(n, len(coins))

    groups: list[list[int]] = []  # record indices per item, repeated by multiplicity
    carry_b: list[int] = []
    carry_m: list[int] = []
    for k in range(len(coins) - 1, 0, -1):
        benign = [i for i in np.flatnonzero(labels == 0) for _ in range(demand[i, k])] + carry_b
        malicious = [i for i in np.flatnonzero(labels == 1) for _ in range(demand[i, k])] + carry_m
        benign = [benign[j] for j in rng.permutation(len(benign))]
        malicious = [malicious[j] for j in rng.permutation(len(malicious))]
        items, left_b, left_m = _design_coin(coins[k], benign, malicious, hub_total, epsilon, min_total)
        groups.extend(items)
        carry_b = left_b + left_b
        carry_m = left_m + left_m
    rare = [i for i in range(n) for _ in range(demand[i, 0])] + carry_b + carry_m
    rare = [rare[j] for j in rng.permutation(len(rare))]
    per_rare = max(threshold - 1, 0)
    rare_groups = [rare[s:s + per_rare] for s in range(0, len(rare), per_rare)] if per_rare else []

    names = _item_names(kind, len(groups) + len(rare_groups), rng)
    lists: list[list] = [[] for _ in range(n)]
    for name, members in zip(names, groups + rare_groups):
        for i in members:
            lists[i].append(name)

    hub = HUB_COUNTRY if kind is TableKind.COUNTRIES else HUB_ASN
    hosts = np.flatnonzero((labels == 0) & (targets > 0))
    if len(hosts) == 0:
        hosts = np.flatnonzero(labels == 0)
    if len(hosts):
        for i, c in zip(hosts, rng.multinomial(hub_total, np.full(len(hosts), 1.0 / len(hosts)))):
            lists[i].extend([hub] * int(c))
    for lst in lists:
        rng.shuffle(lst)
    return lists


def _realize_communication(spec: GeneratorSpec, y, targets, skeleton: list[DomainRecord]) -> list[DomainRecord]:
    lists = {}
    for kind, name, stream in ((TableKind.COUNTRIES, "ccr", 5), (TableKind.ASNS, "car", 6)):
        rng = np.random.default_rng([spec.seed, stream])
        lists[kind] = realize_lists(kind, targets[name], y, spec.threshold, spec.epsilon, rng)
    return [
        _replace_comm(r, CommunicationProfile(tuple(c), tuple(a)))
        for r, c, a in zip(skeleton, lists[TableKind.COUNTRIES], lists[TableKind.ASNS])
    ]


def _replace_comm(r: DomainRecord, p: CommunicationProfile) -> DomainRecord:
    return DomainRecord(r.url, r.domain, r.label, r.dns, r.whois, r.pdns_change_count, p, r.certificate)


# -- driver -------------------------------------------------------------------


@dataclass
class GeneratedData:
    records: list[DomainRecord]
    labels: np.ndarray
    targets: dict  # feature name -> latent target per record


def generate_with_targets(spec: GeneratorSpec) -> GeneratedData:
    spec.validate()
    rng = np.random.default_rng([spec.seed, 1])
    y, targets = sample_targets(spec, spec.n_records, rng)
    length_params = _class_params(spec, "length", y)
    run_params = _class_params(spec, "consecutive", y)
    skeleton = []
    for i in range(spec.n_records):
        rec_rng = np.random.default_rng([spec.seed, 3, i])
        domain = None
        for _ in range(spec.max_retries):
            length = int(round(targets["length"][i]))
            run = int(round(targets["consecutive"][i]))
            domain = realize_domain(length, run, targets["entropy"][i], rec_rng)
            if domain is not None:
                break
            # infeasible pair: redraw both targets from the same class-conditionals
            for name, (mu, sd) in (("length", length_params), ("consecutive", run_params)):
                lo, hi = LEGAL_RANGES[name]
                targets[name][i] = float(np.clip(rec_rng.normal(mu[i], sd[i]), lo, hi))
        if domain is None:
            domain = realize_domain(length, 1, targets["entropy"][i], rec_rng)
        ips = int(round(targets["ip_count"][i]))
        geos = min(ips, int(round(targets["geo_count"][i])))
        skeleton.append(DomainRecord(
            url=f"https://{domain}/",
            domain=domain,
            label=Label(int(y[i])),
            dns=realize_dns(ips, geos, targets["ttl_mean"][i], targets["ttl_std"][i], spec.snapshots, rec_rng),
            whois=realize_whois(targets["lifetime"][i], targets["active"][i], rec_rng),
            pdns_change_count=int(round(targets["pdns_changes"][i])),
            certificate=realize_certificate(targets["ssl_remaining"][i], rec_rng),
        ))
    records = _realize_communication(spec, y, targets, skeleton)
    return GeneratedData(records, y, targets)


def generate(spec: GeneratorSpec) -> list[DomainRecord]:
    """Seeded synthetic corpus; identical specs give identical records."""
    return generate_with_targets(spec).records
