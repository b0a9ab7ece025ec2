"""Record files (JSON lines) and the ratio-pool / model-pool split protocol."""

from __future__ import annotations

import datetime as dt
import json
import os
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidInputError, SchemaError
from .model import (
    CertificateInfo,
    CommunicationProfile,
    DnsSnapshot,
    DomainRecord,
    Label,
    WhoisInfo,
    validate_record,
)

RECORDS_SCHEMA = "robustdomain-records"
RECORDS_VERSION = 1


# -- (de)serialization --------------------------------------------------------


def record_to_dict(r: DomainRecord) -> dict:
    return {
        "url": r.url,
        "domain": r.domain,
        "label": "malicious" if r.label == Label.MALICIOUS else "benign",
        "dns": [
            {"ip": s.ip, "country": s.country, "ttl": s.ttl, "observed_at": s.observed_at}
            for s in r.dns
        ],
        "whois": None if r.whois is None else {
            "created": r.whois.created.isoformat(),
            "updated": r.whois.updated.isoformat(),
            "expires": r.whois.expires.isoformat(),
        },
        "pdns_change_count": r.pdns_change_count,
        "communication": None if r.communication is None else {
            "countries": list(r.communication.countries),
            "asns": list(r.communication.asns),
        },
        "certificate": None if r.certificate is None else {
            "valid": r.certificate.valid,
            "updated": r.certificate.updated,
            "expires": r.certificate.expires,
        },
    }


def _int(value, name: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValueError(f"{name} must be an integer")
    return value


def record_from_dict(d: dict) -> DomainRecord:
    """Build a record from its JSON form; raises ``ValueError``/``KeyError``/``TypeError`` on bad shape."""
    labels = {"benign": Label.BENIGN, "malicious": Label.MALICIOUS}
    if d["label"] not in labels:
        raise ValueError(f"unknown label {d['label']!r}")
    w = d.get("whois")
    c = d.get("communication")
    cert = d.get("certificate")
    return DomainRecord(
        url=str(d["url"]),
        domain=str(d["domain"]),
        label=labels[d["label"]],
        dns=tuple(
            DnsSnapshot(str(s["ip"]), str(s["country"]), _int(s["ttl"], "ttl"), _int(s["observed_at"], "observed_at"))
            for s in d.get("dns", [])
        ),
        whois=None if w is None else WhoisInfo(
            dt.date.fromisoformat(w["created"]),
            dt.date.fromisoformat(w["updated"]),
            dt.date.fromisoformat(w["expires"]),
        ),
        pdns_change_count=_int(d.get("pdns_change_count", 0), "pdns_change_count"),
        communication=None if c is None else CommunicationProfile(
            tuple(str(x) for x in c.get("countries", [])),
            tuple(_int(x, "asn") for x in c.get("asns", [])),
        ),
        certificate=None if cert is None else CertificateInfo(
            _int(cert["valid"], "valid"), _int(cert["updated"], "updated"), _int(cert["expires"], "expires")
        ),
    )


def _header() -> str:
    return json.dumps({"schema": RECORDS_SCHEMA, "version": RECORDS_VERSION}, sort_keys=True)


def dumps_records(records: Iterable[DomainRecord]) -> str:
    lines = [_header()]
    lines.extend(json.dumps(record_to_dict(r), separators=(",", ":")) for r in records)
    return "\n".join(lines) + "\n"


def save_records(records: Iterable[DomainRecord], path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps_records(records))


@dataclass(frozen=True)
class LineError:
    line: int  # 1-based line number in the file
    message: str


@dataclass
class LoadResult:
    records: list[DomainRecord] = field(default_factory=list)
    errors: list[LineError] = field(default_factory=list)

    def error_report(self) -> str:
        return "".join(f"line {e.line}: {e.message}\n" for e in self.errors)


def loads_records(text: str) -> LoadResult:
    lines = text.splitlines()
    result = LoadResult()
    if not any(ln.strip() for ln in lines):
        return result
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError:
        raise SchemaError("first line is not a JSON header") from None
    if not isinstance(header, dict) or header.get("schema") != RECORDS_SCHEMA:
        raise SchemaError("missing records header")
    if header.get("version") != RECORDS_VERSION:
        raise SchemaError(f"unsupported records version {header.get('version')}")

    for number, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        try:
            record = record_from_dict(json.loads(line))
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            result.errors.append(LineError(number, f"unparseable record: {exc!r}"))
            continue
        problems = validate_record(record)
        if problems:
            result.errors.append(LineError(number, "; ".join(problems)))
            continue
        result.records.append(record)
    return result


def load_records(path: str | os.PathLike) -> LoadResult:
    with open(path, encoding="utf-8") as fh:
        return loads_records(fh.read())


# -- splitting ----------------------------------------------------------------


@dataclass(frozen=True)
class DatasetSplit:
    """Index sets: ratio tables are built from ``ratio_pool`` only; models use ``model_pool``.

    ``train`` and ``test`` partition ``model_pool``.
    """

    ratio_pool: np.ndarray
    model_pool: np.ndarray
    train: np.ndarray
    test: np.ndarray


def _quota(class_sizes: Sequence[int], fraction: float) -> list[int]:
    """Largest-remainder allocation of ``round(n * fraction)`` across classes."""
    total = int(round(sum(class_sizes) * fraction))
    exact = [n * fraction for n in class_sizes]
    base = [int(np.floor(e)) for e in exact]
    order = sorted(range(len(exact)), key=lambda c: (-(exact[c] - base[c]), c))
    for c in order[: total - sum(base)]:
        base[c] += 1
    return base


def stratified_take(labels: np.ndarray, fraction: float, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Split row positions into (selected, rest) with ``fraction`` of every class selected."""
    labels = np.asarray(labels)
    classes = np.unique(labels)
    members = [np.flatnonzero(labels == c) for c in classes]
    quota = _quota([len(m) for m in members], fraction)
    chosen, rest = [], []
    for m, q in zip(members, quota):
        perm = rng.permutation(m)
        chosen.append(perm[:q])
        rest.append(perm[q:])
    return np.sort(np.concatenate(chosen)), np.sort(np.concatenate(rest))


def split(
    records: Sequence[DomainRecord] | np.ndarray,
    ratio_pool_fraction: float = 0.75,
    seed: int = 0,
    train_fraction: float = 0.75,
) -> DatasetSplit:
    """Stratified split into ratio pool and model pool, then train/test inside the model pool.

    ``records`` may also be an array of 0/1 labels.
    """
    if not 0 < ratio_pool_fraction < 1 or not 0 < train_fraction < 1:
        raise InvalidInputError("fractions must lie in (0, 1)")
    if len(records) and isinstance(records[0], DomainRecord):
        labels = np.array([int(r.label) for r in records])
    else:
        labels = np.asarray(records, dtype=np.int64)
    counts = np.bincount(labels, minlength=2)
    if counts.min() < 2:
        raise InvalidInputError(f"too few records of one class: {counts.tolist()}")
    rng = np.random.default_rng(seed)
    ratio_pool, model_pool = stratified_take(labels, ratio_pool_fraction, rng)
    train_pos, test_pos = stratified_take(labels[model_pool], train_fraction, rng)
    return DatasetSplit(ratio_pool, model_pool, model_pool[train_pos], model_pool[test_pos])
