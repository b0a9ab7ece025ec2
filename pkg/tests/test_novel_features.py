import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from robustdomain.errors import InvalidInputError
from robustdomain.model import CertificateInfo, Label
from robustdomain.novel_features import (
    car,
    ccr,
    communication_rank,
    extract_novel,
    pdns_changes,
    ssl_remaining,
)
from robustdomain.ratio_tables import RatioTable, TableEntry, TableKind, TablePair

from conftest import make_record

EPS = 1e-6
UNSEEN = math.log(0.75 + EPS) / math.log(0.5)


def table(kind, rows, threshold=1):
    """Table from ``item -> (benign, malicious)``."""
    top = max(b + m for b, m in rows.values())
    entries = {k: TableEntry(b, m, b / (b + m), (b + m) / top) for k, (b, m) in sorted(rows.items())}
    return RatioTable(TableKind(kind), entries, threshold, top)


COUNTRIES = table("countries", {"US": (90, 10), "RU": (5, 45), "DE": (50, 0), "KP": (0, 20)})
ASNS = table("asns", {1: (100, 0), 2: (1, 9)})


def direct_rank(items, t, eps=EPS):
    total = 0.0
    for x in items:
        e = t.entries.get(x)
        ratio, norm = (e.benign_ratio, e.norm) if e else (0.75, 1.0)
        total += math.log(ratio + eps, 0.5) / norm
    return total


def test_empty_list_is_zero():
    assert communication_rank([], COUNTRIES) == 0.0


def test_single_unseen_item():
    assert communication_rank(["ZZ"], COUNTRIES, EPS) == pytest.approx(0.41504, abs=1e-4)


def test_fully_benign_item_is_near_zero():
    value = communication_rank([1], ASNS)
    assert value == pytest.approx(-1.44e-6, rel=1e-2)


def test_three_unseen_countries():
    r = make_record(countries=["AA", "BB", "CC"])
    assert ccr(r, COUNTRIES) == pytest.approx(3 * UNSEEN) == pytest.approx(1.245, abs=1e-3)


def test_fully_malicious_items_are_large():
    t = table("countries", {"KP": (0, 20)})
    r = make_record(countries=["KP", "KP"])
    assert ccr(r, t) == pytest.approx(2 * math.log(EPS, 0.5))
    assert ccr(r, t) > 39


def test_absent_communication_is_zero():
    r = make_record()
    assert ccr(r, COUNTRIES) == car(r, ASNS) == 0.0


def test_kind_mismatch():
    with pytest.raises(InvalidInputError):
        communication_rank(["US"], ASNS)
    with pytest.raises(InvalidInputError):
        communication_rank([1], COUNTRIES)
    with pytest.raises(InvalidInputError):
        communication_rank(["US"], COUNTRIES, epsilon=0.0)


items = st.lists(st.sampled_from(["US", "RU", "DE", "KP", "ZZ", "XX"]), max_size=30)


@given(items, items)
def test_additive(a, b):
    assert communication_rank(a + b, COUNTRIES) == pytest.approx(
        communication_rank(a, COUNTRIES) + communication_rank(b, COUNTRIES), abs=1e-9
    )


@given(items, st.randoms())
def test_order_free_and_matches_direct_sum(a, rnd):
    shuffled = a[:]
    rnd.shuffle(shuffled)
    assert communication_rank(shuffled, COUNTRIES) == communication_rank(a, COUNTRIES)
    assert communication_rank(a, COUNTRIES) == pytest.approx(direct_rank(a, COUNTRIES), abs=1e-9)


@given(st.integers(1, 50), st.integers(1, 50), st.integers(0, 49))
def test_lower_ratio_ranks_higher(total, other, drop):
    b = min(drop, total - 1)
    hi = table("asns", {7: (total, 0), 8: (other, 0)})
    lo = table("asns", {7: (b, total - b), 8: (other, 0)})
    # same norms, smaller benign ratio for item 7
    assert communication_rank([7], lo) > communication_rank([7], hi)


def test_pdns_passthrough():
    for n in (0, 26, 8):
        assert pdns_changes(make_record(pdns=n)) == n


def test_ssl_remaining():
    assert ssl_remaining(CertificateInfo(0, 0, 10**7)) == 0.0
    assert ssl_remaining(CertificateInfo(1, 100, 100 + 90 * 86400)) == 7_776_000.0
    assert ssl_remaining(CertificateInfo(1, 5, 5)) == 0.0
    assert ssl_remaining(CertificateInfo(1, 10, 5)) == 0.0
    assert ssl_remaining(None) == 0.0


@given(st.integers(0, 1), st.integers(0, 10**9), st.integers(0, 10**9))
def test_ssl_non_negative_and_zero_rule(valid, a, b):
    v = ssl_remaining(CertificateInfo(valid, a, b))
    assert v >= 0
    assert (v == 0) == (valid == 0 or b <= a)


def test_extract_novel(worked_record):
    row = extract_novel(worked_record, TablePair(COUNTRIES, ASNS))
    assert row.ssl_remaining == 7_776_000.0
    assert row.pdns_changes == 26
    assert row.ccr == pytest.approx(direct_rank(["US", "US", "DE"], COUNTRIES), abs=1e-12)
    assert row.car == pytest.approx(direct_rank([15169], ASNS), abs=1e-12)
    assert worked_record.label == Label.BENIGN
