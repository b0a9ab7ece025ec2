import dataclasses
import datetime as dt

import pytest

from robustdomain.model import (
    ALL_COLUMNS,
    BASE_COLUMNS,
    NOVEL_COLUMNS,
    ROBUST_BASE_COLUMNS,
    TTL_MAX,
    CertificateInfo,
    FeatureSetId,
    FeatureVector,
    WhoisInfo,
    normalize_domain,
    validate_record,
)

from conftest import make_record, snap


def test_well_formed_record_has_no_violations(worked_record):
    assert validate_record(worked_record) == []


def test_created_after_expires_is_reported():
    w = WhoisInfo(dt.date(2020, 1, 1), dt.date(2020, 1, 1), dt.date(2019, 1, 1))
    assert validate_record(make_record(whois=w)) == ["whois: created after expires"]


def test_ttl_above_rfc_bound_is_reported():
    r = make_record(dns=[snap(ttl=TTL_MAX + 1)])
    assert validate_record(r) == ["dns[0]: ttl out of range"]


def test_ttl_at_rfc_bound_is_fine():
    assert validate_record(make_record(dns=[snap(ttl=TTL_MAX)])) == []


@pytest.mark.parametrize(
    "domain, problem",
    [
        ("", "domain: empty"),
        ("Example.com", "domain: not lowercase"),
        ("localhost", "domain: missing dot"),
        ("a.b", "domain: shorter than 4 characters"),
    ],
)
def test_domain_rules(domain, problem):
    assert problem in validate_record(make_record(domain=domain))


def test_negative_pdns_and_bad_certificate():
    r = make_record(pdns=-1, certificate=CertificateInfo(1, 100, 50))
    problems = validate_record(r)
    assert "pdns_change_count: negative" in problems
    assert "certificate: expires before updated" in problems


def test_invalid_certificate_window_is_not_checked():
    assert validate_record(make_record(certificate=CertificateInfo(0, 100, 50))) == []


def test_bad_asn_and_country():
    r = make_record(countries=[""], asns=[-3])
    problems = validate_record(r)
    assert any(p.startswith("communication: asn") for p in problems)
    assert any(p.startswith("communication: country") for p in problems)


def test_validate_is_pure(worked_record):
    bad = dataclasses.replace(worked_record, pdns_change_count=-2)
    assert validate_record(bad) == validate_record(bad)


def test_feature_set_cardinalities():
    sizes = {s.value: len(s.columns) for s in FeatureSetId}
    assert sizes == {"B": 9, "BR": 4, "TCP": 4, "BRTCP": 8, "BTCP": 13}


def test_feature_set_structure():
    b = FeatureSetId.B.columns
    br = FeatureSetId.BR.columns
    it = iter(b)
    assert all(c in it for c in br)  # subsequence
    assert not set(br) & set(FeatureSetId.TCP.columns)
    assert FeatureSetId.BRTCP.columns == br + NOVEL_COLUMNS
    assert FeatureSetId.BTCP.columns == BASE_COLUMNS + NOVEL_COLUMNS == ALL_COLUMNS
    assert br == ROBUST_BASE_COLUMNS
    assert "ttl_std" not in br


def test_feature_vector_checks():
    FeatureVector(FeatureSetId.BR, (1.0, 2.0, 3.0, 4.0))
    with pytest.raises(ValueError):
        FeatureVector(FeatureSetId.BR, (1.0, 2.0))
    with pytest.raises(ValueError):
        FeatureVector(FeatureSetId.BR, (1.0, 2.0, 3.0, float("nan")))


@pytest.mark.parametrize(
    "raw, expected",
    [
        ("http://www.ariel-cyber.co.il/about", "ariel-cyber.co.il"),
        ("HTTPS://Example.COM:8443/x?y=1", "example.com"),
        ("www.test.org", "test.org"),
        ("sub.www.test.org", "sub.www.test.org"),
        ("  ", ""),
    ],
)
def test_normalize_domain(raw, expected):
    assert normalize_domain(raw) == expected
