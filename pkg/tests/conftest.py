import datetime as dt

import numpy as np
import pytest

from robustdomain.model import (
    CertificateInfo,
    CommunicationProfile,
    DnsSnapshot,
    DomainRecord,
    Label,
    WhoisInfo,
)

# Lines collected by the acceptance module and echoed in the terminal summary.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def snap(ip="1.1.1.1", country="US", ttl=300, t=0):
    return DnsSnapshot(ip, country, ttl, t)


def make_record(
    domain="example.com",
    label=Label.BENIGN,
    dns=(),
    whois=None,
    pdns=0,
    countries=None,
    asns=None,
    certificate=None,
):
    comm = None
    if countries is not None or asns is not None:
        comm = CommunicationProfile(tuple(countries or ()), tuple(asns or ()))
    return DomainRecord(
        url=f"https://{domain}/",
        domain=domain,
        label=label,
        dns=tuple(dns),
        whois=whois,
        pdns_change_count=pdns,
        communication=comm,
        certificate=certificate,
    )


@pytest.fixture
def worked_record():
    dns = [snap("1.1.1.1", "Australia", 60, i) for i in range(20)]
    dns += [snap("2.2.2.2", "France", 1200, 20 + i) for i in range(10)]
    return make_record(
        domain="ariel-cyber.co.il",
        dns=dns,
        whois=WhoisInfo(dt.date(2015, 5, 14), dt.date(2018, 6, 4), dt.date(2020, 5, 14)),
        pdns=26,
        countries=["US", "US", "DE"],
        asns=[15169],
        certificate=CertificateInfo(1, 0, 90 * 86400),
    )


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
