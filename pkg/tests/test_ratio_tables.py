import dataclasses

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from robustdomain.errors import EmptyTableError, InvalidInputError, SchemaError
from robustdomain.model import Label
from robustdomain.ratio_tables import (
    TableKind,
    build_table,
    build_tables,
    dumps_table,
    load_table,
    loads_table,
    lookup,
    save_table,
)

from conftest import make_record

B, M = Label.BENIGN, Label.MALICIOUS


def rec(label, countries=(), asns=()):
    return make_record(label=label, countries=list(countries), asns=list(asns))


profiles = st.lists(
    st.tuples(
        st.sampled_from([B, M]),
        st.lists(st.sampled_from(["US", "DE", "FR", "RU", "CN"]), max_size=6),
        st.lists(st.sampled_from([1, 2, 3, 13335, 15169]), max_size=6),
    ),
    min_size=1,
    max_size=40,
)


def records_from(profile):
    return [rec(lab, c, a) for lab, c, a in profile]


def test_ratio_from_counts():
    records = [rec(B, ["US"]) for _ in range(7)] + [rec(M, ["US"]) for _ in range(3)]
    t = build_table(records, TableKind.COUNTRIES, threshold=5)
    assert t.entries["US"].benign_ratio == 0.7
    assert lookup(t, "US") == (0.7, 1.0, True)


def test_below_threshold_is_absent():
    t = build_table([rec(B, ["US"] * 4), rec(B, ["DE"] * 5)], "countries", threshold=5)
    assert "US" not in t.entries
    assert lookup(t, "US") == (0.75, 1.0, False)


def test_norms_divide_by_max_total():
    t = build_table([rec(B, asns=[1] * 10 + [2] * 40)], "asns", threshold=1)
    assert t.max_occurrences == 40
    assert t.entries[1].norm == 0.25 and t.entries[2].norm == 1.0


def test_unseen_item_uses_prior():
    t = build_table([rec(B, ["US"])], "countries", threshold=1)
    assert lookup(t, "ZZ") == (0.75, 1.0, False)
    assert t.lookup("ZZ") == (0.75, 1.0, False)


def test_repeats_inside_a_record_count_each_time():
    t = build_table([rec(M, ["US", "US", "US"])], "countries", threshold=3)
    assert (t.entries["US"].benign, t.entries["US"].malicious) == (0, 3)


def test_errors():
    with pytest.raises(EmptyTableError):
        build_table([make_record()], "countries")
    with pytest.raises(InvalidInputError):
        build_table([rec(B, ["US"])], "countries", threshold=0)


def test_entries_are_sorted():
    t = build_table([rec(B, ["US", "AR", "DE"])], "countries", threshold=1)
    assert list(t.entries) == ["AR", "DE", "US"]


@settings(max_examples=100)
@given(profiles, st.integers(1, 6))
def test_ratio_invariants(profile, threshold):
    records = records_from(profile)
    for kind in TableKind:
        t = build_table(records, kind, threshold)
        listed = sum(len(r.communication.countries if kind is TableKind.COUNTRIES else r.communication.asns) for r in records)
        stored = sum(e.total for e in t.entries.values())
        assert stored <= listed
        if threshold == 1:
            assert stored == listed
        for e in t.entries.values():
            assert e.total >= threshold
            assert e.benign_ratio + e.malicious_ratio == pytest.approx(1.0, abs=1e-15)
            assert 0.0 < e.norm <= 1.0
            assert e.benign_ratio == e.benign / e.total


@settings(max_examples=100)
@given(profiles, st.integers(1, 4))
def test_label_swap_flips_ratio(profile, threshold):
    records = records_from(profile)
    swapped = [dataclasses.replace(r, label=M if r.label == B else B) for r in records]
    for kind in TableKind:
        t, s = build_table(records, kind, threshold), build_table(swapped, kind, threshold)
        assert t.entries.keys() == s.entries.keys()
        for item, e in t.entries.items():
            assert s.entries[item].benign_ratio == pytest.approx(1.0 - e.benign_ratio, abs=1e-15)


@settings(max_examples=50)
@given(profiles, st.integers(1, 4))
def test_round_trip_is_byte_identical(profile, threshold):
    for t in build_tables(records_from(profile), threshold):
        text = dumps_table(t)
        back = loads_table(text)
        assert back == t
        assert dumps_table(back) == text


def test_rebuild_is_deterministic():
    records = [rec(B, ["US", "DE"], [1, 2]), rec(M, ["DE"], [2])] * 6
    assert dumps_table(build_table(records, "asns", 2)) == dumps_table(build_table(list(records), "asns", 2))


def test_save_load_file(tmp_path):
    t = build_table([rec(B, asns=[7] * 12), rec(M, asns=[7, 8] * 3)], "asns", threshold=7)
    path = tmp_path / "asns.tsv"
    save_table(t, path)
    back = load_table(path)
    assert back.threshold == 7
    assert back == t
    assert path.read_text() == dumps_table(t)


def test_truncated_file_is_rejected():
    t = build_table([rec(B, ["US"] * 3, [1] * 3), rec(M, ["DE"] * 3)], "countries", threshold=1)
    text = dumps_table(t)
    with pytest.raises(SchemaError):
        loads_table(text.splitlines()[0] + "\n")
    with pytest.raises(SchemaError):
        loads_table("")
    with pytest.raises(SchemaError):
        loads_table(text.replace("version=1", "version=9"))
