"""Activity-library loading, validation, and keyword queries."""

import json

import pytest

from lessonforge.errors import DuplicateActivityId, EmptyPhase, ParseError, UnknownLibrary
from lessonforge.library import (
    PhaseCategory,
    list_by_phase,
    load_library,
    match_keywords,
    tokenize,
)


def test_welding_bundle_has_27_unique_descriptors(welding):
    assert len(welding) == 27
    ids = [d.activity_id for d in welding.descriptors]
    assert len(set(ids)) == 27


def test_every_phase_non_empty_in_both_bundles(welding, demo):
    for bundle in (welding, demo):
        for phase in PhaseCategory:
            assert list_by_phase(bundle, phase), (bundle.library_id, phase)


def test_demo_bundle_has_12_descriptors(demo):
    assert len(demo) == 12


def test_phases_partition_the_bundle(welding):
    seen = []
    for phase in PhaseCategory:
        for descriptor in list_by_phase(welding, phase):
            assert descriptor.phase is phase
            seen.append(descriptor.activity_id)
    assert sorted(seen) == sorted(d.activity_id for d in welding.descriptors)


def test_list_by_phase_preserves_library_order(welding):
    introduction = list_by_phase(welding, PhaseCategory.INTRODUCTION)
    positions = [welding.descriptors.index(d) for d in introduction]
    assert positions == sorted(positions)


def test_phase_colors_are_distinct_and_fixed():
    colors = {phase.color for phase in PhaseCategory}
    assert len(colors) == 4


def test_match_keywords_finds_every_safety_descriptor(welding):
    matched = match_keywords(welding, ["safety"])
    expected = [d for d in welding.descriptors if "safety" in d.keywords]
    assert sorted(d.activity_id for d in matched) == sorted(d.activity_id for d in expected)
    assert matched  # the bundle does teach safety


def test_match_keywords_rank_is_stable_and_pure(welding):
    first = match_keywords(welding, ["mig", "welding", "safety"])
    second = match_keywords(welding, ["mig", "welding", "safety"])
    assert [d.activity_id for d in first] == [d.activity_id for d in second]


def test_match_keywords_no_overlap_returns_empty(welding):
    assert match_keywords(welding, ["zzz"]) == []


def test_tokenize_lowercases_and_splits_punctuation():
    assert tokenize("Learn MIG-welding, fast!") == ["learn", "mig", "welding", "fast"]


def test_load_serialize_reload_round_trip(tmp_path, welding):
    path = tmp_path / "copy.json"
    path.write_text(json.dumps(welding.to_payload()), "utf-8")
    again = load_library(path)
    assert again.to_payload() == welding.to_payload()


def test_duplicate_activity_id_reported_with_line(tmp_path, welding):
    payload = welding.to_payload()
    payload["descriptors"].append(payload["descriptors"][0])
    path = tmp_path / "dup.json"
    path.write_text(json.dumps(payload, indent=1), "utf-8")
    with pytest.raises(DuplicateActivityId) as excinfo:
        load_library(path)
    assert "mig-welding-overview" in str(excinfo.value)
    assert ":" in str(excinfo.value)  # carries file/line context


def test_missing_phase_rejected(tmp_path, welding):
    payload = welding.to_payload()
    payload["descriptors"] = [d for d in payload["descriptors"]
                              if d["phase"] != "application"]
    path = tmp_path / "nophase.json"
    path.write_text(json.dumps(payload), "utf-8")
    with pytest.raises(EmptyPhase):
        load_library(path)


def test_invalid_json_reports_parse_error(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json", "utf-8")
    with pytest.raises(ParseError):
        load_library(path)


def test_bad_schema_version_rejected(tmp_path, welding):
    payload = welding.to_payload()
    payload["schemaVersion"] = 99
    path = tmp_path / "badver.json"
    path.write_text(json.dumps(payload), "utf-8")
    with pytest.raises(ParseError):
        load_library(path)


def test_uppercase_keywords_rejected(tmp_path, welding):
    payload = welding.to_payload()
    payload["descriptors"][0]["keywords"] = ["Safety"]
    path = tmp_path / "upper.json"
    path.write_text(json.dumps(payload), "utf-8")
    with pytest.raises(ParseError):
        load_library(path)


def test_nonpositive_default_timing_rejected(tmp_path, welding):
    payload = welding.to_payload()
    payload["descriptors"][0]["defaultProperties"]["timingSeconds"] = 0
    path = tmp_path / "timing.json"
    path.write_text(json.dumps(payload), "utf-8")
    with pytest.raises(ParseError):
        load_library(path)


def test_unknown_source_raises(tmp_path):
    with pytest.raises(UnknownLibrary):
        load_library(tmp_path / "missing.json")
