# Tests for the JSON and CSV report writers

import io

import pandas as pd
import pytest

from reports import campaign_basename, digest, parse_json, render_csv, render_json, summary_frame, write_campaign
from semigroup import FLAG_ORDER
from verify import CampaignConfig, run_campaign


@pytest.fixture(scope="module")
def result():
    return run_campaign(CampaignConfig(max_genus=1, seed=3))


# Test 1: JSON rendering keeps key order and non-ASCII text
def test_render_json():
    """Test: Keys stay in insertion order, ≥ is written as is, output ends in a newline"""
    text = render_json({"b": 1, "a": "{≥3}"})

    assert text.endswith("\n")
    assert text.index('"b"') < text.index('"a"')
    assert "≥" in text
    assert parse_json(text) == {"b": 1, "a": "{≥3}"}


# Test 2: Same result, same bytes
def test_json_is_deterministic(result):
    """Test: Rendering a campaign twice gives the same digest"""
    first = render_json(result.to_dict())
    second = render_json(result.to_dict())

    assert digest(first) == digest(second)
    assert len(digest(first)) == 64


# Test 3: Parallel and serial campaigns agree byte for byte
def test_parallel_matches_serial(result):
    """Test: jobs=2 writes the same JSON as jobs=1"""
    parallel = run_campaign(CampaignConfig(max_genus=1, seed=3, jobs=2))

    assert render_json(parallel.to_dict()) == render_json(result.to_dict())
    print("✅ Parallel campaign is byte-identical!")


# Test 4: Summary table
def test_summary_frame(result):
    """Test: One row per pair with the flag columns"""
    frame = summary_frame(result.reports)

    assert len(frame) == 4
    assert list(frame.columns) == (
        ["left", "right", "e", "v", "r"] + list(FLAG_ORDER)
        + ["agree", "provenance", "checks", "failures", "skipped"]
    )
    assert frame["left"].tolist() == ["1", "1", "2,3", "2,3"]
    assert frame["failures"].sum() == 0


# Test 5: CSV text parses back
def test_render_csv(result):
    """Test: The CSV has a header and four data rows"""
    text = render_csv(result.reports)
    frame = pd.read_csv(io.StringIO(text))

    assert len(frame) == 4
    assert "provenance" in frame.columns


# Test 6: Files on disk
def test_write_campaign(result, tmp_path):
    """Test: campaign_g1_s3.json and .csv are written into the output directory"""
    out = tmp_path / "reports"
    paths = write_campaign(result, str(out), csv=True)

    assert campaign_basename(result) == "campaign_g1_s3"
    assert [p.split("/")[-1] for p in paths] == ["campaign_g1_s3.json", "campaign_g1_s3.csv"]
    data = parse_json((out / "campaign_g1_s3.json").read_text(encoding="utf-8"))
    assert data["meta"]["seed"] == 3
    assert data["summary"]["pairs"] == 4


# Test 7: CSV is optional
def test_write_json_only(result, tmp_path):
    """Test: Without csv=True only the JSON file appears"""
    paths = write_campaign(result, str(tmp_path), csv=False)

    assert len(paths) == 1
    assert not (tmp_path / "campaign_g1_s3.csv").exists()


# Test 8: A full battery report survives JSON
def test_report_round_trip(result):
    """Test: Every pair report reads back from its JSON text unchanged"""
    for rep in result.reports:
        data = rep.to_dict()
        assert parse_json(render_json(data)) == data, rep.pair

    data = result.to_dict()
    assert parse_json(render_json(data)) == data
