# Tests for the verification battery and campaigns

import pytest

from config import load_settings
from enumeration import GuardExceeded
from semigroup import FiberCheckError, InvariantViolation
import verify
from verify import (
    FAILED,
    IDENTITY_IDS,
    OK,
    SKIPPED,
    THEOREM_IDS,
    BadConfig,
    Battery,
    CampaignConfig,
    check_pair,
    comparator_selftest,
    flipped_table,
    pair_seed,
    run_campaign,
)
from window import FieldError


@pytest.fixture(scope="module")
def cusp_report(cusp):
    return check_pair(cusp, cusp)


@pytest.fixture(scope="module")
def small_campaign():
    """Every ordered pair of k[[t]] and <2,3>"""
    return run_campaign(CampaignConfig(max_genus=1))


# Test 1: Battery bookkeeping
def test_battery_statuses():
    """Test: equal values pass, unequal fail, errors fail with a reason"""
    bat = Battery("demo")

    assert bat.run("same", lambda: (3, 3)).status == OK
    assert bat.run("different", lambda: (3, 4)).status == FAILED

    def broken():
        raise FiberCheckError("boom")

    item = bat.run("broken", broken)
    assert item.status == FAILED
    assert item.reason == "FiberCheckError: boom"

    skipped = bat.skip("later", "not applicable")
    assert skipped.status == SKIPPED
    assert skipped.reason == "not applicable"


# Test 2: Missing items are reported, never dropped
def test_battery_collect():
    """Test: An id nobody evaluated comes back as failed"""
    bat = Battery("demo")
    bat.run("a", lambda: (1, 1))

    items = bat.collect(("a", "b"), "identity")
    assert [item.status for item in items] == [OK, FAILED]
    assert items[1].reason == "not evaluated"


# Test 3: Extra values ride along
def test_battery_extra():
    """Test: A third returned value lands in extra"""
    bat = Battery("demo")
    item = bat.run("with_extra", lambda: (1, 1, {"note": "x"}))

    assert item.extra == {"note": "x"}
    assert item.to_dict()["extra"] == {"note": "x"}
    theorem = bat.theorem("t", lambda: (True, False))
    assert list(theorem.to_dict()) == ["id", "status", "predicted", "direct", "reason"]


# Test 4: Configuration checks
def test_campaign_config():
    """Test: Bad jobs, genus and field values are refused"""
    with pytest.raises(BadConfig):
        CampaignConfig(jobs=0)
    with pytest.raises(BadConfig):
        CampaignConfig(retries=-1)
    with pytest.raises(GuardExceeded):
        CampaignConfig(max_genus=21)
    with pytest.raises(FieldError):
        CampaignConfig(field="complex")

    config = CampaignConfig(window=40, neg_offset=6)
    assert config.overrides == {"N": 40, "D": 6}


# Test 5: Settings feed the configuration; None leaves them alone
def test_config_from_settings(monkeypatch):
    """Test: FIBERCHECK_* variables are used unless a flag overrides them"""
    monkeypatch.setenv("FIBERCHECK_MAX_GENUS", "3")
    monkeypatch.setenv("FIBERCHECK_SEED", "9")
    settings = load_settings()

    config = CampaignConfig.from_settings(settings, max_genus=None, seed=5)
    assert config.max_genus == 3
    assert config.seed == 5


# Test 6: Per-pair seeds are deterministic
def test_pair_seed():
    """Test: Same inputs give the same seed; order matters"""
    assert pair_seed(0, (2, 3), (3, 4, 5)) == pair_seed(0, (2, 3), (3, 4, 5))
    assert pair_seed(0, (2, 3), (3, 4, 5)) != pair_seed(0, (3, 4, 5), (2, 3))
    assert pair_seed(0, (2, 3), (2, 3)) != pair_seed(1, (2, 3), (2, 3))


# Test 7: Full battery on the double cusp
def test_double_cusp_battery(cusp_report):
    """Test: Every applicable item passes for <2,3> x <2,3>"""
    report = cusp_report

    assert [item.id for item in report.identities] == list(IDENTITY_IDS)
    assert [item.id for item in report.theorems] == list(THEOREM_IDS)
    assert report.failures == []
    assert report.item("double_cusp_type").status == OK
    assert report.item("type_sum_plus_one").status == OK
    assert report.item("almost_gorenstein_product").status == OK
    assert report.item("self_product").status == OK
    assert report.window["stable"]
    print(f"✅ {report.checks} checks passed on the double cusp!")


# Test 8: Items that do not apply are skipped with a reason
def test_double_cusp_skips(cusp_report):
    """Test: DVR items and one-sided trace items are skipped for two Gorenstein branches"""
    for item_id in ("dvr_type", "dvr_trace", "trace_absorbs_socle(left)", "field_agreement"):
        item = cusp_report.item(item_id)
        assert item.status == SKIPPED
        assert item.reason


# Test 9: One DVR branch
def test_dvr_battery(naturals, h345):
    """Test: The DVR-specific items run and pass for k[[t]] x <3,4,5>"""
    report = check_pair(naturals, h345)

    assert report.failures == []
    for item_id in ("dvr_type", "dvr_socle_colon", "dvr_witness_inverse", "dvr_trace_ideal"):
        assert report.item(item_id).status == OK, item_id
    assert report.item("almost_gorenstein_dvr").status == OK
    assert report.canonical["provenance"] == "dvr_construction"


# Test 10: DVR next to a Gorenstein ring
def test_dvr_with_gorenstein(naturals, cusp):
    """Test: The stabilization items are skipped when the other ring is Gorenstein"""
    report = check_pair(naturals, cusp)

    assert report.failures == []
    assert report.item("dvr_powers_stable").status == SKIPPED
    assert report.item("dvr_trace_colength").status == SKIPPED


# Test 11: A broken pair still produces a full report
def test_broken_pair(cusp):
    """Test: A window override below the bound fails every item instead of raising"""
    report = check_pair(cusp, cusp, CampaignConfig(window=5))

    assert report.classification is None
    assert len(report.failures) == len(IDENTITY_IDS) + len(THEOREM_IDS)
    assert "BadOverride" in report.failures[0].reason
    assert report.window == {"N": None, "D": None, "stable": False}


# Test 12: Timings stay out of the JSON form
def test_timings_not_serialized(cusp):
    """Test: record_timings fills timings but to_dict leaves them out"""
    report = check_pair(cusp, cusp, CampaignConfig(record_timings=True, window=5))

    assert "seconds" in report.timings
    assert "timings" not in report.to_dict()


# Test 13: A small campaign
def test_small_campaign(small_campaign):
    """Test: 2 semigroups, 4 ordered pairs, nothing fails"""
    summary = small_campaign.summary()

    assert summary["semigroups"] == 2
    assert summary["pairs"] == 4
    assert summary["failures"] == 0
    assert summary["counterexamples"] == []
    assert summary["symmetry_failures"] == []
    assert summary["comparator_selftest"] == {"pairs": 4, "caught": 4, "ok": True}
    assert summary["dvr_construction"]["pairs"] == 2
    assert [rep.pair for rep in small_campaign.reports] == [
        ((1,), (1,)), ((1,), (2, 3)), ((2, 3), (1,)), ((2, 3), (2, 3)),
    ]
    print("✅ Small campaign is clean!")


# Test 14: The comparator catches a flipped table
def test_comparator_selftest(small_campaign):
    """Test: Flipping every predicted flag is always caught"""
    rep = small_campaign.reports[0]
    flipped = flipped_table(rep.predicted)

    assert all(flipped[name] != rep.predicted[name] for name in flipped)
    assert comparator_selftest(small_campaign.reports)["ok"]
    assert comparator_selftest([]) == {"pairs": 0, "caught": 0, "ok": True}


# Test 15: Campaign JSON layout
def test_campaign_dict(small_campaign):
    """Test: meta, pairs and summary in that order"""
    data = small_campaign.to_dict()

    assert list(data) == ["meta", "pairs", "summary"]
    assert data["meta"]["field"] == "rational"
    assert data["meta"]["max_genus"] == 1
    assert len(data["pairs"]) == 4


# Test 16: Excluding the DVR
def test_exclude_dvr():
    """Test: include_dvr=False leaves only <2,3> x <2,3>"""
    result = run_campaign(CampaignConfig(max_genus=1, include_dvr=False))

    assert result.summary()["pairs"] == 1
    assert result.failures == 0


# Test 17: Every pair of genus <= 3
def test_genus_three_campaign():
    """Test: 64 ordered pairs, no failures, and the DVR construction never falls back to search"""
    result = run_campaign(CampaignConfig(max_genus=3))
    summary = result.summary()

    assert summary["semigroups"] == 8
    assert summary["pairs"] == 64
    assert summary["failures"] == 0
    assert summary["comparator_selftest"]["ok"]
    assert summary["dvr_construction"] == {"pairs": 14, "hits": 14, "search_fallbacks": 0}

    regular = next(rep for rep in result.reports if rep.pair == ((3, 4, 5), (4, 5, 6, 7)))
    for item_id in ("type_sum_plus_one", "canonical_colon_maximal", "maximal_times_canonical",
                    "canonical_colength", "fiber_trace_ideal", "trace_absorbs_socle(left)",
                    "trace_stable_iff_powers_stable(right)"):
        assert regular.item(item_id).status == OK, item_id
    assert regular.item("almost_gorenstein_product").status == OK
    assert regular.item("nearly_gorenstein").status == OK
    print(f"✅ {summary['checks']} checks passed over {summary['pairs']} pairs!")


# Test 18: Rational and prime-field runs agree
def test_cross_field(h345, h378):
    """Test: <3,4,5> x <3,7,8> classifies the same over Q and modulo 2147483647"""
    report = check_pair(h345, h378, CampaignConfig(cross_field=True))

    assert report.failures == []
    assert report.item("field_agreement").status == OK
    assert report.item("two_almost_gorenstein").status == OK
    assert report.item("fiber_trace_ideal").status == OK
    assert report.direct["two_almost_gorenstein"]
    assert not report.direct["almost_gorenstein"]


# Test 19: Internal invariant errors end up in the report
def test_invariant_violation_reported(monkeypatch, cusp):
    """Test: check_pair records an InvariantViolation on every item instead of raising"""
    def broken(W, config, seed):
        raise InvariantViolation("powers start at 1")

    monkeypatch.setattr(verify, "_battery_in_window", broken)
    report = check_pair(cusp, cusp)

    assert report.classification is None
    assert len(report.failures) == len(IDENTITY_IDS) + len(THEOREM_IDS)
    assert "InvariantViolation" in report.failures[0].reason
