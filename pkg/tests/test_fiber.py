# Tests for fiber products, their canonical ideals and the direct/predicted classification

import pytest

from fiber import (
    PROBES_PER_FAMILY,
    NotApplicable,
    analyze_pair,
    build_fiber,
    canonical_dvr,
    canonical_lemma42,
    canonical_search,
    fiber_in_window,
    flags_agree,
    negative_controls,
    predicted_flags,
    unshifted_dvr_candidate,
    validate_canonical,
    with_window_retries,
)
from semigroup import FLAG_ORDER, classify_ring
from window import LEFT, RIGHT, PrecisionExhausted, contains, iso_test


# Test 1: Local structure of the double cusp
def test_fiber_structure(cusp_fiber):
    """Test: v and e add up, and B/A has length 1"""
    F = cusp_fiber

    assert F.invariants.v == 4
    assert F.invariants.e == 4
    assert F.invariants.r == 3
    assert F.additivity() == {"v": (4, 4), "e": (4, 4)}
    assert F.dvr_branches == []
    print("✅ The double cusp has v = e = 4!")


# Test 2: Additivity on a mixed pair
def test_additivity_mixed(cusp, h345):
    """Test: <2,3> x <3,4,5> has v = 5 and e = 5"""
    F = build_fiber(cusp, h345)

    assert F.invariants.v == 5
    assert F.invariants.e == 5


# Test 3: Window retries
def test_window_retries(cusp):
    """Test: PrecisionExhausted enlarges the window by (16, 8) and tries again"""
    seen = []

    def job(W):
        seen.append((W.N, W.D))
        if len(seen) == 1:
            raise PrecisionExhausted("too small")
        return W.N

    assert with_window_retries(cusp, cusp, "rational", None, 2, job) == 33
    assert seen == [(17, 3), (33, 11)]

    def always(W):
        raise PrecisionExhausted("never enough")

    with pytest.raises(PrecisionExhausted):
        with_window_retries(cusp, cusp, "rational", None, 0, always)


# Test 4: The product construction on two cusps
def test_lemma42_cusps(cusp_fiber):
    """Test: The two-branch canonical ideal validates and sits between A and Abar"""
    canon = canonical_lemma42(cusp_fiber)

    assert canon.provenance == "lemma42"
    assert canon.normalized
    assert canon.validation.passed
    assert canon.validation.probes == 5 + 2 * PROBES_PER_FAMILY
    assert contains(canon.X, cusp_fiber.B)
    assert contains(cusp_fiber.Abar, canon.X)


# Test 5: Constructions refuse the wrong pair shape
def test_construction_guards(cusp_fiber, naturals, h345):
    """Test: lemma42 needs two non-DVRs and the DVR construction needs exactly one DVR"""
    with pytest.raises(NotApplicable):
        canonical_dvr(cusp_fiber)

    F = build_fiber(naturals, h345)
    with pytest.raises(NotApplicable):
        canonical_lemma42(F)


# Test 6: Non-canonical candidates fail the battery
def test_negative_controls(cusp_fiber):
    """Test: A, B and Abar are all rejected as canonical ideals"""
    reports = negative_controls(cusp_fiber)

    assert set(reports) == {"A", "B", "Abar"}
    for name, report in reports.items():
        assert not report.passed, name
    print("✅ Negative controls are rejected!")


# Test 7: Classification of the double cusp
def test_classify_double_cusp(cusp_pair):
    """Test: <2,3> x <2,3> has type 3, is AG, and both sides agree"""
    cls = cusp_pair.classification

    assert cls.r == 3
    assert cls.flags["almost_gorenstein"]
    assert not cls.flags["gorenstein"]
    assert cls.len_K_mod_R == 2
    assert cls.details["ag_equality"] is True
    assert cls.details["ag_isomorphism"] is True
    assert cls.details["provenance"] == "lemma42"
    assert cls.agree
    assert cls.mismatches() == []


# Test 8: One DVR branch uses the normalized construction
def test_dvr_construction(dvr_pair):
    """Test: k[[t]] x <3,4,5> gets a witness with z = 2 and rho = 1 + s^2"""
    canon = dvr_pair.canonical
    cls = dvr_pair.classification

    assert canon.provenance == "dvr_construction"
    assert canon.normalized
    assert canon.witness.other == RIGHT
    assert canon.witness.z == 2
    assert sorted(canon.witness.rho) == [0, 2]
    assert canon.witness.to_dict(dvr_pair.fiber.window) == {
        "branch": "right",
        "z": 2,
        "rho": {"0": "1", "2": "1"},
    }
    assert cls.r == 3
    assert cls.flags["almost_gorenstein"]
    assert cls.agree
    print("✅ DVR construction produced a witness!")


# Test 9: The DVR may sit on the left or the right
def test_dvr_on_the_left(naturals, h345):
    """Test: <3,4,5> x k[[s]] mirrors the witness to the left branch"""
    analysis = analyze_pair(h345, naturals)

    assert analysis.canonical.provenance == "dvr_construction"
    assert analysis.canonical.witness.other == LEFT
    assert analysis.classification.r == 3
    assert analysis.classification.agree


# Test 10: DVR next to a Gorenstein ring
def test_dvr_with_cusp(naturals, cusp):
    """Test: k[[t]] x <2,3> has type 2 and is AG"""
    cls = analyze_pair(naturals, cusp).classification

    assert cls.r == 2
    assert cls.flags["almost_gorenstein"]
    assert not cls.flags["gorenstein"]
    assert cls.agree


# Test 11: Two DVRs give a Gorenstein ring
def test_two_dvrs(naturals):
    """Test: k[[t]] x k[[s]] is Gorenstein; its canonical ideal is found by search"""
    analysis = analyze_pair(naturals, naturals)
    cls = analysis.classification

    assert analysis.canonical.provenance == "search"
    assert cls.r == 1
    assert cls.flags["gorenstein"]
    assert cls.agree


# Test 12: Neither side AG
def test_non_ag_pair(h378):
    """Test: <3,7,8> x <3,7,8> is neither AG nor NG, as predicted"""
    cls = analyze_pair(h378, h378).classification

    assert not cls.flags["almost_gorenstein"]
    assert not cls.flags["nearly_gorenstein"]
    assert cls.agree


# Test 13: Type and colength of the product construction
def test_type_and_colength(h345):
    """Test: <3,4,5> x <3,4,5> has type 2+2+1 and ℓ(X/A) = 1+1+2"""
    analysis = analyze_pair(h345, h345)
    cls = analysis.classification

    assert cls.r == 5
    assert cls.len_K_mod_R == 4
    assert cls.flags["almost_gorenstein"]
    assert cls.agree


# Test 14: Predicted flags from the branch classifications
def test_predicted_flags(h378, h345, cusp, naturals):
    """Test: The prediction table on a few pairs"""
    c378, c345 = classify_ring(h378), classify_ring(h345)

    mixed = predicted_flags(c378, c345)
    assert not mixed["almost_gorenstein"]
    assert mixed["two_almost_gorenstein"]
    assert not mixed["nearly_gorenstein"]
    assert not mixed["is_dvr"]

    assert predicted_flags(classify_ring(naturals), classify_ring(naturals))["gorenstein"]
    assert not predicted_flags(classify_ring(cusp), classify_ring(cusp))["gorenstein"]
    assert not predicted_flags(c378, c378)["two_almost_gorenstein"]


# Test 15: Flag comparison
def test_flags_agree():
    """Test: One differing flag is enough to disagree"""
    base = {name: False for name in FLAG_ORDER}
    flipped = dict(base, nearly_gorenstein=True)

    assert flags_agree(base, dict(base))
    assert not flags_agree(base, flipped)


# Test 16: JSON form of a classification
def test_classification_dict(cusp_pair):
    """Test: Keys come out in a fixed order"""
    data = cusp_pair.classification.to_dict()

    assert list(data) == ["gens", "e", "v", "r", "lengths", "direct", "predicted", "agree", "details"]
    assert data["gens"] == [[2, 3], [2, 3]]
    assert list(data["lengths"]) == ["X_mod_A", "A_mod_c"]
    assert list(data["direct"]) == list(FLAG_ORDER)


# Test 17: Search lands on the same canonical ideal as the product construction
def test_search_matches_lemma42(h345, h378):
    """Test: For <3,4,5> x <3,7,8> the searched X is isomorphic to the constructed one"""
    def job(W):
        F = fiber_in_window(W)
        found = canonical_search(F)
        built = canonical_lemma42(F)
        return found, built, iso_test(W, found.X, built.X, seed=5)

    found, built, (same, q) = with_window_retries(h345, h378, "rational", None, 4, job)

    assert found.provenance == "search"
    assert found.normalized
    assert found.validation.passed
    assert same
    assert q is not None
    print("✅ Search and construction agree up to isomorphism!")


# Test 18: The unshifted DVR candidate is not canonical
def test_unshifted_dvr_candidate(dvr_pair, cusp_fiber):
    """Test: A + (m x L) fails the battery for k[[t]] x <3,4,5>, and joins the controls"""
    F = dvr_pair.fiber
    report = validate_canonical(F, unshifted_dvr_candidate(F))

    assert not report.passed
    assert "endomorphisms" in report.failures()

    controls = negative_controls(F)
    assert set(controls) == {"A", "B", "Abar", "A+(m x L)"}
    for name, rep in controls.items():
        assert not rep.passed, name

    with pytest.raises(NotApplicable):
        unshifted_dvr_candidate(cusp_fiber)
