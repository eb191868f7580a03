# Cross-checks between the degree-set classifier and the brute-force oracle
# The oracle evaluates every definition literally on Python sets

import pytest

from enumeration import enumerate_semigroups
from oracle import DegreeWindow, oracle_classify
from semigroup import FLAG_ORDER, classify_ring

SEMIGROUPS = enumerate_semigroups(12)


def _label(H):
    return str(H)


# Test 1: The oracle on hand-checked examples
def test_oracle_examples():
    """Test: Does the oracle agree with the values worked out by hand?"""
    brute = oracle_classify([3, 7, 8])
    assert brute["r"] == 2
    assert brute["len_K_mod_R"] == 2
    assert brute["len_R_mod_c"] == 2
    assert not brute["almost_gorenstein"]
    assert brute["two_almost_gorenstein"]

    brute = oracle_classify([3, 4, 5])
    assert brute["almost_gorenstein"]
    assert brute["nearly_gorenstein"]
    assert not brute["two_almost_gorenstein"]
    print("✅ Oracle matches the hand computations!")


# Test 2: Every flag agrees up to genus 12
@pytest.mark.parametrize("H", SEMIGROUPS, ids=_label)
def test_oracle_agrees_with_classifier(H):
    """Test: Same flags, type and lengths from both classifiers"""
    cls = classify_ring(H)
    brute = oracle_classify(H.generators)

    for name in FLAG_ORDER:
        assert cls.flags[name] == brute[name], name
    assert cls.r == brute["r"]
    assert cls.len_K_mod_R == brute["len_K_mod_R"]
    assert cls.len_R_mod_c == brute["len_R_mod_c"]


# Test 3: Equivalent forms of AG and 2-AG
@pytest.mark.parametrize("H", SEMIGROUPS, ids=_label)
def test_equivalent_forms(H):
    """Test: AG from the gaps, and 2-AG from the powers of K"""
    brute = oracle_classify(H.generators)

    assert brute["almost_gorenstein"] == brute["almost_gorenstein_gaps"]
    assert brute["two_almost_gorenstein"] == brute["two_almost_gorenstein_powers"]


# Test 4: Implications between the classes
@pytest.mark.parametrize("H", SEMIGROUPS, ids=_label)
def test_flag_implications(H):
    """Test: Gorenstein => AG => GGL and NG; AG excludes 2-AG"""
    f = classify_ring(H).flags

    if f["gorenstein"]:
        assert f["almost_gorenstein"]
    if f["almost_gorenstein"]:
        assert f["generalized_gorenstein"]
        assert f["nearly_gorenstein"]
        assert not f["two_almost_gorenstein"]


# Test 5: The window arithmetic of the oracle itself
def test_degree_window():
    """Test: Sums and colons of the truncated sets"""
    win = DegreeWindow(-4, 12)
    R = win.make(lambda z: z in (0, 3) or z >= 5)
    N = win.make(lambda z: z >= 0)

    assert win.plus(R, R) == win.make(lambda z: z in (0, 3) or z >= 5)
    assert win.colon(R, N) == win.make(lambda z: z >= 5)
    assert win.length(N, R) == 3


# Test 6: Non-Gorenstein AG means the conductor is the maximal ideal
@pytest.mark.parametrize("H", SEMIGROUPS, ids=_label)
def test_ag_conductor(H):
    """Test: For non-Gorenstein H, AG holds exactly when ℓ(R/c) = 1"""
    cls = classify_ring(H)
    if cls.gorenstein:
        assert cls.len_R_mod_c == 0
    else:
        assert cls.almost_gorenstein == (cls.len_R_mod_c == 1)
