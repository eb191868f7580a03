# Tests for the genus-tree enumeration

import pytest

from enumeration import MAX_GENUS_GUARD, GuardExceeded, children, counts_by_genus, enumerate_semigroups


# Test 1: Known counts per genus
def test_counts_by_genus():
    """Test: 1, 1, 2, 4, 7, 12, 23 semigroups of genus 0..6"""
    assert counts_by_genus(6) == [1, 1, 2, 4, 7, 12, 23]
    print("✅ Genus counts match!")


# Test 2: Order of the enumeration
def test_enumeration_order():
    """Test: Sorted by genus, then by generators"""
    found = enumerate_semigroups(2)

    assert [H.generators for H in found] == [(1,), (2, 3), (2, 5), (3, 4, 5)]


# Test 3: Children of the cusp
def test_children(cusp):
    """Test: Removing 2 or 3 from <2,3> gives <3,4,5> and <2,5>"""
    kids = children(cusp)

    assert [H.generators for H in kids] == [(3, 4, 5), (2, 5)]
    assert all(H.genus == 2 for H in kids)


# Test 4: The guard
@pytest.mark.parametrize("genus", [-1, MAX_GENUS_GUARD + 1])
def test_guard(genus):
    """Test: Negative genus and genus above the guard are refused"""
    with pytest.raises(GuardExceeded):
        enumerate_semigroups(genus)


# Test 5: No duplicates
def test_no_duplicates():
    """Test: Each semigroup appears exactly once up to genus 6"""
    found = enumerate_semigroups(6)
    assert len(found) == len(set(found))
