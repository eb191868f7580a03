"""
Genus-tree enumeration of numerical semigroups
Children of H are H minus one minimal generator larger than the Frobenius number
"""
import logging
from typing import List

from semigroup import FiberCheckError, NumericalSemigroup, sg_from_gaps

logger = logging.getLogger(__name__)

MAX_GENUS_GUARD = 20


class GuardExceeded(FiberCheckError):
    pass


def children(H: NumericalSemigroup) -> List[NumericalSemigroup]:
    return [sg_from_gaps(H.gapset | {g}) for g in H.generators if g > H.frobenius]


def enumerate_semigroups(max_genus: int) -> List[NumericalSemigroup]:
    """
    Every numerical semigroup of genus <= max_genus, sorted by (genus, generators)

    Raises:
        GuardExceeded: max_genus above 20 or negative
    """
    if max_genus < 0 or max_genus > MAX_GENUS_GUARD:
        raise GuardExceeded(f"max_genus={max_genus} outside [0, {MAX_GENUS_GUARD}]")
    level = [sg_from_gaps([])]
    found = list(level)
    for genus in range(1, max_genus + 1):
        level = [child for H in level for child in children(H)]
        found.extend(level)
        logger.debug("genus %d: %d semigroups", genus, len(level))
    return sorted(found, key=lambda H: (H.genus, H.generators))


def counts_by_genus(max_genus: int) -> List[int]:
    counts = [0] * (max_genus + 1)
    for H in enumerate_semigroups(max_genus):
        counts[H.genus] += 1
    return counts
