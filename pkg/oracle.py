"""
Brute-force single-ring oracle
Evaluates each classifier definition literally on truncated Python sets.
Shares no code with semigroup.py; only the generator list is handed over.
"""
from functools import lru_cache
from typing import Dict, FrozenSet, Iterable, List


class DegreeWindow:
    """Integer sets that contain every integer >= hi, stored on [lo, hi)"""

    def __init__(self, lo: int, hi: int):
        self.lo = lo
        self.hi = hi

    def make(self, predicate) -> FrozenSet[int]:
        return frozenset(z for z in range(self.lo, self.hi) if predicate(z))

    def has(self, S: FrozenSet[int], z: int) -> bool:
        return z >= self.hi or z in S

    def extended(self, S: FrozenSet[int]) -> List[int]:
        # members past hi matter when the other operand reaches below 0
        return sorted(S) + list(range(self.hi, self.hi + (self.hi - self.lo)))

    def plus(self, S: FrozenSet[int], T: FrozenSet[int]) -> FrozenSet[int]:
        out = set()
        right = self.extended(T)
        for a in self.extended(S):
            for b in right:
                if a + b >= self.hi:
                    break
                if a + b >= self.lo:
                    out.add(a + b)
        return frozenset(out)

    def colon(self, S: FrozenSet[int], T: FrozenSet[int]) -> FrozenSet[int]:
        right = self.extended(T)
        return self.make(lambda z: all(self.has(S, z + b) for b in right if z + b < self.hi))

    def subset(self, S: FrozenSet[int], T: FrozenSet[int]) -> bool:
        return S <= T

    def length(self, S: FrozenSet[int], T: FrozenSet[int]) -> int:
        """#(S \\ T)"""
        return len(S - T)


def oracle_classify(gens: Iterable[int]) -> Dict:
    """
    Classify k[[H]] straight from the definitions

    Returns:
        Dict of flags, the type and the lengths ℓ(K/R), ℓ(R/c)
    """
    gens = sorted(set(gens))

    @lru_cache(maxsize=None)
    def in_H(n: int) -> bool:
        if n < 0:
            return False
        if n == 0:
            return True
        return any(in_H(n - g) for g in gens)

    schur = (gens[0] - 1) * (gens[-1] - 1)
    gaps = [n for n in range(schur + 1) if not in_H(n)]
    F = max(gaps) if gaps else -1
    span = F + gens[-1] + 2
    win = DegreeWindow(-span, 3 * span)

    H = win.make(in_H)
    M = win.make(lambda z: z > 0 and in_H(z))
    K = win.make(lambda z: not in_H(F - z))

    pf = [x for x in gaps if all(in_H(x + h) for h in range(1, span + 1) if in_H(h))]
    r = len(pf) if pf else 1

    gorenstein = K == H
    MK = win.plus(M, K)
    almost = win.subset(MK, M)
    almost_gaps = all(in_H(F - x) or x in pf for x in gaps)

    blowup = K
    while True:
        nxt = win.plus(blowup, K)
        if nxt == blowup:
            break
        blowup = nxt
    c = win.colon(H, blowup)
    len_R_mod_c = win.length(H, c)
    len_K_mod_R = win.length(K, H)

    # K/R free over R/c: the monomial map (R/c)^mu -> K/R is injective
    minimal = sorted(K - (H | MK))
    hits = [d + h for d in minimal for h in sorted(H - c)]
    injective = all(not in_H(z) for z in hits) and len(hits) == len(set(hits))
    generalized = gorenstein or injective

    K2 = win.plus(K, K)
    K3 = win.plus(K2, K)
    two_powers = K2 == K3 and win.length(K2, K) == 2

    trace = win.plus(win.colon(H, K), K)
    nearly = win.subset(M, trace)

    return {
        "gorenstein": gorenstein,
        "almost_gorenstein": almost,
        "almost_gorenstein_gaps": almost_gaps,
        "generalized_gorenstein": generalized,
        "two_almost_gorenstein": len_R_mod_c == 2,
        "two_almost_gorenstein_powers": two_powers,
        "nearly_gorenstein": nearly,
        "is_dvr": F == -1,
        "r": r,
        "len_K_mod_R": len_K_mod_R,
        "len_R_mod_c": len_R_mod_c,
    }
