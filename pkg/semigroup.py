"""
Numerical semigroups and relative ideals
Exact integer-set calculus for H, its relative ideals and the single-ring classifiers of k[[H]]
"""
import logging
from dataclasses import dataclass, field
from functools import reduce
from math import gcd
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

logger = logging.getLogger(__name__)


class FiberCheckError(Exception):
    """Base class for every error raised by the classifier"""


class InvalidGenerators(FiberCheckError):
    pass


class NotCofinite(FiberCheckError):
    pass


class NotContained(FiberCheckError):
    pass


class InvariantViolation(FiberCheckError):
    """An internal cross-check disagreed"""


@dataclass(frozen=True)
class NumericalSemigroup:
    """
    Cofinite additive submonoid of the naturals

    generators is the minimal system, frobenius is -1 for the naturals
    """
    generators: Tuple[int, ...]
    frobenius: int
    gapset: FrozenSet[int]

    def __contains__(self, n: int) -> bool:
        return n >= 0 and n not in self.gapset

    @property
    def multiplicity(self) -> int:
        return self.generators[0]

    @property
    def genus(self) -> int:
        return len(self.gapset)

    @property
    def is_dvr(self) -> bool:
        return self.frobenius == -1

    @property
    def conductor(self) -> int:
        """Smallest c with every n >= c in H"""
        return self.frobenius + 1

    def label(self) -> str:
        return ",".join(str(g) for g in self.generators)

    def __str__(self) -> str:
        return f"<{self.label()}>"


def _minimal_generators(gaps: FrozenSet[int], frobenius: int) -> Tuple[int, ...]:
    def member(n: int) -> bool:
        return n >= 0 and n not in gaps

    e = next(n for n in range(1, frobenius + 3) if member(n))
    found = []
    for n in range(e, frobenius + e + 2):
        if not member(n):
            continue
        if any(member(a) and member(n - a) for a in range(1, n)):
            continue
        found.append(n)
    return tuple(found)


def sg_from_generators(gens: Iterable[int]) -> NumericalSemigroup:
    """
    Build H = <gens> with a minimal generator list

    Args:
        gens: positive integers, not necessarily minimal

    Returns:
        NumericalSemigroup

    Raises:
        InvalidGenerators: empty list or a non-positive entry
        NotCofinite: gcd of the entries is not 1
    """
    gens = list(gens)
    if not gens:
        raise InvalidGenerators("empty generator list")
    for g in gens:
        if not isinstance(g, int) or isinstance(g, bool) or g < 1:
            raise InvalidGenerators(f"generator {g!r} is not a positive integer")
    d = reduce(gcd, gens)
    if d != 1:
        listed = ",".join(str(g) for g in gens)
        raise NotCofinite(f"gcd({listed}) ≠ 1")

    low, high = min(gens), max(gens)
    # every integer above (min-1)(max-1) is representable once gcd is 1
    bound = (low - 1) * (high - 1) + high + 1
    member = [False] * (bound + 1)
    member[0] = True
    for n in range(1, bound + 1):
        member[n] = any(n >= g and member[n - g] for g in gens)
    gaps = frozenset(n for n in range(bound + 1) if not member[n])
    frobenius = max(gaps) if gaps else -1
    return NumericalSemigroup(_minimal_generators(gaps, frobenius), frobenius, gaps)


def sg_from_gaps(gaps: Iterable[int]) -> NumericalSemigroup:
    """Build H from its gap set; the complement must be closed under addition"""
    gaps = frozenset(gaps)
    if any(g < 1 for g in gaps):
        raise InvalidGenerators(f"gap set {sorted(gaps)} contains a non-positive entry")
    frobenius = max(gaps) if gaps else -1
    members = [n for n in range(1, frobenius + 1) if n not in gaps]
    for a in members:
        for b in members:
            if a + b in gaps:
                raise InvalidGenerators(f"{a}+{b} lands in the gap set {sorted(gaps)}")
    return NumericalSemigroup(_minimal_generators(gaps, frobenius), frobenius, gaps)


def parse_generators(text: str) -> NumericalSemigroup:
    """Parse the comma-separated text format, e.g. "3,4,5" """
    tokens = [tok.strip() for tok in text.split(",")]
    values = []
    for tok in tokens:
        try:
            values.append(int(tok))
        except ValueError:
            raise InvalidGenerators(f"bad generator token {tok!r} in {text!r}")
    return sg_from_generators(values)


@dataclass(frozen=True)
class SemigroupInvariants:
    e: int
    v: int
    F: int
    genus: int
    PF: FrozenSet[int]
    r: int


def sg_invariants(H: NumericalSemigroup) -> SemigroupInvariants:
    """Multiplicity, embedding dimension, Frobenius number, genus, pseudo-Frobenius set and type"""
    pf = frozenset(
        x for x in H.gapset
        if all(x + h in H for h in H.generators)
    )
    r = len(pf) if pf else 1
    return SemigroupInvariants(
        e=H.multiplicity, v=len(H.generators), F=H.frobenius,
        genus=H.genus, PF=pf, r=r,
    )


@dataclass(frozen=True)
class RelativeIdealZ:
    """
    Degree set E with E + H inside E, bounded below

    Stored in normal form: the members below the conductor plus the
    conductor itself (every integer at or above it is a member).
    """
    semigroup: NumericalSemigroup
    finite: FrozenSet[int]
    conductor: int

    def __contains__(self, z: int) -> bool:
        return z >= self.conductor or z in self.finite

    @property
    def offset(self) -> int:
        return min(self.finite) if self.finite else self.conductor

    def members(self, hi: int) -> List[int]:
        """Members in [offset, hi)"""
        return [z for z in range(self.offset, hi) if z in self]

    def __str__(self) -> str:
        head = ",".join(str(z) for z in sorted(self.finite))
        tail = f"≥{self.conductor}"
        return "{" + (head + "," if head else "") + tail + "}"


def _make_relideal(H: NumericalSemigroup, members: Iterable[int], tail_start: int) -> RelativeIdealZ:
    members = set(z for z in members if z < tail_start)
    conductor = tail_start
    while conductor - 1 in members:
        conductor -= 1
    finite = frozenset(z for z in members if z < conductor)
    ideal = RelativeIdealZ(H, finite, conductor)
    for z in finite:
        for g in H.generators:
            if z + g not in ideal:
                raise InvariantViolation(f"{ideal} is not closed: {z}+{g} missing")
    return ideal


def relideal_from_generators(H: NumericalSemigroup, degrees: Iterable[int]) -> RelativeIdealZ:
    """The relative ideal union of (d + H) over the given degrees"""
    degrees = sorted(set(degrees))
    if not degrees:
        raise InvalidGenerators("a relative ideal needs at least one generator")
    tail = min(d + H.conductor for d in degrees)
    members = [z for z in range(degrees[0], tail) if any(z - d in H for d in degrees)]
    return _make_relideal(H, members, tail)


def semigroup_ideal(H: NumericalSemigroup) -> RelativeIdealZ:
    return relideal_from_generators(H, [0])


def maximal_ideal(H: NumericalSemigroup) -> RelativeIdealZ:
    return relideal_from_generators(H, H.generators)


def canonical_relative_ideal(H: NumericalSemigroup) -> RelativeIdealZ:
    """K(H) = {z : F - z not in H}, so that H ⊆ K(H) ⊆ naturals"""
    F = H.frobenius
    members = [z for z in range(0, F + 1) if F - z not in H]
    K = _make_relideal(H, members, F + 1)
    inside = sum(1 for n in range(0, F + 1) if n in H)
    if len([z for z in K.members(F + 1) if z not in H]) != H.genus - inside:
        raise InvariantViolation(f"canonical ideal of {H} has the wrong size")
    return K


def minimal_relideal_generators(E: RelativeIdealZ) -> List[int]:
    """E \\ (E + M), the degrees of a minimal generating set"""
    EM = product(E, maximal_ideal(E.semigroup))
    return [z for z in E.members(E.conductor + E.semigroup.multiplicity + 1) if z not in EM]


def _check_same(E: RelativeIdealZ, F: RelativeIdealZ) -> None:
    if E.semigroup != F.semigroup:
        raise InvalidGenerators(f"relative ideals over {E.semigroup} and {F.semigroup}")


def ideal_sum(E: RelativeIdealZ, F: RelativeIdealZ) -> RelativeIdealZ:
    """E + F as ideals, which is the union of the degree sets"""
    _check_same(E, F)
    tail = min(E.conductor, F.conductor)
    return _make_relideal(E.semigroup, E.finite | F.finite, tail)


def product(E: RelativeIdealZ, F: RelativeIdealZ) -> RelativeIdealZ:
    """The ideal product, i.e. the Minkowski sum of the degree sets"""
    _check_same(E, F)
    tail = min(E.conductor + F.offset, F.conductor + E.offset)
    left = E.members(tail - F.offset)
    right = F.members(tail - E.offset)
    sums = {a + b for a in left for b in right if a + b < tail}
    return _make_relideal(E.semigroup, sums, tail)


def _colon_scan(E: RelativeIdealZ, F: RelativeIdealZ, lo: int, hi: int, reach: int) -> List[int]:
    fs = F.members(reach)
    return [z for z in range(lo, hi) if all(z + b in E for b in fs)]


def colon(E: RelativeIdealZ, F: RelativeIdealZ) -> RelativeIdealZ:
    """
    E:F = {z : z + F ⊆ E}

    The answer contains [E.conductor - F.offset, inf) and lies inside
    [E.conductor - F.conductor, inf), so only that band is scanned.
    The band is rescanned with a doubled reach as a stability check.
    """
    _check_same(E, F)
    lo = E.conductor - F.conductor
    hi = E.conductor - F.offset
    slack = max(E.semigroup.generators) + 2
    members = _colon_scan(E, F, lo, hi, F.conductor + slack)
    again = _colon_scan(E, F, lo - slack, hi, F.conductor + 2 * slack)
    if sorted(members) != sorted(again):
        raise InvariantViolation(f"colon {E}:{F} changed under a wider scan")
    return _make_relideal(E.semigroup, members, hi)


def shift(E: RelativeIdealZ, c: int) -> RelativeIdealZ:
    return RelativeIdealZ(E.semigroup, frozenset(z + c for z in E.finite), E.conductor + c)


def contains(E: RelativeIdealZ, F: RelativeIdealZ) -> bool:
    """F ⊆ E"""
    top = max(E.conductor, F.conductor)
    return all(z in E for z in F.members(top))


def length_between(E: RelativeIdealZ, F: RelativeIdealZ) -> int:
    """ℓ(E/F) = #(E \\ F) for F ⊆ E"""
    _check_same(E, F)
    if not contains(E, F):
        raise NotContained(f"{F} is not contained in {E}")
    top = max(E.conductor, F.conductor)
    return sum(1 for z in E.members(top) if z not in F)


def power_union(K: RelativeIdealZ, limit: Optional[int] = None) -> Tuple[RelativeIdealZ, int]:
    """
    The stabilized union of the powers of K, for K containing 0

    Returns:
        (union, number of products taken)
    """
    if 0 not in K:
        raise InvalidGenerators(f"{K} does not contain 0")
    limit = limit if limit is not None else K.semigroup.frobenius + 2
    current = K
    for step in range(limit + 1):
        nxt = product(current, K)
        if nxt == current:
            return current, step
        current = nxt
    raise InvariantViolation(f"powers of {K} did not stabilize within {limit} steps")


def socle_degree(E: RelativeIdealZ) -> int:
    """The unique degree of (E:M) \\ E for a canonical ideal E"""
    top = colon(E, maximal_ideal(E.semigroup))
    extra = [z for z in top.members(max(top.conductor, E.conductor)) if z not in E]
    if len(extra) != 1:
        raise InvariantViolation(f"(E:M)\\E = {extra} for E = {E}")
    return extra[0]


@dataclass(frozen=True)
class RingClassification:
    gens: Tuple[int, ...]
    e: int
    v: int
    F: int
    genus: int
    r: int
    len_K_mod_R: int
    len_R_mod_c: int
    flags: Dict[str, bool] = field(hash=False)
    lengths: Dict[str, int] = field(hash=False)

    @property
    def gorenstein(self) -> bool:
        return self.flags["gorenstein"]

    @property
    def almost_gorenstein(self) -> bool:
        return self.flags["almost_gorenstein"]

    @property
    def generalized_gorenstein(self) -> bool:
        return self.flags["generalized_gorenstein"]

    @property
    def two_almost_gorenstein(self) -> bool:
        return self.flags["two_almost_gorenstein"]

    @property
    def nearly_gorenstein(self) -> bool:
        return self.flags["nearly_gorenstein"]

    @property
    def is_dvr(self) -> bool:
        return self.flags["is_dvr"]

    def to_dict(self) -> Dict:
        return {
            "gens": list(self.gens),
            "e": self.e,
            "v": self.v,
            "F": self.F,
            "genus": self.genus,
            "r": self.r,
            "flags": {name: self.flags[name] for name in FLAG_ORDER},
            "lengths": dict(self.lengths),
        }


FLAG_ORDER = (
    "gorenstein",
    "almost_gorenstein",
    "generalized_gorenstein",
    "two_almost_gorenstein",
    "nearly_gorenstein",
    "is_dvr",
)


def classify_ring(H: NumericalSemigroup) -> RingClassification:
    """
    Classify R = k[[H]]

    AG: M + K ⊆ M.  GGL: Gorenstein or ℓ(K/R) = μ(K/R)·ℓ(R/c).
    2-AG: ℓ(R/c) = 2.  NG: (H:K) + K ⊇ M.  Here c = H : R[K].
    """
    inv = sg_invariants(H)
    R = semigroup_ideal(H)
    M = maximal_ideal(H)
    K = canonical_relative_ideal(H)

    len_K_mod_R = length_between(K, R)
    gorenstein = len_K_mod_R == 0
    MK = product(M, K)
    almost = contains(M, MK)

    blowup, _ = power_union(K)
    conductor = colon(R, blowup)
    len_R_mod_c = length_between(R, conductor)
    mu = length_between(K, ideal_sum(R, MK))
    generalized = gorenstein or len_K_mod_R == mu * len_R_mod_c

    trace_ideal = colon(R, K)
    nearly = contains(product(trace_ideal, K), M)

    K2 = product(K, K)
    K3 = product(K2, K)
    lengths = {
        "K_mod_R": len_K_mod_R,
        "R_mod_c": len_R_mod_c,
        "R_mod_a": length_between(R, trace_ideal),
        "K2_mod_K": length_between(K2, K),
        "mu_K_mod_R": mu,
        "K2_equals_K3": int(K2 == K3),
    }
    if gorenstein != (inv.r == 1):
        raise InvariantViolation(f"{H}: type {inv.r} but ℓ(K/R) = {len_K_mod_R}")

    flags = {
        "gorenstein": gorenstein,
        "almost_gorenstein": almost,
        "generalized_gorenstein": generalized,
        "two_almost_gorenstein": len_R_mod_c == 2,
        "nearly_gorenstein": nearly,
        "is_dvr": H.is_dvr,
    }
    logger.debug("classified %s: %s", H, flags)
    return RingClassification(
        gens=H.generators, e=inv.e, v=inv.v, F=inv.F, genus=inv.genus, r=inv.r,
        len_K_mod_R=len_K_mod_R, len_R_mod_c=len_R_mod_c, flags=flags, lengths=lengths,
    )
