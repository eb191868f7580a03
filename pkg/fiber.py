"""
Fiber products A = R x_k S of numerical-semigroup rings
Builds A inside the window algebra, produces a validated fractional canonical ideal X
and classifies A both directly and from the classifications of R and S
"""
import logging
import random
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterator, List, Optional, Tuple, TypeVar

from semigroup import (
    FLAG_ORDER,
    FiberCheckError,
    InvariantViolation,
    NumericalSemigroup,
    RelativeIdealZ,
    RingClassification,
    canonical_relative_ideal,
    classify_ring,
    maximal_ideal,
    minimal_relideal_generators,
    socle_degree,
)
from window import (
    LEFT,
    RIGHT,
    BranchWindow,
    Inconclusive,
    PrecisionExhausted,
    RingInvariants,
    Vector,
    WindowSubmodule,
    ambient_ring,
    blowup,
    branch_part,
    build_window,
    contains,
    element,
    iso_test,
    length_quotient,
    maximal_ideal_module,
    mod_colon,
    mod_equals,
    mod_product,
    mod_scale,
    mod_sum,
    monomial,
    mu,
    normalization,
    product_ring,
    ring_invariants,
    series_inverse,
    submodule_from_generators,
    unit,
    valuation,
    vec_add,
)

logger = logging.getLogger(__name__)

T = TypeVar("T")

PROBES_PER_FAMILY = 8


class NotApplicable(FiberCheckError):
    pass


class ValidationFailed(FiberCheckError):
    pass


class NormalizationFailed(FiberCheckError):
    pass


class SearchExhausted(FiberCheckError):
    pass


@dataclass
class FiberRing:
    window: BranchWindow
    A: WindowSubmodule
    J: WindowSubmodule
    B: WindowSubmodule
    Abar: WindowSubmodule
    left_class: RingClassification
    right_class: RingClassification
    K_left: RelativeIdealZ
    L_right: RelativeIdealZ
    invariants: RingInvariants

    @property
    def left(self) -> NumericalSemigroup:
        return self.window.left

    @property
    def right(self) -> NumericalSemigroup:
        return self.window.right

    def semigroup(self, branch: int) -> NumericalSemigroup:
        return self.window.semigroups[branch]

    def canonical_degrees(self, branch: int) -> RelativeIdealZ:
        return self.K_left if branch == LEFT else self.L_right

    def branch_class(self, branch: int) -> RingClassification:
        return self.left_class if branch == LEFT else self.right_class

    @property
    def dvr_branches(self) -> List[int]:
        return [b for b in (LEFT, RIGHT) if self.semigroup(b).is_dvr]

    def additivity(self) -> Dict[str, Tuple[int, int]]:
        """(value on A, value on R plus value on S) for v and e"""
        return {
            "v": (self.invariants.v, self.left_class.v + self.right_class.v),
            "e": (self.invariants.e, self.left_class.e + self.right_class.e),
        }


def with_window_retries(H1: NumericalSemigroup, H2: NumericalSemigroup, field: str,
                        overrides: Optional[Dict[str, Optional[int]]], retries: int,
                        job: Callable[[BranchWindow], T]) -> T:
    """Run job on the pair's window, enlarging it on PrecisionExhausted"""
    W = build_window(H1, H2, field, overrides)
    for attempt in range(retries + 1):
        try:
            return job(W)
        except PrecisionExhausted as exc:
            if attempt == retries:
                raise
            logger.warning("⚠️  %s x %s: %s; retrying with N=%d D=%d",
                           H1, H2, exc, W.N + 16, W.D + 8)
            W = W.enlarged(16, 8)
    raise PrecisionExhausted("unreachable")


def fiber_in_window(W: BranchWindow) -> FiberRing:
    """Construct A, J, B, Abar in a given window and check the local structure"""
    A = ambient_ring(W)
    J = maximal_ideal_module(W)
    B = product_ring(W)
    Abar = normalization(W)

    if not A.has(unit(W)) or mod_product(A, A) != A:
        raise InvariantViolation("A is not a ring")
    if not contains(A, J) or length_quotient(A, J) != 1:
        raise InvariantViolation("J is not a maximal ideal of A")
    if length_quotient(B, A) != 1:
        raise InvariantViolation(f"ℓ(B/A) = {length_quotient(B, A)}")

    invariants = ring_invariants(W, A, J)
    fiber = FiberRing(
        window=W, A=A, J=J, B=B, Abar=Abar,
        left_class=classify_ring(W.left), right_class=classify_ring(W.right),
        K_left=canonical_relative_ideal(W.left), L_right=canonical_relative_ideal(W.right),
        invariants=invariants,
    )
    logger.info("built %s x %s: v=%d e=%d r=%d", W.left, W.right,
                invariants.v, invariants.e, invariants.r)
    return fiber


def build_fiber(H1: NumericalSemigroup, H2: NumericalSemigroup, field: str = "rational",
                overrides: Optional[Dict[str, Optional[int]]] = None, retries: int = 4) -> FiberRing:
    return with_window_retries(H1, H2, field, overrides, retries, fiber_in_window)


# ---------------------------------------------------------------- canonicity battery

@dataclass
class ValidationItem:
    name: str
    ok: bool
    detail: str = ""

    def to_dict(self) -> Dict:
        return {"name": self.name, "ok": self.ok, "detail": self.detail}


@dataclass
class ValidationReport:
    items: List[ValidationItem] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return bool(self.items) and all(item.ok for item in self.items)

    @property
    def probes(self) -> int:
        return sum(1 for item in self.items if item.name.startswith("reflexive"))

    def failures(self) -> List[str]:
        return [item.name for item in self.items if not item.ok]

    def to_dict(self) -> Dict:
        return {"passed": self.passed, "items": [item.to_dict() for item in self.items]}


def probe_family(F: FiberRing, seed: int) -> List[Tuple[str, WindowSubmodule]]:
    """Fractional ideals on which reflexivity is tested"""
    W = F.window
    rng = random.Random(seed)
    probes = [("A", F.A), ("J", F.J), ("J2", mod_product(F.J, F.J)), ("B", F.B), ("Abar", F.Abar)]
    top = W.D
    for k in range(PROBES_PER_FAMILY):
        a, b, a2, b2 = (rng.randint(0, top) for _ in range(4))
        gens = [element(W, {a: 1}, {b: 1}), element(W, {a2: 1}, {}), element(W, {}, {b2: 1})]
        probes.append((f"monomial[{k}]", submodule_from_generators(W, gens)))
    for k in range(PROBES_PER_FAMILY):
        a, b, a2 = (rng.randint(0, top) for _ in range(3))
        lam = rng.randint(2, 97)
        gens = [element(W, {a: 1}, {b: lam}), element(W, {a2: 1}, {})]
        probes.append((f"coupled[{k}]", submodule_from_generators(W, gens)))
    return probes


def validate_canonical(F: FiberRing, X: WindowSubmodule, seed: int = 0,
                       fail_fast: bool = False) -> ValidationReport:
    """
    Canonicity battery: X:X = A, ℓ((X:J)/X) = 1, μ(X) = r(A) and X:(X:P) = P on probes

    PrecisionExhausted propagates so the caller can enlarge the window.
    """
    report = ValidationReport()

    def run(name: str, check: Callable[[], Tuple[bool, str]]) -> bool:
        try:
            ok, detail = check()
        except PrecisionExhausted:
            raise
        except FiberCheckError as exc:
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        report.items.append(ValidationItem(name, ok, detail))
        return ok

    def endomorphisms():
        ok = mod_colon(X, X) == F.A
        return ok, "" if ok else "X:X differs from A"

    def socle():
        n = length_quotient(mod_colon(X, F.J), X)
        return n == 1, f"ℓ((X:J)/X) = {n}"

    def generators():
        n = mu(X)
        return n == F.invariants.r, f"μ(X) = {n}, r(A) = {F.invariants.r}"

    for name, check in (("endomorphisms", endomorphisms), ("socle_length", socle), ("generators", generators)):
        if not run(name, check) and fail_fast:
            return report

    for name, P in probe_family(F, seed):
        def reflexive(P=P):
            ok = mod_colon(X, mod_colon(X, P)) == P
            return ok, "" if ok else "X:(X:P) differs from P"
        if not run(f"reflexive:{name}", reflexive) and fail_fast:
            return report
    return report


# ---------------------------------------------------------------- canonical ideals

@dataclass
class DvrWitness:
    """Normalization data for the one-DVR construction; other is the non-DVR branch"""
    other: int
    z: int
    unit_element: Vector
    q: Vector
    xi: Dict[int, object]
    rho: Dict[int, object]

    def to_dict(self, W: BranchWindow) -> Dict:
        text = W.field.text
        return {
            "branch": "left" if self.other == LEFT else "right",
            "z": self.z,
            "rho": {str(d): text(c) for d, c in sorted(self.rho.items())},
        }


@dataclass
class CanonicalIdeal:
    X: WindowSubmodule
    provenance: str
    normalized: bool
    validation: ValidationReport
    witness: Optional[DvrWitness] = None
    raw: Optional[WindowSubmodule] = None


def _check_normalized(F: FiberRing, X: WindowSubmodule) -> bool:
    return contains(X, F.A) and contains(F.Abar, X)


def canonical_lemma42(F: FiberRing, seed: int = 0) -> CanonicalIdeal:
    """X = (K x L) + A·(t^z1, s^z2) with z_i the socle degrees of K and L"""
    if F.dvr_branches:
        raise NotApplicable("the product construction needs two non-DVR branches")
    W = F.window
    z1 = socle_degree(F.K_left)
    z2 = socle_degree(F.L_right)
    gens = [monomial(W, LEFT, k) for k in minimal_relideal_generators(F.K_left)]
    gens += [monomial(W, RIGHT, k) for k in minimal_relideal_generators(F.L_right)]
    gens.append(element(W, {z1: 1}, {z2: 1}))
    X = submodule_from_generators(W, gens)
    report = validate_canonical(F, X, seed)
    if not report.passed:
        raise ValidationFailed(f"product candidate failed {report.failures()}")
    return CanonicalIdeal(X=X, provenance="lemma42", normalized=_check_normalized(F, X), validation=report)


def normalize(F: FiberRing, X: WindowSubmodule, u: Optional[Vector] = None,
              seed: int = 0, attempts: int = 4) -> Tuple[WindowSubmodule, Vector, Vector]:
    """
    Move X between A and Abar: q = u^{-1} for u in X of minimal valuation on both branches

    Returns:
        (qX, q, u)
    """
    W = F.window
    precision = W.N + W.D + 1
    rng = random.Random(seed)
    for attempt in range(attempts):
        if u is None or attempt > 0:
            u = _generic_minimal_element(X, rng)
        if any(valuation(u, b) != X.valuation[b] for b in (LEFT, RIGHT)):
            continue
        q = {}
        for b in (LEFT, RIGHT):
            inv = series_inverse(W, branch_part(u, b), precision)
            q.update({(b, d): c for d, c in inv.items()})
        Xn = mod_scale(X, q)
        if _check_normalized(F, Xn):
            return Xn, q, u
        logger.info("normalization attempt %d missed A ⊆ qX ⊆ Abar", attempt + 1)
    raise NormalizationFailed(f"no normalizing multiplier after {attempts} attempts")


def _generic_minimal_element(X: WindowSubmodule, rng: random.Random) -> Vector:
    picks = []
    for b in (LEFT, RIGHT):
        key = (b, X.valuation[b])
        row = next(r for r in X.basis() if key in r)
        picks.append(row)
    if picks[0] is picks[1]:
        return picks[0]
    lam = X.window.field(rng.randint(2, 10 ** 6))
    return vec_add(picks[0], picks[1], scale=lam)


def canonical_dvr(F: FiberRing, seed: int = 0) -> CanonicalIdeal:
    """
    One DVR branch: X = A + (m x s^{-z}L) with z the socle degree of L,
    normalized by u = (1, 1 + s^{-z}) (mirrored when the DVR sits on the right)
    """
    if len(F.dvr_branches) != 1:
        raise NotApplicable("the DVR construction needs exactly one DVR branch")
    W = F.window
    dvr = F.dvr_branches[0]
    other = RIGHT if dvr == LEFT else LEFT
    L = F.canonical_degrees(other)
    z = socle_degree(L)

    gens = [unit(W), monomial(W, dvr, 1)]
    gens += [monomial(W, other, l - z) for l in minimal_relideal_generators(L)]
    raw = submodule_from_generators(W, gens)

    u = vec_add(unit(W), monomial(W, other, -z))
    Xn, q, u = normalize(F, raw, u=u, seed=seed)
    report = validate_canonical(F, Xn, seed)
    if not report.passed:
        raise ValidationFailed(f"DVR candidate failed {report.failures()}")

    q_other = branch_part(q, other)
    xi = {d - z: c for d, c in q_other.items() if d - z < W.N}
    rho = {d + z: c for d, c in branch_part(u, other).items()}
    witness = DvrWitness(other=other, z=z, unit_element=u, q=q, xi=xi, rho=rho)
    return CanonicalIdeal(X=Xn, provenance="dvr_construction", normalized=True,
                          validation=report, witness=witness, raw=raw)


def search_candidates(F: FiberRing) -> Iterator[Tuple[str, WindowSubmodule]]:
    """A first, then A + (M1 x M2) + A·(t^a, s^b)"""
    W = F.window
    H1, H2 = F.left, F.right
    yield "A", F.A
    lefts = [("m", maximal_ideal(H1)), ("K", F.K_left)]
    rights = [("n", maximal_ideal(H2)), ("L", F.L_right)]
    for name1, M1 in lefts:
        for name2, M2 in rights:
            base = [monomial(W, LEFT, k) for k in minimal_relideal_generators(M1)]
            base += [monomial(W, RIGHT, k) for k in minimal_relideal_generators(M2)]
            for a in range(0, H1.frobenius + 2):
                for b in range(0, H2.frobenius + 2):
                    gens = [unit(W)] + base + [element(W, {a: 1}, {b: 1})]
                    yield f"{name1}x{name2}+({a},{b})", submodule_from_generators(W, gens)


def canonical_search(F: FiberRing, budget: int = 512, seed: int = 0) -> CanonicalIdeal:
    """First candidate that passes the battery"""
    tried = 0
    for name, X in search_candidates(F):
        if tried >= budget:
            break
        tried += 1
        if not contains(F.Abar, X):
            continue
        quick = validate_canonical(F, X, seed, fail_fast=True)
        if quick.passed:
            logger.info("search found a canonical ideal: %s", name)
            return CanonicalIdeal(X=X, provenance="search", normalized=_check_normalized(F, X),
                                  validation=quick)
    raise SearchExhausted(f"no canonical ideal among {tried} candidates for {F.left} x {F.right}")


def canonical_ideal(F: FiberRing, seed: int = 0) -> CanonicalIdeal:
    """Pick the construction that fits the pair, falling back to search"""
    dvrs = F.dvr_branches
    try:
        if not dvrs:
            return canonical_lemma42(F, seed)
        if len(dvrs) == 1:
            return canonical_dvr(F, seed)
    except (ValidationFailed, NormalizationFailed) as exc:
        logger.warning("⚠️  %s x %s: %s; falling back to search", F.left, F.right, exc)
    return canonical_search(F, seed=seed)


def unshifted_dvr_candidate(F: FiberRing) -> WindowSubmodule:
    """A + (m x L) with L left unshifted; it contains (1, 0), so B lies in its endomorphisms"""
    if len(F.dvr_branches) != 1:
        raise NotApplicable("needs exactly one DVR branch")
    W = F.window
    dvr = F.dvr_branches[0]
    other = RIGHT if dvr == LEFT else LEFT
    L = F.canonical_degrees(other)
    gens = [unit(W), monomial(W, dvr, 1)]
    gens += [monomial(W, other, l) for l in minimal_relideal_generators(L)]
    return submodule_from_generators(W, gens)


def negative_controls(F: FiberRing, seed: int = 0) -> Dict[str, ValidationReport]:
    """Candidates that are not canonical; each report must fail"""
    controls = {}
    if F.invariants.r > 1:
        controls["A"] = F.A
    controls["B"] = F.B
    controls["Abar"] = F.Abar
    if len(F.dvr_branches) == 1:
        controls["A+(m x L)"] = unshifted_dvr_candidate(F)
    return {name: validate_canonical(F, X, seed, fail_fast=True) for name, X in controls.items()}


# ---------------------------------------------------------------- classification

@dataclass
class FiberClassification:
    gens: Tuple[Tuple[int, ...], Tuple[int, ...]]
    e: int
    v: int
    r: int
    len_K_mod_R: int
    len_R_mod_c: int
    flags: Dict[str, bool]
    predicted: Dict[str, bool]
    agree: bool
    details: Dict[str, object] = field(default_factory=dict)

    def mismatches(self) -> List[str]:
        return [name for name in FLAG_ORDER if self.flags[name] != self.predicted[name]]

    def to_dict(self) -> Dict:
        return {
            "gens": [list(self.gens[0]), list(self.gens[1])],
            "e": self.e,
            "v": self.v,
            "r": self.r,
            "lengths": {"X_mod_A": self.len_K_mod_R, "A_mod_c": self.len_R_mod_c},
            "direct": {name: self.flags[name] for name in FLAG_ORDER},
            "predicted": {name: self.predicted[name] for name in FLAG_ORDER},
            "agree": self.agree,
            "details": self.details,
        }


def predicted_flags(left: RingClassification, right: RingClassification) -> Dict[str, bool]:
    """Flags of R x_k S read off from the flags of R and S"""
    ag = left.almost_gorenstein and right.almost_gorenstein
    return {
        "gorenstein": left.is_dvr and right.is_dvr,
        "almost_gorenstein": ag,
        "generalized_gorenstein": ag,
        "two_almost_gorenstein": (left.two_almost_gorenstein and right.almost_gorenstein)
        or (left.almost_gorenstein and right.two_almost_gorenstein),
        "nearly_gorenstein": left.nearly_gorenstein and right.nearly_gorenstein,
        "is_dvr": False,
    }


def flags_agree(direct: Dict[str, bool], predicted: Dict[str, bool]) -> bool:
    return all(direct[name] == predicted[name] for name in FLAG_ORDER)


def classify_fiber(F: FiberRing, canon: CanonicalIdeal, seed: int = 0,
                   predictor: Callable[[RingClassification, RingClassification], Dict[str, bool]] = predicted_flags
                   ) -> FiberClassification:
    """
    Direct flags on A from the normalized canonical ideal X, compared with the predicted ones

    AG: JX = J (also tested as JX ≅ J).  2-AG: ℓ(A/c) = 2 with c = A:A[X].
    NG: (A:X)X ⊇ J.  GGL: Gorenstein or ℓ(X/A) = μ(X/A)·ℓ(A/c).
    """
    if not canon.normalized:
        raise NotApplicable("classification needs A ⊆ X ⊆ Abar")
    W, A, J, X = F.window, F.A, F.J, canon.X
    r = F.invariants.r
    gorenstein = r == 1

    JX = mod_product(J, X)
    ag_equal = mod_equals(JX, J)
    try:
        ag_iso, _ = iso_test(W, JX, J, seed=seed)
    except Inconclusive as exc:
        logger.info("JX ≅ J undecided: %s", exc)
        ag_iso = None

    AX, steps = blowup(X)
    c = mod_colon(A, AX)
    len_c = length_quotient(A, c)
    len_X = length_quotient(X, A)
    mu_X = length_quotient(X, mod_sum(A, JX))
    generalized = gorenstein or len_X == mu_X * len_c

    trace = mod_product(mod_colon(A, X), X)
    nearly = contains(trace, J)

    flags = {
        "gorenstein": gorenstein,
        "almost_gorenstein": ag_equal,
        "generalized_gorenstein": generalized,
        "two_almost_gorenstein": len_c == 2,
        "nearly_gorenstein": nearly,
        "is_dvr": False,
    }
    predicted = predictor(F.left_class, F.right_class)
    agree = flags_agree(flags, predicted)
    if not agree:
        logger.warning("❌ %s x %s: direct %s vs predicted %s", F.left, F.right, flags, predicted)
    details = {
        "ag_equality": ag_equal,
        "ag_isomorphism": ag_iso,
        "mu_X_mod_A": mu_X,
        "blowup_steps": steps,
        "provenance": canon.provenance,
    }
    return FiberClassification(
        gens=(F.left.generators, F.right.generators),
        e=F.invariants.e, v=F.invariants.v, r=r,
        len_K_mod_R=len_X, len_R_mod_c=len_c,
        flags=flags, predicted=predicted, agree=agree, details=details,
    )


@dataclass
class PairAnalysis:
    fiber: FiberRing
    canonical: CanonicalIdeal
    classification: FiberClassification


def analyze_pair(H1: NumericalSemigroup, H2: NumericalSemigroup, field: str = "rational",
                 overrides: Optional[Dict[str, Optional[int]]] = None, seed: int = 0,
                 retries: int = 4) -> PairAnalysis:
    """build_fiber + canonical_ideal + classify_fiber under one retry loop"""
    def job(W: BranchWindow) -> PairAnalysis:
        F = fiber_in_window(W)
        canon = canonical_ideal(F, seed)
        return PairAnalysis(F, canon, classify_fiber(F, canon, seed))
    return with_window_retries(H1, H2, field, overrides, retries, job)
