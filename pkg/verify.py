"""
Verification battery and campaigns
Every pair gets the same ordered list of identity and theorem items; each item is
ok, failed or skipped with a reason, and stores the values it compared.
"""
import hashlib
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Tuple

from config import VERSION, Settings
from enumeration import MAX_GENUS_GUARD, GuardExceeded, enumerate_semigroups
from fiber import (
    PROBES_PER_FAMILY,
    CanonicalIdeal,
    FiberClassification,
    FiberRing,
    canonical_ideal,
    classify_fiber,
    fiber_in_window,
    flags_agree,
    negative_controls,
    with_window_retries,
)
from oracle import oracle_classify
from semigroup import (
    FLAG_ORDER,
    FiberCheckError,
    NumericalSemigroup,
    RelativeIdealZ,
    colon,
    length_between,
    maximal_ideal,
    product,
    semigroup_ideal,
    sg_from_generators,
)
from semigroup import contains as ideal_contains
from window import (
    LEFT,
    RIGHT,
    BranchWindow,
    PrecisionExhausted,
    contains,
    ideal_pair_module,
    length_quotient,
    mod_colon,
    mod_product,
    mod_sum,
    parse_field,
    vec_mul,
)

logger = logging.getLogger(__name__)

OK, FAILED, SKIPPED = "ok", "failed", "skipped"

SIDES = ((LEFT, "left"), (RIGHT, "right"))

STABILITY_GROWTH = (8, 2)

EXPORTED_KEYS = ("e", "v", "r", "lengths", "direct")

IDENTITY_IDS = (
    "local_structure",
    "embedding_dimension_sum",
    "multiplicity_sum",
    "hilbert_function_sum",
    "maximal_ideal_powers",
    "type_parameter_independence",
    "canonicity",
    "negative_controls",
    "canonical_duality",
    "almost_gorenstein_forms",
    "almost_gorenstein_oracle(left)",
    "almost_gorenstein_oracle(right)",
    "flag_chain",
    "trace_absorbs_socle(left)",
    "trace_absorbs_socle(right)",
    "trace_absorbs_dual(left)",
    "trace_absorbs_dual(right)",
    "trace_stable_iff_powers_stable(left)",
    "trace_stable_iff_powers_stable(right)",
    "type_sum_plus_one",
    "canonical_colon_maximal",
    "maximal_times_canonical",
    "canonical_colength",
    "fiber_trace_ideal",
    "double_cusp_type",
    "dvr_type",
    "dvr_inclusion_chain",
    "dvr_socle_colon",
    "dvr_conductor_colon",
    "dvr_witness_inverse",
    "dvr_canonical_decomposition",
    "dvr_trace_ideal",
    "dvr_trace",
    "dvr_powers_stable",
    "dvr_trace_colength",
    "window_stability",
    "field_agreement",
)

THEOREM_IDS = (
    "gorenstein_iff_both_dvr",
    "almost_gorenstein_product",
    "generalized_gorenstein_product",
    "almost_gorenstein_dvr",
    "generalized_gorenstein_dvr",
    "almost_gorenstein_equivalence",
    "self_product",
    "two_almost_gorenstein",
    "nearly_gorenstein",
)


class BadConfig(FiberCheckError):
    pass


class _Skip(Exception):
    """Raised inside a battery item whose precondition does not hold"""


# ---------------------------------------------------------------- configuration

@dataclass(frozen=True)
class CampaignConfig:
    max_genus: int = 4
    include_dvr: bool = True
    field: str = "rational"
    jobs: int = 1
    seed: int = 0
    out: str = "reports"
    csv: bool = False
    retries: int = 4
    window: Optional[int] = None
    neg_offset: Optional[int] = None
    cross_field: bool = False
    record_timings: bool = False

    def __post_init__(self):
        if self.max_genus < 0:
            raise BadConfig(f"max_genus must be >= 0, got {self.max_genus}")
        if self.max_genus > MAX_GENUS_GUARD:
            raise GuardExceeded(f"max_genus={self.max_genus} above {MAX_GENUS_GUARD}")
        if self.jobs < 1:
            raise BadConfig(f"jobs must be >= 1, got {self.jobs}")
        if self.retries < 0:
            raise BadConfig(f"retries must be >= 0, got {self.retries}")
        parse_field(self.field)

    @property
    def overrides(self) -> Dict[str, Optional[int]]:
        return {"N": self.window, "D": self.neg_offset}

    @classmethod
    def from_settings(cls, settings: Settings, **changes) -> "CampaignConfig":
        values = {
            "max_genus": settings.max_genus,
            "field": settings.field,
            "jobs": settings.jobs,
            "seed": settings.seed,
            "out": settings.out,
            "retries": settings.retries,
        }
        values.update({k: v for k, v in changes.items() if v is not None})
        return cls(**values)


def pair_seed(master: int, gens1: Tuple[int, ...], gens2: Tuple[int, ...]) -> int:
    key = f"{master}:{','.join(map(str, gens1))}:{','.join(map(str, gens2))}"
    return int(hashlib.sha256(key.encode("utf-8")).hexdigest()[:8], 16)


# ---------------------------------------------------------------- battery

@dataclass
class BatteryItem:
    id: str
    kind: str
    status: str
    lhs: Any = None
    rhs: Any = None
    reason: str = ""
    extra: Dict[str, Any] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.status == OK

    def to_dict(self) -> Dict:
        if self.kind == "theorem":
            return {"id": self.id, "status": self.status, "predicted": self.lhs,
                    "direct": self.rhs, "reason": self.reason}
        return {"id": self.id, "status": self.status, "lhs": self.lhs, "rhs": self.rhs,
                "reason": self.reason, "extra": self.extra}


class Battery:
    """Collects items for one pair; compare values decide the status"""

    def __init__(self, label: str):
        self.label = label
        self.items: Dict[str, BatteryItem] = {}

    def _record(self, item: BatteryItem) -> BatteryItem:
        if item.status == FAILED:
            logger.warning("❌ %s %s: %r vs %r %s", self.label, item.id, item.lhs, item.rhs, item.reason)
        elif item.status == SKIPPED:
            logger.debug("%s %s skipped: %s", self.label, item.id, item.reason)
        self.items[item.id] = item
        return item

    def skip(self, item_id: str, reason: str, kind: str = "identity") -> BatteryItem:
        return self._record(BatteryItem(item_id, kind, SKIPPED, reason=reason))

    def run(self, item_id: str, compute: Callable[[], Tuple], kind: str = "identity") -> BatteryItem:
        """
        compute returns (lhs, rhs) or (lhs, rhs, extra); for theorems lhs is the
        predicted value and rhs the direct one. PrecisionExhausted propagates.
        """
        try:
            values = compute()
        except PrecisionExhausted:
            raise
        except _Skip as skip:
            return self.skip(item_id, str(skip), kind)
        except FiberCheckError as exc:
            return self._record(BatteryItem(item_id, kind, FAILED, reason=f"{type(exc).__name__}: {exc}"))
        lhs, rhs = values[0], values[1]
        extra = values[2] if len(values) > 2 else {}
        status = OK if lhs == rhs else FAILED
        return self._record(BatteryItem(item_id, kind, status, lhs, rhs, extra=extra))

    def theorem(self, item_id: str, compute: Callable[[], Tuple]) -> BatteryItem:
        return self.run(item_id, compute, kind="theorem")

    def collect(self, ids: Tuple[str, ...], kind: str) -> List[BatteryItem]:
        out = []
        for item_id in ids:
            item = self.items.get(item_id)
            if item is None:
                item = self._record(BatteryItem(item_id, kind, FAILED, reason="not evaluated"))
            out.append(item)
        return out


@dataclass
class TheoremReport:
    pair: Tuple[Tuple[int, ...], Tuple[int, ...]]
    seed: int
    window: Dict[str, Any]
    classification: Optional[Dict]
    canonical: Optional[Dict]
    identities: List[BatteryItem]
    theorems: List[BatteryItem]
    timings: Dict[str, float] = field(default_factory=dict)

    @property
    def items(self) -> List[BatteryItem]:
        return self.identities + self.theorems

    @property
    def failures(self) -> List[BatteryItem]:
        return [item for item in self.items if item.status == FAILED]

    @property
    def checks(self) -> int:
        return sum(1 for item in self.items if item.status != SKIPPED)

    @property
    def skipped(self) -> int:
        return sum(1 for item in self.items if item.status == SKIPPED)

    @property
    def direct(self) -> Optional[Dict[str, bool]]:
        return None if self.classification is None else self.classification["direct"]

    @property
    def predicted(self) -> Optional[Dict[str, bool]]:
        return None if self.classification is None else self.classification["predicted"]

    def item(self, item_id: str) -> BatteryItem:
        return next(item for item in self.items if item.id == item_id)

    def to_dict(self) -> Dict:
        """Timings stay out so identical runs render identically"""
        return {
            "pair": [list(self.pair[0]), list(self.pair[1])],
            "seed": self.seed,
            "window": dict(self.window),
            "classification": self.classification,
            "canonical": self.canonical,
            "identities": [item.to_dict() for item in self.identities],
            "theorems": [item.to_dict() for item in self.theorems],
        }


# ---------------------------------------------------------------- helpers

def exported(cls: FiberClassification) -> Dict:
    data = cls.to_dict()
    return {key: data[key] for key in EXPORTED_KEYS}


def _maximal_power(H: NumericalSemigroup, k: int) -> RelativeIdealZ:
    m = maximal_ideal(H)
    power = m
    for _ in range(k - 1):
        power = product(power, m)
    return power


def _colength_of_power(H: NumericalSemigroup, k: int) -> int:
    """ℓ(R/m^k)"""
    return length_between(semigroup_ideal(H), _maximal_power(H, k))


def _reanalyze(W: BranchWindow, seed: int) -> FiberClassification:
    F = fiber_in_window(W)
    return classify_fiber(F, canonical_ideal(F, seed), seed)


# ---------------------------------------------------------------- sections

def _structure_items(bat: Battery, F: FiberRing) -> None:
    W, H1, H2 = F.window, F.left, F.right

    bat.run("local_structure", lambda: (
        {"A_mod_J": length_quotient(F.A, F.J), "B_mod_A": length_quotient(F.B, F.A),
         "J_is_B_ideal": mod_product(F.J, F.B) == F.J},
        {"A_mod_J": 1, "B_mod_A": 1, "J_is_B_ideal": True},
    ))
    bat.run("embedding_dimension_sum", lambda: F.additivity()["v"])
    bat.run("multiplicity_sum", lambda: F.additivity()["e"])

    def hilbert():
        observed = F.invariants.hilbert
        expected = [_colength_of_power(H1, k + 1) + _colength_of_power(H2, k + 1) - 1
                    for k in range(len(observed))]
        return observed, expected

    def powers():
        observed, expected = [], []
        power = F.J
        for k in (2, 3):
            power = mod_product(power, F.J)
            observed.append(power.signature())
            expected.append(ideal_pair_module(W, _maximal_power(H1, k), _maximal_power(H2, k)).signature())
        return observed, expected

    bat.run("hilbert_function_sum", hilbert)
    bat.run("maximal_ideal_powers", powers)
    bat.run("type_parameter_independence", lambda: (F.invariants.r, F.invariants.r_alt))


def _canonical_items(bat: Battery, F: FiberRing, canon: CanonicalIdeal,
                     cls: FiberClassification, seed: int) -> None:
    X = canon.X

    def canonicity():
        report = canon.validation
        return ({"passed": report.passed, "enough_probes": report.probes >= 2 * PROBES_PER_FAMILY},
                {"passed": True, "enough_probes": True})

    def controls():
        reports = negative_controls(F, seed)
        return ({name: rep.passed for name, rep in reports.items()},
                {name: False for name in reports})

    def duality():
        XJ = mod_colon(X, F.J)
        XB = mod_colon(X, F.B)
        return ({"XJ_mod_X": length_quotient(XJ, X), "X_mod_XB": length_quotient(X, XB)},
                {"XJ_mod_X": length_quotient(F.A, F.J), "X_mod_XB": length_quotient(F.B, F.A)})

    def ag_forms():
        iso = cls.details["ag_isomorphism"]
        if iso is None:
            raise _Skip("JX ≅ J undecided over the prime field")
        return cls.details["ag_equality"], iso

    def chain():
        f = cls.flags
        observed = {
            "gorenstein_implies_ag": not f["gorenstein"] or f["almost_gorenstein"],
            "ag_implies_ggl": not f["almost_gorenstein"] or f["generalized_gorenstein"],
            "ag_implies_ng": not f["almost_gorenstein"] or f["nearly_gorenstein"],
            "two_ag_excludes_ag": not (f["two_almost_gorenstein"] and f["almost_gorenstein"]),
        }
        return observed, {name: True for name in observed}

    bat.run("canonicity", canonicity)
    bat.run("negative_controls", controls)
    bat.run("canonical_duality", duality)
    bat.run("almost_gorenstein_forms", ag_forms)
    for branch, side in SIDES:
        def oracle_side(branch=branch):
            ring = F.branch_class(branch)
            brute = oracle_classify(F.semigroup(branch).generators)
            return ({"definition": brute["almost_gorenstein"], "gap_form": brute["almost_gorenstein_gaps"]},
                    {"definition": ring.almost_gorenstein, "gap_form": ring.almost_gorenstein})
        bat.run(f"almost_gorenstein_oracle({side})", oracle_side)
    bat.run("flag_chain", chain)


def _side_items(bat: Battery, F: FiberRing) -> None:
    """Trace-ideal identities of each non-Gorenstein branch, on degree sets"""
    for branch, side in SIDES:
        ids = (f"trace_absorbs_socle({side})", f"trace_absorbs_dual({side})",
               f"trace_stable_iff_powers_stable({side})")
        if F.branch_class(branch).gorenstein:
            for item_id in ids:
                bat.skip(item_id, f"{side} ring is Gorenstein")
            continue
        H = F.semigroup(branch)
        R, m, K = semigroup_ideal(H), maximal_ideal(H), F.canonical_degrees(branch)
        a = colon(R, K)
        aK = product(a, K)
        K2 = product(K, K)
        bat.run(ids[0], lambda: (str(product(a, colon(K, m))), str(aK)))
        bat.run(ids[1], lambda: (
            {"a_times_R_colon_m": str(product(a, colon(R, m))), "a_inside_aK": ideal_contains(aK, a)},
            {"a_times_R_colon_m": str(a), "a_inside_aK": True},
        ))
        bat.run(ids[2], lambda: (aK == a, K2 == product(K2, K)))


def _regular_items(bat: Battery, F: FiberRing, canon: CanonicalIdeal) -> None:
    ids = ("type_sum_plus_one", "canonical_colon_maximal", "maximal_times_canonical",
           "canonical_colength", "fiber_trace_ideal")
    if F.dvr_branches:
        for item_id in ids:
            bat.skip(item_id, "a branch is a DVR")
        return
    W, H1, H2 = F.window, F.left, F.right
    X, A, J = canon.X, F.A, F.J
    K, L = F.K_left, F.L_right
    m, n = maximal_ideal(H1), maximal_ideal(H2)
    lc, rc = F.left_class, F.right_class

    bat.run(ids[0], lambda: (F.invariants.r, lc.r + rc.r + 1))
    if canon.provenance != "lemma42":
        for item_id in ids[1:]:
            bat.skip(item_id, f"canonical ideal came from {canon.provenance}")
        return

    bat.run(ids[1], lambda: (
        mod_colon(X, J).signature(),
        ideal_pair_module(W, colon(K, m), colon(L, n)).signature(),
    ))
    bat.run(ids[2], lambda: (
        mod_product(J, X).signature(),
        ideal_pair_module(W, product(m, K), product(n, L)).signature(),
    ))
    bat.run(ids[3], lambda: (
        length_quotient(X, A),
        length_between(K, semigroup_ideal(H1)) + length_between(L, semigroup_ideal(H2)) + 2,
    ))

    def trace():
        if lc.gorenstein and rc.gorenstein:
            raise _Skip("both rings are Gorenstein")
        left = m if lc.gorenstein else colon(semigroup_ideal(H1), K)
        right = n if rc.gorenstein else colon(semigroup_ideal(H2), L)
        return mod_colon(A, X).signature(), ideal_pair_module(W, left, right).signature()

    bat.run(ids[4], trace)


def _double_cusp_item(bat: Battery, F: FiberRing, cls: FiberClassification) -> None:
    if F.left.generators != (2, 3) or F.right.generators != (2, 3):
        bat.skip("double_cusp_type", "pair is not (<2,3>, <2,3>)")
        return
    bat.run("double_cusp_type", lambda: (
        {"r": F.invariants.r, "almost_gorenstein": cls.flags["almost_gorenstein"]},
        {"r": 3, "almost_gorenstein": True},
        {"note": "the r(R) in the source statement is the type of the fiber product"},
    ))


DVR_IDS = (
    "dvr_type",
    "dvr_inclusion_chain",
    "dvr_socle_colon",
    "dvr_conductor_colon",
    "dvr_witness_inverse",
    "dvr_canonical_decomposition",
    "dvr_trace_ideal",
    "dvr_trace",
    "dvr_powers_stable",
    "dvr_trace_colength",
)


def _dvr_items(bat: Battery, F: FiberRing, canon: CanonicalIdeal) -> None:
    """One DVR branch; the other branch S with canonical degrees L plays the non-DVR role"""
    if len(F.dvr_branches) != 1:
        for item_id in DVR_IDS:
            bat.skip(item_id, "needs exactly one DVR branch")
        return
    W = F.window
    dvr = F.dvr_branches[0]
    other = RIGHT if dvr == LEFT else LEFT
    Hd, Ho = F.semigroup(dvr), F.semigroup(other)
    L = F.canonical_degrees(other)
    n = maximal_ideal(Ho)
    S = semigroup_ideal(Ho)
    S_L = colon(S, L)
    n_L = colon(n, L)
    other_gorenstein = F.branch_class(other).gorenstein
    X, A, J, B = canon.X, F.A, F.J, F.B
    witness = canon.witness

    def pair(dvr_ideal: RelativeIdealZ, other_ideal: RelativeIdealZ, factor=None):
        if dvr == LEFT:
            return ideal_pair_module(W, dvr_ideal, other_ideal, right_factor=factor)
        return ideal_pair_module(W, other_ideal, dvr_ideal, left_factor=factor)

    def need_witness():
        if witness is None:
            raise _Skip(f"no normalization witness ({canon.provenance})")
        return witness

    def chain():
        XB = mod_colon(X, B)
        XBJ = mod_colon(XB, J)
        observed = {"XB_inside_X": contains(X, XB), "X_inside_XBJ": contains(XBJ, X),
                    "XBJ_is_XJ": XBJ == mod_colon(X, J)}
        return observed, {name: True for name in observed}

    def socle_colon():
        xi = need_witness().xi
        proof_form = pair(semigroup_ideal(Hd), colon(L, n), xi)
        statement_form = pair(semigroup_ideal(Hd), S_L, xi)
        observed = mod_colon(X, J)
        extra = {"statement_form": statement_form.signature(),
                 "statement_form_matches": observed == statement_form}
        return observed.signature(), proof_form.signature(), extra

    def conductor_colon():
        xi = need_witness().xi
        return mod_colon(X, B).signature(), pair(maximal_ideal(Hd), L, xi).signature()

    def witness_inverse():
        w = need_witness()
        xi = {(other, d): c for d, c in w.xi.items()}
        rho = {(other, d): c for d, c in w.rho.items()}
        low = {d: c for (_, d), c in vec_mul(xi, rho).items() if d < W.N}
        L_n = colon(L, n)
        observed = {
            "xi_rho_is_one": low == {0: W.field.one},
            "rho_inside_L_colon_n": all(d in L_n for d in w.rho),
            "rho_outside_L": any(d not in L for d in w.rho),
        }
        return observed, {name: True for name in observed}

    def trace_ideal():
        rho = need_witness().rho
        return mod_colon(A, X).signature(), pair(maximal_ideal(Hd), n_L, rho).signature()

    def powers():
        if other_gorenstein:
            raise _Skip("non-DVR ring is Gorenstein")
        X2 = mod_product(X, X)
        L2 = product(L, L)
        return mod_product(X2, X) == X2, product(L2, L) == L2

    def trace_colength():
        if other_gorenstein:
            raise _Skip("non-DVR ring is Gorenstein")
        X2 = mod_product(X, X)
        L2 = product(L, L)
        if mod_product(X2, X) != X2 or product(L2, L) != L2:
            raise _Skip("powers of the canonical ideal do not stabilize at the square")
        return length_quotient(A, mod_colon(A, X)), length_between(S, S_L)

    bat.run("dvr_type", lambda: (F.invariants.r, F.branch_class(other).r + 1))
    bat.run("dvr_inclusion_chain", chain)
    bat.run("dvr_socle_colon", socle_colon)
    bat.run("dvr_conductor_colon", conductor_colon)
    bat.run("dvr_witness_inverse", witness_inverse)
    bat.run("dvr_canonical_decomposition", lambda: (X.signature(), mod_sum(mod_colon(X, B), A).signature()))
    bat.run("dvr_trace_ideal", trace_ideal)
    bat.run("dvr_trace", lambda: (
        mod_product(mod_colon(A, X), X).signature(),
        pair(maximal_ideal(Hd), product(n_L, L)).signature(),
    ))
    bat.run("dvr_powers_stable", powers)
    bat.run("dvr_trace_colength", trace_colength)


def _theorem_items(bat: Battery, F: FiberRing, cls: FiberClassification) -> None:
    lc, rc = F.left_class, F.right_class
    direct, predicted = cls.flags, cls.predicted
    dvrs = F.dvr_branches

    bat.theorem("gorenstein_iff_both_dvr", lambda: (lc.is_dvr and rc.is_dvr, direct["gorenstein"]))
    rest = THEOREM_IDS[1:]
    if len(dvrs) == 2:
        for item_id in rest:
            bat.skip(item_id, "both branches are DVRs", kind="theorem")
        return

    both_ag = lc.almost_gorenstein and rc.almost_gorenstein
    if dvrs:
        other_ag = F.branch_class(RIGHT if dvrs[0] == LEFT else LEFT).almost_gorenstein
        bat.skip("almost_gorenstein_product", "a branch is a DVR", kind="theorem")
        bat.skip("generalized_gorenstein_product", "a branch is a DVR", kind="theorem")
        bat.theorem("almost_gorenstein_dvr", lambda: (other_ag, direct["almost_gorenstein"]))
        bat.theorem("generalized_gorenstein_dvr", lambda: (other_ag, direct["generalized_gorenstein"]))
    else:
        bat.theorem("almost_gorenstein_product", lambda: (both_ag, direct["almost_gorenstein"]))
        bat.theorem("generalized_gorenstein_product", lambda: (both_ag, direct["generalized_gorenstein"]))
        bat.skip("almost_gorenstein_dvr", "no DVR branch", kind="theorem")
        bat.skip("generalized_gorenstein_dvr", "no DVR branch", kind="theorem")

    bat.theorem("almost_gorenstein_equivalence", lambda: (
        [both_ag, both_ag], [direct["almost_gorenstein"], direct["generalized_gorenstein"]],
    ))
    if F.left == F.right:
        bat.theorem("self_product", lambda: (
            [lc.almost_gorenstein, lc.almost_gorenstein],
            [direct["almost_gorenstein"], direct["generalized_gorenstein"]],
        ))
    else:
        bat.skip("self_product", "branches differ", kind="theorem")
    bat.theorem("two_almost_gorenstein", lambda: (predicted["two_almost_gorenstein"], direct["two_almost_gorenstein"]))
    bat.theorem("nearly_gorenstein", lambda: (predicted["nearly_gorenstein"], direct["nearly_gorenstein"]))


def _stability_items(bat: Battery, W: BranchWindow, cls: FiberClassification,
                     config: CampaignConfig, seed: int) -> None:
    base = exported(cls)

    def stability():
        return base, exported(_reanalyze(W.enlarged(*STABILITY_GROWTH), seed))

    def cross_field():
        if not config.cross_field:
            raise _Skip("cross-field check not requested")
        other = parse_field("prime" if W.field.mode == "rational" else "rational")
        return base, exported(_reanalyze(BranchWindow(W.left, W.right, W.N, W.D, other), seed))

    bat.run("window_stability", stability)
    bat.run("field_agreement", cross_field)


# ---------------------------------------------------------------- per pair

def _battery_in_window(W: BranchWindow, config: CampaignConfig, seed: int) -> TheoremReport:
    F = fiber_in_window(W)
    canon = canonical_ideal(F, seed)
    cls = classify_fiber(F, canon, seed)
    bat = Battery(f"{F.left} x {F.right}")

    _structure_items(bat, F)
    _canonical_items(bat, F, canon, cls, seed)
    _side_items(bat, F)
    _regular_items(bat, F, canon)
    _double_cusp_item(bat, F, cls)
    _dvr_items(bat, F, canon)
    _theorem_items(bat, F, cls)
    _stability_items(bat, W, cls, config, seed)

    canonical = {
        "provenance": canon.provenance,
        "normalized": canon.normalized,
        "probes": canon.validation.probes,
        "witness": canon.witness.to_dict(W) if canon.witness else None,
    }
    return TheoremReport(
        pair=(F.left.generators, F.right.generators),
        seed=seed,
        window={"N": W.N, "D": W.D, "stable": bat.items["window_stability"].ok},
        classification=cls.to_dict(),
        canonical=canonical,
        identities=bat.collect(IDENTITY_IDS, "identity"),
        theorems=bat.collect(THEOREM_IDS, "theorem"),
    )


def _broken_report(H1: NumericalSemigroup, H2: NumericalSemigroup, seed: int,
                   exc: Exception) -> TheoremReport:
    reason = f"{type(exc).__name__}: {exc}"
    return TheoremReport(
        pair=(H1.generators, H2.generators),
        seed=seed,
        window={"N": None, "D": None, "stable": False},
        classification=None,
        canonical=None,
        identities=[BatteryItem(i, "identity", FAILED, reason=reason) for i in IDENTITY_IDS],
        theorems=[BatteryItem(i, "theorem", FAILED, reason=reason) for i in THEOREM_IDS],
    )


def check_pair(H1: NumericalSemigroup, H2: NumericalSemigroup,
               config: Optional[CampaignConfig] = None, seed: Optional[int] = None) -> TheoremReport:
    """
    Run the whole battery on R x_k S; failures end up in the report, never raised

    The window is enlarged and the battery rerun when precision runs out.
    """
    config = config or CampaignConfig()
    seed = pair_seed(config.seed, H1.generators, H2.generators) if seed is None else seed
    start = time.perf_counter()
    try:
        report = with_window_retries(H1, H2, config.field, config.overrides, config.retries,
                                     lambda W: _battery_in_window(W, config, seed))
    except FiberCheckError as exc:
        logger.error("❌ %s x %s: %s", H1, H2, exc)
        report = _broken_report(H1, H2, seed, exc)
    if config.record_timings:
        report.timings["seconds"] = time.perf_counter() - start
    if report.failures:
        logger.warning("❌ %s x %s: %d failed items", H1, H2, len(report.failures))
    else:
        logger.info("✅ %s x %s: %d checks", H1, H2, report.checks)
    return report


# ---------------------------------------------------------------- campaigns

def flipped_table(predicted: Dict[str, bool]) -> Dict[str, bool]:
    return {name: not predicted[name] for name in FLAG_ORDER}


def comparator_selftest(reports: List[TheoremReport]) -> Dict:
    """Every judged pair must disagree with a fully flipped prediction"""
    judged = [rep for rep in reports if rep.classification is not None]
    caught = sum(1 for rep in judged if not flags_agree(rep.direct, flipped_table(rep.predicted)))
    return {"pairs": len(judged), "caught": caught, "ok": caught == len(judged)}


def symmetry_failures(reports: List[TheoremReport]) -> List[Dict]:
    by_pair = {rep.pair: rep for rep in reports if rep.classification is not None}
    found = []
    for (g1, g2), rep in by_pair.items():
        if g1 >= g2:
            continue
        mirror = by_pair.get((g2, g1))
        if mirror is not None and mirror.direct != rep.direct:
            found.append({"pair": [list(g1), list(g2)], "direct": rep.direct, "mirror": mirror.direct})
    return found


@dataclass
class CampaignResult:
    config: CampaignConfig
    semigroups: List[NumericalSemigroup]
    reports: List[TheoremReport]
    selftest: Dict
    symmetry: List[Dict]
    elapsed: float = 0.0

    @property
    def checks(self) -> int:
        return sum(rep.checks for rep in self.reports)

    @property
    def failures(self) -> int:
        failed = sum(len(rep.failures) for rep in self.reports)
        return failed + len(self.symmetry) + (0 if self.selftest["ok"] else 1)

    def counterexamples(self) -> List[Dict]:
        found = []
        for rep in self.reports:
            for item in rep.failures:
                found.append({"pair": [list(rep.pair[0]), list(rep.pair[1])], **item.to_dict()})
        return found

    def dvr_construction(self) -> Dict:
        one_dvr = [rep for rep in self.reports if rep.canonical is not None
                   and (rep.pair[0] == (1,)) != (rep.pair[1] == (1,))]
        hits = sum(1 for rep in one_dvr if rep.canonical["provenance"] == "dvr_construction")
        return {"pairs": len(one_dvr), "hits": hits, "search_fallbacks": len(one_dvr) - hits}

    def summary(self) -> Dict:
        return {
            "pairs": len(self.reports),
            "checks": self.checks,
            "failures": self.failures,
            "skipped": sum(rep.skipped for rep in self.reports),
            "semigroups": len(self.semigroups),
            "dvr_construction": self.dvr_construction(),
            "comparator_selftest": dict(self.selftest),
            "symmetry_failures": list(self.symmetry),
            "counterexamples": self.counterexamples(),
        }

    def to_dict(self) -> Dict:
        return {
            "meta": {
                "version": VERSION,
                "field": self.config.field,
                "seed": self.config.seed,
                "max_genus": self.config.max_genus,
            },
            "pairs": [rep.to_dict() for rep in self.reports],
            "summary": self.summary(),
        }


def campaign_semigroups(config: CampaignConfig) -> List[NumericalSemigroup]:
    semigroups = enumerate_semigroups(config.max_genus)
    if not config.include_dvr:
        semigroups = [H for H in semigroups if not H.is_dvr]
    return semigroups


def _campaign_job(task: Tuple[int, int, Tuple[int, ...], Tuple[int, ...], CampaignConfig]
                  ) -> Tuple[int, int, TheoremReport]:
    i, j, gens1, gens2, config = task
    return i, j, check_pair(sg_from_generators(gens1), sg_from_generators(gens2), config)


def run_campaign(config: CampaignConfig) -> CampaignResult:
    """All ordered pairs of semigroups up to config.max_genus, merged in pair order"""
    start = time.perf_counter()
    semigroups = campaign_semigroups(config)
    tasks = [(i, j, H1.generators, H2.generators, config)
             for i, H1 in enumerate(semigroups) for j, H2 in enumerate(semigroups)]
    logger.info("campaign: %d semigroups, %d pairs, %d jobs", len(semigroups), len(tasks), config.jobs)

    if config.jobs == 1:
        results = [_campaign_job(task) for task in tasks]
    else:
        chunk = max(1, len(tasks) // (4 * config.jobs))
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            results = list(pool.map(_campaign_job, tasks, chunksize=chunk))
    results.sort(key=lambda r: (r[0], r[1]))
    reports = [report for _, _, report in results]

    result = CampaignResult(
        config=config,
        semigroups=semigroups,
        reports=reports,
        selftest=comparator_selftest(reports),
        symmetry=symmetry_failures(reports),
        elapsed=time.perf_counter() - start,
    )
    if not result.selftest["ok"]:
        logger.error("❌ comparator self-test caught %d of %d flipped tables",
                     result.selftest["caught"], result.selftest["pairs"])
    logger.info("campaign done: pairs=%d checks=%d failures=%d", len(reports), result.checks, result.failures)
    return result
