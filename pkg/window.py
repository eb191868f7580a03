"""
Two-branch window algebra
Exact linear algebra over k((t)) x k((s)) cut to the degrees [-D, N) per branch.

Every submodule handled here contains all pure monomials of degree >= N on both
branches, so it is stored as the reduced echelon basis of M / (t^N k[[t]] x s^N k[[s]]).
Generators are exact Laurent polynomials; results whose certified tail lands past N,
or whose support drops below -D, raise PrecisionExhausted and the caller retries on
an enlarged window.
"""
import hashlib
import logging
import random
from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Dict, List, Optional, Sequence, Tuple

from sympy import isprime
from sympy.polys.domains import GF, QQ
from sympy.polys.matrices import DomainMatrix

from config import DEFAULT_PRIME
from semigroup import (
    FiberCheckError,
    InvariantViolation,
    NotContained,
    NumericalSemigroup,
    RelativeIdealZ,
    minimal_relideal_generators,
)

logger = logging.getLogger(__name__)

LEFT, RIGHT = 0, 1

Key = Tuple[int, int]
Vector = Dict[Key, Any]

MIN_PRIME = 10 ** 6


class FieldError(FiberCheckError):
    pass


class BadOverride(FiberCheckError):
    pass


class NotFaithful(FiberCheckError):
    pass


class ClosureOverflow(FiberCheckError):
    pass


class PrecisionExhausted(FiberCheckError):
    pass


class Inconclusive(FiberCheckError):
    pass


@lru_cache(maxsize=None)
def _domain(mode: str, modulus: Optional[int]):
    if mode == "rational":
        return QQ
    return GF(modulus)


@dataclass(frozen=True)
class ExactScalar:
    """The coefficient field: rationals, or integers modulo a large prime"""
    mode: str = "rational"
    modulus: Optional[int] = None

    @property
    def domain(self):
        return _domain(self.mode, self.modulus)

    @property
    def one(self):
        return self.domain.one

    @property
    def zero(self):
        return self.domain.zero

    def __call__(self, n: int):
        return self.domain(n)

    def text(self, a) -> str:
        return str(self.domain.to_sympy(a))

    def label(self) -> str:
        return "rational" if self.mode == "rational" else f"prime:{self.modulus}"


def parse_field(text: str) -> ExactScalar:
    """
    Parse "rational" or "prime:<p>"

    Raises:
        FieldError: text is neither form
        BadOverride: p is not a prime of at least 10^6
    """
    text = (text or "").strip()
    if text == "rational":
        return ExactScalar("rational")
    if text == "prime":
        return ExactScalar("prime", DEFAULT_PRIME)
    if text.startswith("prime:"):
        raw = text.split(":", 1)[1]
        try:
            p = int(raw)
        except ValueError:
            raise FieldError(f"bad modulus {raw!r} in field {text!r}")
        if p < MIN_PRIME:
            raise BadOverride(f"modulus {p} is below {MIN_PRIME}")
        if not isprime(p):
            raise BadOverride(f"modulus {p} is not prime")
        return ExactScalar("prime", p)
    raise FieldError(f"unknown field {text!r}; use rational or prime:<p>")


@dataclass(frozen=True)
class BranchWindow:
    left: NumericalSemigroup
    right: NumericalSemigroup
    N: int
    D: int
    field: ExactScalar

    @property
    def semigroups(self) -> Tuple[NumericalSemigroup, NumericalSemigroup]:
        return (self.left, self.right)

    def conductor(self, branch: int) -> int:
        """Every pure branch monomial of degree >= this lies in A"""
        return max(self.semigroups[branch].frobenius + 1, 1)

    def multiplicity(self, branch: int) -> int:
        return self.semigroups[branch].multiplicity

    def ring_multipliers(self) -> List[Key]:
        """Monomials generating A as a complete k-algebra, as (branch, degree)"""
        return [(LEFT, h) for h in self.left.generators] + \
               [(RIGHT, h) for h in self.right.generators]

    def multipliers(self, ambient: str) -> List[Key]:
        if ambient == "A":
            return self.ring_multipliers()
        if ambient == "B":
            return [(LEFT, 0)] + self.ring_multipliers()
        if ambient == "Abar":
            return [(LEFT, 0), (LEFT, 1), (RIGHT, 1)]
        raise InvariantViolation(f"unknown ambient ring {ambient!r}")

    def enlarged(self, extra_N: int = 8, extra_D: int = 2) -> "BranchWindow":
        return BranchWindow(self.left, self.right, self.N + extra_N, self.D + extra_D, self.field)


def window_bounds(H1: NumericalSemigroup, H2: NumericalSemigroup) -> Tuple[int, int]:
    """Smallest admissible (N, D)"""
    top_f = max(H1.frobenius, H2.frobenius)
    top_gen = max(H1.generators[-1], H2.generators[-1])
    return 2 * (top_f + 2) + top_gen + 8, top_f + 2


def build_window(H1: NumericalSemigroup, H2: NumericalSemigroup, field="rational",
                 overrides: Optional[Dict[str, Optional[int]]] = None) -> BranchWindow:
    """
    Size the window for a pair

    Args:
        field: ExactScalar or its text form
        overrides: optional {"N": .., "D": ..}; each must respect the lower bound

    Raises:
        BadOverride: an override below the bound, or a bad prime
    """
    scalar = field if isinstance(field, ExactScalar) else parse_field(field)
    min_N, min_D = window_bounds(H1, H2)
    overrides = overrides or {}
    N = overrides.get("N") or min_N
    D = overrides.get("D")
    D = min_D if D is None else D
    if N < min_N:
        raise BadOverride(f"window N={N} is below the bound {min_N} for {H1} x {H2}")
    if D < min_D:
        raise BadOverride(f"negative offset D={D} is below the bound {min_D} for {H1} x {H2}")
    return BranchWindow(H1, H2, N, D, scalar)


# ---------------------------------------------------------------- vectors

def monomial(W: BranchWindow, branch: int, degree: int, coeff=None) -> Vector:
    return {(branch, degree): W.field.one if coeff is None else coeff}


def element(W: BranchWindow, left: Dict[int, Any], right: Dict[int, Any]) -> Vector:
    """Build a vector from per-branch {degree: coefficient} maps (int coefficients allowed)"""
    out: Vector = {}
    for branch, part in ((LEFT, left), (RIGHT, right)):
        for d, c in part.items():
            c = W.field(c) if isinstance(c, int) else c
            if c:
                out[(branch, d)] = c
    return out


def unit(W: BranchWindow) -> Vector:
    return element(W, {0: 1}, {0: 1})


def branch_part(v: Vector, branch: int) -> Dict[int, Any]:
    return {d: c for (b, d), c in v.items() if b == branch}


def valuation(v: Vector, branch: int) -> Optional[int]:
    degrees = [d for (b, d) in v if b == branch]
    return min(degrees) if degrees else None


def vec_mul(a: Vector, b: Vector) -> Vector:
    """Exact branchwise product"""
    out: Vector = {}
    for (ba, da), ca in a.items():
        for (bb, db), cb in b.items():
            if ba != bb:
                continue
            key = (ba, da + db)
            total = out.get(key)
            total = ca * cb if total is None else total + ca * cb
            if total:
                out[key] = total
            else:
                out.pop(key, None)
    return out


def vec_add(a: Vector, b: Vector, scale=None) -> Vector:
    out = dict(a)
    for key, c in b.items():
        c = c if scale is None else scale * c
        total = out.get(key)
        total = c if total is None else total + c
        if total:
            out[key] = total
        else:
            out.pop(key, None)
    return out


def mul_monomial(v: Vector, mult: Key) -> Vector:
    branch, degree = mult
    return {(b, d + degree): c for (b, d), c in v.items() if b == branch}


def truncate(W: BranchWindow, v: Vector) -> Vector:
    """Drop degrees >= N; degrees below -D are out of range"""
    out = {}
    for (b, d), c in v.items():
        if d < -W.D:
            raise PrecisionExhausted(f"degree {d} below the window floor {-W.D}")
        if d < W.N:
            out[(b, d)] = c
    return out


def _drop_high(W: BranchWindow, v: Vector) -> Vector:
    return {k: c for k, c in v.items() if k[1] < W.N}


def series_inverse(W: BranchWindow, part: Dict[int, Any], precision: int) -> Dict[int, Any]:
    """
    Inverse of a one-branch Laurent polynomial up to degree < precision

    part maps degree -> coefficient and must be nonzero
    """
    if not part:
        raise NotFaithful("cannot invert zero")
    low = min(part)
    lead = part[low]
    shifted = {d - low: c for d, c in part.items()}
    inv_lead = W.field.one / lead
    coeffs = [inv_lead]
    length = max(precision + low, 1)
    for n in range(1, length):
        acc = W.field.zero
        for k in range(1, n + 1):
            pk = shifted.get(k)
            if pk:
                acc = acc + pk * coeffs[n - k]
        coeffs.append(-inv_lead * acc)
    return {n - low: c for n, c in enumerate(coeffs) if c and n - low < precision}


# ---------------------------------------------------------------- echelon kernel

class _Echelon:
    """
    Sparse reduced row-echelon basis; each row is keyed by its pivot (smallest key),
    normalized to 1 there, and is zero at every other pivot
    """

    def __init__(self, field: ExactScalar):
        self.field = field
        self.rows: Dict[Key, Vector] = {}

    def copy(self) -> "_Echelon":
        other = _Echelon(self.field)
        other.rows = {p: dict(r) for p, r in self.rows.items()}
        return other

    def reduce(self, v: Vector) -> Vector:
        out = dict(v)
        for p in [k for k in v if k in self.rows]:
            c = out.get(p)
            if c:
                out = vec_add(out, self.rows[p], scale=-c)
        return out

    def add(self, v: Vector) -> bool:
        r = self.reduce(v)
        if not r:
            return False
        p = min(r)
        inv = self.field.one / r[p]
        r = {k: c * inv for k, c in r.items()}
        for q, row in self.rows.items():
            c = row.get(p)
            if c:
                self.rows[q] = vec_add(row, r, scale=-c)
        self.rows[p] = r
        return True

    def __len__(self) -> int:
        return len(self.rows)


# ---------------------------------------------------------------- submodules

class WindowSubmodule:
    """
    A-submodule M of Q(A) containing every pure monomial of degree >= N

    rows is the reduced echelon basis of M modulo those monomials; every row is an
    exact element of M. tail[i] is the smallest degree from which all branch-i
    monomials are members, valuation[i] the smallest branch-i degree occurring.
    """

    def __init__(self, window: BranchWindow, echelon: _Echelon):
        self.window = window
        self._echelon = echelon
        self.rows = echelon.rows
        self.tail = tuple(self._tail(b) for b in (LEFT, RIGHT))
        self.valuation = tuple(self._valuation(b) for b in (LEFT, RIGHT))
        self._mingens: Optional[List[Vector]] = None

    def _tail(self, branch: int) -> int:
        t = self.window.N
        one = self.window.field.one
        while True:
            key = (branch, t - 1)
            row = self.rows.get(key)
            if row is None or len(row) != 1 or row[key] != one:
                return t
            t -= 1

    def _valuation(self, branch: int) -> int:
        degrees = [d for row in self.rows.values() for (b, d) in row if b == branch]
        return min(degrees + [self.window.N])

    @property
    def dim(self) -> int:
        return len(self.rows)

    def basis(self) -> List[Vector]:
        return [self.rows[p] for p in sorted(self.rows)]

    def has(self, v: Vector) -> bool:
        return not self._echelon.reduce(_drop_high(self.window, v))

    def reduce(self, v: Vector) -> Vector:
        return self._echelon.reduce(_drop_high(self.window, v))

    def echelon(self) -> _Echelon:
        return self._echelon.copy()

    def __eq__(self, other) -> bool:
        if not isinstance(other, WindowSubmodule):
            return NotImplemented
        return self.window == other.window and self.rows == other.rows

    def __hash__(self) -> int:
        return hash(self.digest())

    def digest(self) -> str:
        text = self.window.field.text
        parts = []
        for p in sorted(self.rows):
            row = self.rows[p]
            parts.append(";".join(f"{b}:{d}={text(row[(b, d)])}" for (b, d) in sorted(row)))
        return hashlib.sha256("|".join(parts).encode("utf-8")).hexdigest()

    def signature(self) -> Dict:
        return {"dim": self.dim, "tail": list(self.tail), "digest": self.digest()[:16]}

    def __repr__(self) -> str:
        return f"WindowSubmodule(dim={self.dim}, tail={self.tail}, valuation={self.valuation})"


def _from_echelon(W: BranchWindow, ech: _Echelon) -> WindowSubmodule:
    return WindowSubmodule(W, ech)


def submodule_from_generators(W: BranchWindow, gens: Sequence[Vector], ambient: str = "A") -> WindowSubmodule:
    """
    The ambient-module generated by gens, together with the monomials of degree >= N

    Raises:
        NotFaithful: some branch is missed by every generator
        PrecisionExhausted: the certified tail lies past N, or a degree is below -D
    """
    gens = [g for g in gens if g]
    certified = []
    for branch in (LEFT, RIGHT):
        vals = [valuation(g, branch) for g in gens]
        vals = [v for v in vals if v is not None]
        if not vals:
            raise NotFaithful(f"generators miss branch {branch}")
        certified.append(W.conductor(branch) + min(vals))
    if max(certified) > W.N:
        raise PrecisionExhausted(f"certified tail {certified} exceeds N={W.N}")

    mults = W.multipliers(ambient)
    ech = _Echelon(W.field)
    queue = deque()
    for g in gens:
        v = truncate(W, g)
        if v and ech.add(v):
            queue.append(v)
    while queue:
        v = queue.popleft()
        for m in mults:
            w = _drop_high(W, mul_monomial(v, m))
            if w and ech.add(w):
                queue.append(w)

    module = _from_echelon(W, ech)
    for branch in (LEFT, RIGHT):
        if module.tail[branch] > certified[branch]:
            raise ClosureOverflow(
                f"observed tail {module.tail[branch]} above certified {certified[branch]} on branch {branch}"
            )
    return module


def ambient_ring(W: BranchWindow) -> WindowSubmodule:
    """A = k(1,1) + m x n"""
    return submodule_from_generators(W, [unit(W)])


def maximal_ideal_module(W: BranchWindow) -> WindowSubmodule:
    """J = m x n"""
    gens = [monomial(W, LEFT, h) for h in W.left.generators]
    gens += [monomial(W, RIGHT, h) for h in W.right.generators]
    return submodule_from_generators(W, gens)


def product_ring(W: BranchWindow) -> WindowSubmodule:
    """B = R x S"""
    return submodule_from_generators(W, [monomial(W, LEFT, 0), monomial(W, RIGHT, 0)], ambient="B")


def normalization(W: BranchWindow) -> WindowSubmodule:
    """Abar = k[[t]] x k[[s]]"""
    return submodule_from_generators(W, [monomial(W, LEFT, 0), monomial(W, RIGHT, 0)], ambient="Abar")


def principal(W: BranchWindow, q: Vector) -> WindowSubmodule:
    return submodule_from_generators(W, [q])


def ideal_pair_module(W: BranchWindow, left: RelativeIdealZ, right: RelativeIdealZ,
                      left_factor: Optional[Dict[int, Any]] = None,
                      right_factor: Optional[Dict[int, Any]] = None) -> WindowSubmodule:
    """
    f·E1 x g·E2 for relative ideals E1 over H1 and E2 over H2

    The optional factors are one-branch Laurent polynomials (degree -> coefficient).
    """
    gens = []
    for branch, ideal, factor in ((LEFT, left, left_factor), (RIGHT, right, right_factor)):
        for k in minimal_relideal_generators(ideal):
            mono = monomial(W, branch, k)
            if factor is not None:
                mono = vec_mul(mono, {(branch, d): c for d, c in factor.items()})
            gens.append(mono)
    return submodule_from_generators(W, gens)


def minimal_generators(M: WindowSubmodule) -> List[Vector]:
    """
    Rows of M lifting a basis of M/JM

    Raises:
        PrecisionExhausted: JM is not known to contain the degree >= N monomials
    """
    if M._mingens is not None:
        return M._mingens
    W = M.window
    for branch in (LEFT, RIGHT):
        if M.tail[branch] + W.multiplicity(branch) > W.N:
            raise PrecisionExhausted(f"tail {M.tail} too close to N={W.N} for a minimal basis")
    jm = _Echelon(W.field)
    for row in M.basis():
        for m in W.ring_multipliers():
            w = _drop_high(W, mul_monomial(row, m))
            if w:
                jm.add(w)
    found = []
    for row in M.basis():
        if jm.add(row):
            found.append(row)
    M._mingens = found
    return found


def mu(M: WindowSubmodule) -> int:
    return len(minimal_generators(M))


def _check_window(M: WindowSubmodule, M2: WindowSubmodule) -> BranchWindow:
    if M.window != M2.window:
        raise InvariantViolation("submodules live in different windows")
    return M.window


def mod_sum(M: WindowSubmodule, M2: WindowSubmodule) -> WindowSubmodule:
    W = _check_window(M, M2)
    ech = M.echelon()
    for row in M2.basis():
        ech.add(row)
    return _from_echelon(W, ech)


def mod_product(M: WindowSubmodule, M2: WindowSubmodule) -> WindowSubmodule:
    W = _check_window(M, M2)
    gens = [vec_mul(a, b) for a in minimal_generators(M) for b in minimal_generators(M2)]
    return submodule_from_generators(W, gens)


def mod_power(M: WindowSubmodule, n: int) -> WindowSubmodule:
    if n < 1:
        raise InvariantViolation("powers start at 1")
    out = M
    for _ in range(n - 1):
        out = mod_product(out, M)
    return out


def mod_scale(M: WindowSubmodule, q: Vector) -> WindowSubmodule:
    """q·M"""
    return submodule_from_generators(M.window, [vec_mul(q, g) for g in minimal_generators(M)])


def mod_colon(M: WindowSubmodule, M2: WindowSubmodule) -> WindowSubmodule:
    """
    M:M2 = {q : q·M2 ⊆ M}

    Unknown coefficients of q run over [v(M) - v(M2), tail(M) - v(M2)) per branch;
    every monomial from the upper end on is a member. The constraints say that
    q·g reduces to zero modulo M for each minimal generator g of M2.
    """
    W = _check_window(M, M2)
    gens = minimal_generators(M2)
    bands = []
    for branch in (LEFT, RIGHT):
        lo = M.valuation[branch] - M2.valuation[branch]
        hi = M.tail[branch] - M2.valuation[branch]
        if hi > W.N:
            raise PrecisionExhausted(f"colon needs degree {hi} on branch {branch}, N={W.N}")
        if hi < -W.D:
            raise PrecisionExhausted(f"colon reaches degree {hi} below {-W.D}")
        bands.append((lo, hi))
    unknowns = [(b, d) for b, (lo, hi) in zip((LEFT, RIGHT), bands) for d in range(lo, hi)]

    ech = _Echelon(W.field)
    for branch, (lo, hi) in zip((LEFT, RIGHT), bands):
        for d in range(hi, W.N):
            ech.add(monomial(W, branch, d))

    if unknowns:
        columns = []
        for u in unknowns:
            images = {}
            for idx, g in enumerate(gens):
                rem = M.reduce(mul_monomial(g, u))
                for key, c in rem.items():
                    images[(idx, key)] = c
            columns.append(images)
        constraint_keys = sorted({k for col in columns for k in col})
        domain = W.field.domain
        if constraint_keys:
            index = {k: i for i, k in enumerate(constraint_keys)}
            dense = [[domain.zero] * len(unknowns) for _ in constraint_keys]
            for j, col in enumerate(columns):
                for k, c in col.items():
                    dense[index[k]][j] = c
            matrix = DomainMatrix(dense, (len(constraint_keys), len(unknowns)), domain)
            null = matrix.nullspace().to_Matrix()
            solutions = [
                [domain.from_sympy(null[i, j]) for j in range(null.cols)]
                for i in range(null.rows)
            ]
        else:
            solutions = [
                [domain.one if i == j else domain.zero for j in range(len(unknowns))]
                for i in range(len(unknowns))
            ]
        for sol in solutions:
            vec = {u: c for u, c in zip(unknowns, sol) if c}
            if vec and min(d for (_, d) in vec) < -W.D:
                raise PrecisionExhausted("colon solution below the window floor")
            if vec:
                ech.add(vec)
    return _from_echelon(W, ech)


def contains(M: WindowSubmodule, M2: WindowSubmodule) -> bool:
    """M2 ⊆ M"""
    _check_window(M, M2)
    return all(M.has(row) for row in M2.basis())


def mod_equals(M: WindowSubmodule, M2: WindowSubmodule) -> bool:
    """Same window and same echelon basis"""
    _check_window(M, M2)
    return M == M2


def length_quotient(M: WindowSubmodule, M2: WindowSubmodule) -> int:
    """ℓ(M/M2) for M2 ⊆ M"""
    if not contains(M, M2):
        raise NotContained(f"{M2!r} is not contained in {M!r}")
    return M.dim - M2.dim


def blowup(M: WindowSubmodule, limit: Optional[int] = None) -> Tuple[WindowSubmodule, int]:
    """Stabilized union of the powers of M, for M containing 1"""
    W = M.window
    if not M.has(unit(W)):
        raise InvariantViolation("blowup needs a module containing 1")
    limit = limit if limit is not None else 2 * (W.N + W.D) + 2
    current = M
    for step in range(limit + 1):
        nxt = mod_product(current, M)
        if mod_equals(nxt, current):
            return current, step
        current = nxt
    raise ClosureOverflow(f"powers did not stabilize within {limit} steps")


# ---------------------------------------------------------------- invariants

@dataclass
class RingInvariants:
    v: int
    e: int
    r: int
    r_alt: int
    hilbert: List[int]
    reduction_number: int
    e_parameter: int


def _second_element(H: NumericalSemigroup) -> int:
    members = [n for n in range(1, H.frobenius + 2 * H.generators[-1] + 2) if n in H]
    return members[1]


def ring_invariants(W: BranchWindow, A: WindowSubmodule, J: WindowSubmodule) -> RingInvariants:
    """
    Embedding dimension, multiplicity and type of the local ring A

    e is the stabilized difference of the Hilbert function ℓ(A/J^{n+1}), found at the first
    n with J^{n+1} = xJ^n for x = (t^e1, s^e2); r = ℓ((xA:J)/xA), repeated with a second
    parameter x' whose entries are the next members after e1 and e2.
    """
    J2 = mod_product(J, J)
    v = length_quotient(J, J2)

    x = element(W, {W.multiplicity(LEFT): 1}, {W.multiplicity(RIGHT): 1})
    x_alt = element(W, {_second_element(W.left): 1}, {_second_element(W.right): 1})

    hilbert = [length_quotient(A, J)]
    power = J
    limit = W.multiplicity(LEFT) + W.multiplicity(RIGHT) + 1
    e = None
    reduction = 0
    for n in range(1, limit + 1):
        nxt = mod_product(power, J)
        hilbert.append(length_quotient(A, nxt))
        if mod_equals(nxt, mod_scale(power, x)):
            e = length_quotient(power, nxt)
            reduction = n
            break
        power = nxt
    if e is None:
        raise PrecisionExhausted(f"Hilbert function did not stabilize within {limit} powers")

    xA = principal(W, x)
    e_parameter = length_quotient(A, xA)
    if e_parameter != e:
        raise InvariantViolation(f"multiplicity {e} differs from ℓ(A/xA) = {e_parameter}")
    r = length_quotient(mod_colon(xA, J), xA)
    xA_alt = principal(W, x_alt)
    r_alt = length_quotient(mod_colon(xA_alt, J), xA_alt)
    if r != r_alt:
        raise InvariantViolation(f"type depends on the parameter: {r} vs {r_alt}")
    return RingInvariants(v=v, e=e, r=r, r_alt=r_alt, hilbert=hilbert,
                          reduction_number=reduction, e_parameter=e_parameter)


# ---------------------------------------------------------------- isomorphism

def _faithful(q: Vector) -> bool:
    return valuation(q, LEFT) is not None and valuation(q, RIGHT) is not None


def iso_test(W: BranchWindow, M: WindowSubmodule, M2: WindowSubmodule,
             seed: int = 0, trials: int = 32) -> Tuple[bool, Optional[Vector]]:
    """
    Decide M ≅ M2 by searching for q with q·M = M2

    Candidates come from M2:M, first its basis, then random combinations.

    Returns:
        (True, q) with q re-verified, or (False, None)

    Raises:
        Inconclusive: prime-field mode and no witness found
    """
    if mu(M) != mu(M2):
        return False, None
    wide = submodule_from_generators(W, minimal_generators(M), ambient="Abar")
    wide2 = submodule_from_generators(W, minimal_generators(M2), ambient="Abar")
    if length_quotient(wide, M) != length_quotient(wide2, M2):
        return False, None

    S = mod_colon(M2, M)
    basis = S.basis()
    rng = random.Random(seed)
    candidates = list(basis)
    for _ in range(trials):
        q: Vector = {}
        for row in basis:
            q = vec_add(q, row, scale=W.field(rng.randint(1, MIN_PRIME)))
        candidates.append(q)

    for q in candidates:
        if not _faithful(q):
            continue
        try:
            image = mod_scale(M, q)
        except (PrecisionExhausted, NotFaithful):
            continue
        if image.dim == M2.dim and contains(M2, image):
            return True, q
    if W.field.mode == "prime":
        raise Inconclusive("no isomorphism witness found over the prime field; rerun over the rationals")
    return False, None
