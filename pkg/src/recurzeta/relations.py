"""Multiplicative relations among the conjugates: detection, certification, lattice analysis.

A relation is an integer vector ``m`` with ``prod_i alpha_i^{m_i} = 1``; the set
of relations is a lattice ``R``.  ``H0`` is the sum-zero hyperplane.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import lru_cache

from . import intlattice as il
from .ball import ComplexEnclosure
from .errors import InconsistencyError, PrecisionError
from .polyarith import ConjugateSystem, IntPolynomial, refine

MAX_PRECISION = 8192
# largest precision spent on the degree-bound certificate of a single relation
CERTIFICATE_CAP = 16384


class NormClass(Enum):
    NOT_UNIT = "not_unit"
    NORM_MINUS_ONE = "norm_minus_one"
    NORM_PLUS_ONE = "norm_plus_one"


class Verdict(Enum):
    CERTIFIED_TRUE = "certified_true"
    HEURISTIC_TRUE = "heuristic_true"
    CERTIFIED_FALSE = "certified_false"
    UNDECIDED = "undecided"

    @property
    def holds(self) -> bool:
        return self in (Verdict.CERTIFIED_TRUE, Verdict.HEURISTIC_TRUE)


def norm_class(p: IntPolynomial) -> NormClass:
    norm = (-1) ** p.degree * p.constant
    if norm == 1:
        return NormClass.NORM_PLUS_ONE
    if norm == -1:
        return NormClass.NORM_MINUS_ONE
    return NormClass.NOT_UNIT


def norm_seed(p: IntPolynomial) -> tuple[int, ...] | None:
    """Generator of ``R`` intersected with the line through e, or None."""
    r = p.degree
    nc = norm_class(p)
    if nc is NormClass.NORM_PLUS_ONE:
        return (1,) * r
    if nc is NormClass.NORM_MINUS_ONE:
        return (2,) * r
    return None


def exact_relations(system: ConjugateSystem) -> list[tuple[int, ...]]:
    """HNF basis of the relations known exactly: inverse pairs and the norm seed."""
    r = system.degree
    gens = []
    if system.recip_perm is not None:
        for i, j in enumerate(system.recip_perm):
            if i < j:
                v = [0] * r
                v[i] = v[j] = 1
                gens.append(v)
    seed = norm_seed(system.polynomial)
    if seed is not None:
        gens.append(list(seed))
    return il.hnf(gens)


@lru_cache(maxsize=32)
def _exact_cached(system: ConjugateSystem):
    return tuple(exact_relations(system))


def h0_basis(r: int) -> list[tuple[int, ...]]:
    rows = []
    for i in range(r - 1):
        v = [0] * r
        v[i], v[i + 1] = 1, -1
        rows.append(v)
    return il.hnf(rows)


@dataclass(frozen=True)
class RelationLattice:
    ambient_rank: int
    basis: tuple[tuple[int, ...], ...]
    rank: int
    verified: tuple[bool, ...]
    confidence_bits: int
    statuses: tuple[str, ...] = field(default=(), compare=False)

    def to_json(self) -> dict:
        return {
            "ambient_rank": self.ambient_rank,
            "basis": [list(v) for v in self.basis],
            "rank": self.rank,
            "verified": list(self.verified),
            "confidence_bits": self.confidence_bits,
        }

    def contains(self, v) -> bool:
        return il.contains(self.basis, v)


def make_lattice(r: int, gens, confidence_bits: int = 0, certified=None) -> RelationLattice:
    """Lattice from generators; ``certified`` (if given) spans the exactly certified part."""
    basis = tuple(il.hnf(gens)) if gens else ()
    if certified is None:
        statuses = ("certified",) * len(basis)
    else:
        cert = il.hnf(certified) if certified else []
        statuses = tuple("certified" if il.contains(cert, v) else "heuristic" for v in basis)
    return RelationLattice(r, basis, len(basis), (True,) * len(basis), confidence_bits, statuses)


def h0_lattice(r: int) -> RelationLattice:
    return make_lattice(r, h0_basis(r))


# ---------------------------------------------------------------- verification

def _split_products(system: ConjugateSystem, m):
    """``A - B`` with ``A = prod_{m_i>0} alpha_i^{m_i}`` and ``B = prod_{m_i<0} alpha_i^{-m_i}``."""
    prec = system.work_prec
    a = ComplexEnclosure.from_value(1, prec)
    b = ComplexEnclosure.from_value(1, prec)
    for z, k in zip(system.roots, m):
        if k > 0:
            a = a * z.pow_int(k)
        elif k < 0:
            b = b * z.pow_int(-k)
    return a - b


def certificate_bits(system: ConjugateSystem, m) -> int:
    """Bits below which ``|A - B|`` forces ``A = B``.

    ``A - B`` is an algebraic integer of degree at most ``r!`` whose conjugates
    are bounded by ``alpha^P + alpha^Q`` (P, Q the positive/negative exponent
    sums); a nonzero one has norm at least 1, hence
    ``|A - B| >= (alpha^P + alpha^Q)^{-(r! - 1)}``.
    """
    pos = sum(k for k in m if k > 0)
    neg = -sum(k for k in m if k < 0)
    alpha_up = float(system.roots[0].re_upper()) * (1 + 1e-12)
    height = math.log2(alpha_up ** pos + alpha_up ** neg)
    return math.ceil((math.factorial(system.degree) - 1) * (height + 1e-9)) + 2


def _interval_verdict(system: ConjugateSystem, m, width_bits: int):
    d = _split_products(system, m)
    if not d.contains_zero():
        return Verdict.CERTIFIED_FALSE
    if d.radius_fraction() >= Fraction(1, 2 ** width_bits):
        return Verdict.UNDECIDED
    return Verdict.HEURISTIC_TRUE


def verify_relation(system: ConjugateSystem, m, precision_bits: int | None = None,
                    rigorous: bool = True) -> Verdict:
    """Decide whether ``prod alpha_i^{m_i} = 1``.

    Exact fast path for inverse pairs and the norm seed; otherwise the
    enclosure must contain 1 with width below ``2^-precision_bits`` at two
    precision levels (heuristic), upgraded to certified when the degree-bound
    certificate is affordable.  ``CERTIFIED_FALSE`` whenever an enclosure
    excludes 1.
    """
    m = tuple(int(k) for k in m)
    if len(m) != system.degree:
        raise ValueError(f"relation vector must have length {system.degree}")
    return _verify_cached(system, m, precision_bits, rigorous)


@lru_cache(maxsize=4096)
def _verify_cached(system: ConjugateSystem, m, precision_bits, rigorous) -> Verdict:
    if not any(m):
        return Verdict.CERTIFIED_TRUE
    if il.contains(_exact_cached(system), m):
        return Verdict.CERTIFIED_TRUE
    target = precision_bits or system.precision_bits // 2
    level1 = refine(system, max(system.precision_bits, target + 64))
    first = _interval_verdict(level1, m, target)
    if first is not Verdict.HEURISTIC_TRUE:
        return first
    level2 = refine(system, 2 * level1.precision_bits)
    second = _interval_verdict(level2, m, target)
    if second is not Verdict.HEURISTIC_TRUE:
        return second
    if rigorous:
        bits = certificate_bits(system, m)
        if bits <= CERTIFICATE_CAP:
            hi = refine(system, max(level2.precision_bits, _pow2_at_least(bits + 96)))
            d = _split_products(hi, m)
            if not d.contains_zero():
                return Verdict.CERTIFIED_FALSE
            if d.mod_upper() < Fraction(1, 2 ** bits):
                return Verdict.CERTIFIED_TRUE
    return Verdict.HEURISTIC_TRUE


def _pow2_at_least(n: int) -> int:
    p = 64
    while p < n:
        p *= 2
    return p


# ---------------------------------------------------------------- detection

def _scaled(ball: ComplexEnclosure, bits: int) -> int:
    re, _ = ball.mid_fraction()
    return round(re * 2 ** bits)


def _lll_candidates(system: ConjugateSystem, confidence_bits: int, max_coeff: int):
    r = system.degree
    two_pi = ComplexEnclosure.pi(system.work_prec) * 2
    rows = []
    for j in range(r):
        e = [0] * (r + 1)
        e[j] = 1
        rows.append(e + [_scaled(system.log_moduli[j], confidence_bits),
                         _scaled(system.args[j], confidence_bits)])
    rows.append([0] * r + [1, 0, _scaled(two_pi, confidence_bits)])
    reduced = il.lll(rows)
    slack = (r + 2) * max_coeff
    out = []
    for row in reduced:
        m = tuple(row[:r])
        if not any(m) or max(abs(k) for k in m) > max_coeff:
            continue
        if abs(row[r + 1]) > slack or abs(row[r + 2]) > slack:
            continue
        out.append(m)
    return out


def find_relation_lattice(system: ConjugateSystem, precision_bits: int | None = None,
                          confidence_bits: int = 128, max_coeff: int = 32,
                          seed: bool = True, max_precision: int = MAX_PRECISION) -> RelationLattice:
    """HNF basis of the relation lattice detected at ``confidence_bits``.

    Relations with coefficients above ``max_coeff`` or invisible at the
    confidence level are not searched for; absence is heuristic.
    """
    r = system.degree
    prec = max(precision_bits or system.precision_bits, 2 * confidence_bits)
    conf = confidence_bits
    exact = exact_relations(system) if seed else []
    while True:
        current = refine(system, prec)
        gens = [list(v) for v in exact]
        certified = [list(v) for v in exact]
        refuted, undecided = None, False
        for m in _lll_candidates(current, conf, max_coeff):
            verdict = verify_relation(current, m)
            if verdict is Verdict.CERTIFIED_TRUE:
                gens.append(list(m))
                certified.append(list(m))
            elif verdict is Verdict.HEURISTIC_TRUE:
                gens.append(list(m))
            elif verdict is Verdict.CERTIFIED_FALSE:
                refuted = m
            else:
                undecided = True
        if refuted is None and not undecided:
            return make_lattice(r, gens, confidence_bits, certified)
        if 2 * prec > max_precision:
            if refuted is not None:
                raise InconsistencyError(f"lattice reduction keeps proposing the false relation {list(refuted)}",
                                         candidate=refuted)
            raise PrecisionError("relation candidates undecided at the precision cap", module="relations")
        prec *= 2
        conf *= 2


# ---------------------------------------------------------------- analysis

def intersect_with_H0(L: RelationLattice) -> RelationLattice:
    """Sublattice of relations whose exponents sum to zero."""
    basis = il.kernel_of_functional(L.basis, [1] * L.ambient_rank)
    cert = [v for v, s in zip(L.basis, L.statuses) if s == "certified"]
    cert_h0 = il.kernel_of_functional(il.hnf(cert), [1] * L.ambient_rank) if cert else []
    statuses = tuple("certified" if il.contains(cert_h0, v) else "heuristic" for v in basis)
    return RelationLattice(L.ambient_rank, tuple(basis), len(basis), (True,) * len(basis),
                           L.confidence_bits, statuses)


def is_trivial(L: RelationLattice) -> bool:
    """Every relation has all exponents equal."""
    return all(len(set(v)) == 1 for v in L.basis)


def line_through_e(L: RelationLattice) -> tuple[int, ...] | None:
    """Generator of ``L`` intersected with the line through e (None if trivial intersection)."""
    inter = il.intersection(L.basis, [(1,) * L.ambient_rank]) if L.basis else []
    return inter[0] if inter else None


@dataclass(frozen=True)
class InjectivityVerdict:
    injective: bool
    witness: tuple[int, ...] | None
    confidence_bits: int
    relations: RelationLattice
    h0_part: RelationLattice


def shortest_vector(basis) -> tuple[int, ...] | None:
    if not basis:
        return None
    return min(basis, key=lambda v: (sum(x * x for x in v), v))


def decide_injectivity(system: ConjugateSystem, lattice: RelationLattice | None = None,
                       **kwargs) -> InjectivityVerdict:
    """The pole indexation is injective iff no nonzero relation has exponent sum 0."""
    if lattice is None:
        lattice = find_relation_lattice(system, **kwargs)
    h0 = intersect_with_H0(lattice)
    return InjectivityVerdict(h0.rank == 0, shortest_vector(h0.basis), lattice.confidence_bits, lattice, h0)


SUFFICIENT_ASSERTIONS = ("galois_full_symmetric", "galois_alternating", "galois_2_homogeneous")


def _is_prime(n: int) -> bool:
    return n >= 2 and all(n % d for d in range(2, math.isqrt(n) + 1))


def sufficient_conditions(system: ConjugateSystem, asserted_flags=(), lattice: RelationLattice | None = None) -> dict:
    """Known sufficient conditions for a trivial relation lattice.

    Pisot-ness and prime degree are computed; Galois-group conditions are
    only echoed from caller assertions.
    """
    asserted = set(asserted_flags)
    unknown = asserted - set(SUFFICIENT_ASSERTIONS)
    if unknown:
        raise ValueError(f"unknown assertions: {sorted(unknown)}")
    conditions = [
        {"condition": "pisot", "satisfied": system.flags.is_pisot, "source": "computed"},
        {"condition": "prime_degree", "satisfied": _is_prime(system.degree), "source": "computed"},
        {"condition": "galois_symmetric_or_alternating",
         "satisfied": bool(asserted & {"galois_full_symmetric", "galois_alternating"}),
         "source": "user-asserted"},
        {"condition": "galois_2_homogeneous", "satisfied": "galois_2_homogeneous" in asserted,
         "source": "user-asserted"},
    ]
    any_ok = any(c["satisfied"] for c in conditions)
    report = {"conditions": conditions, "verdict": "module trivial" if any_ok else "inconclusive"}
    if lattice is None:
        report["cross_check"] = "not run"
    elif any_ok and not is_trivial(lattice):
        report["cross_check"] = "conflict"
    else:
        report["cross_check"] = "consistent"
    return report


def rank_arithmetic_check(L1: RelationLattice, L2: RelationLattice) -> dict:
    """Both sides of rk(M1) + rk(M2) = rk(M1 + M2) + rk(M1 cap M2)."""
    if L1.ambient_rank != L2.ambient_rank:
        raise ValueError("lattices live in different ambient spaces")
    lhs = L1.rank + L2.rank
    rhs = il.rank(list(L1.basis) + list(L2.basis)) + len(il.intersection(L1.basis, L2.basis))
    return {"lhs": lhs, "rhs": rhs}
