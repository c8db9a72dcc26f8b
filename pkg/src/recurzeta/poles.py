"""Candidate poles s_kappa of the zeta function, exact collision grouping, and fibre counts.

A multi-index ``kappa = (k_2, ..., k_r)`` is a tuple of nonnegative integers,
one per non-dominant root in Perron order.  Its extended vector is
``(-|kappa|, k_2, ..., k_r)``.  Two multi-indices give the same point exactly
when the difference of their extended vectors is a relation with exponent sum 0.
"""
from __future__ import annotations

import bisect
import functools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations_with_replacement

from . import intlattice as il
from .ball import ComplexEnclosure, _ZERO
from .errors import LatticeError, PrecisionError
from .polyarith import ConjugateSystem, refine
from .relations import RelationLattice, Verdict, exact_relations, verify_relation


def extended(kappa) -> tuple[int, ...]:
    return (-sum(kappa),) + tuple(kappa)


def multi_indices(length: int, max_total: int):
    """All multi-indices with ``|kappa| <= max_total``: by shells, each shell lexicographic."""
    if length == 0:
        yield ()
        return
    for total in range(max_total + 1):
        shell = []
        for combo in combinations_with_replacement(range(length), total):
            k = [0] * length
            for i in combo:
                k[i] += 1
            shell.append(tuple(k))
        yield from sorted(shell)


def count_multi_indices(length: int, max_total: int) -> int:
    return math.comb(max_total + length, length)


def _check_kappa(system: ConjugateSystem, kappa):
    kappa = tuple(int(k) for k in kappa)
    if len(kappa) != system.degree - 1:
        raise ValueError(f"multi-index must have length {system.degree - 1}, got {len(kappa)}")
    if any(k < 0 for k in kappa):
        raise ValueError("multi-index entries must be nonnegative")
    return kappa


def _conj_vector(system: ConjugateSystem, v):
    """Exponent vector of the complex conjugate product."""
    out = [0] * len(v)
    for i, k in enumerate(v):
        out[system.conj_perm[i]] += k
    return tuple(out)


def _in_relations(system: ConjugateSystem, v, relations: RelationLattice | None) -> bool:
    if not any(v):
        return True
    if relations is not None:
        return relations.contains(v)
    return il.contains(exact_relations(system), v)


def _real_form(system: ConjugateSystem, v) -> ComplexEnclosure:
    """``sum v_i log|alpha_i|``."""
    acc = ComplexEnclosure(_ZERO, _ZERO, _ZERO, system.work_prec)
    for lm, k in zip(system.log_moduli, v):
        if k:
            acc = acc + lm * k
    return acc


def _arg_form(system: ConjugateSystem, v) -> ComplexEnclosure:
    """``sum v_i arg(alpha_i)`` (not reduced)."""
    acc = ComplexEnclosure(_ZERO, _ZERO, _ZERO, system.work_prec)
    for a, k in zip(system.args, v):
        if k:
            acc = acc + a * k
    return acc


def _principal_arg(system: ConjugateSystem, v, relations) -> ComplexEnclosure:
    """Principal argument in (-pi, pi] of ``prod alpha_i^{v_i}``."""
    prec = system.work_prec
    pi = ComplexEnclosure.pi(prec)
    d = tuple(a - b for a, b in zip(v, _conj_vector(system, v)))
    if _in_relations(system, d, relations):
        # the product is real; its sign is that of the negative real roots' parity
        # or, failing that, read off the enclosure
        theta = _arg_form(system, v)
        k = round(theta.mid_fraction()[0] / raw_pi_fraction(prec))
        return pi if k % 2 else ComplexEnclosure(_ZERO, _ZERO, _ZERO, prec)
    theta = _arg_form(system, v)
    two_pi = pi * 2
    k = math.floor((theta.mid_fraction()[0] + raw_pi_fraction(prec)) / (2 * raw_pi_fraction(prec)))
    reduced = theta - two_pi * k
    hi = pi.re_lower()
    if reduced.re_upper() > hi or reduced.re_lower() <= -hi:
        raise PrecisionError("argument too close to the branch cut", module="poles")
    return reduced


def raw_pi_fraction(prec: int) -> Fraction:
    return ComplexEnclosure.pi(prec).mid_fraction()[0]


def _snap_real_part(system, kappa, re_ball, relations):
    """Replace an enclosure of Re(s) by the exact integer when a relation proves it."""
    t = round(re_ball.mid_fraction()[0])
    if not re_ball.contains(t):
        return re_ball
    if real_part_equals(system, kappa, t, relations):
        return ComplexEnclosure.from_value(t, re_ball.prec)
    return re_ball


def real_part_equals(system: ConjugateSystem, kappa, sigma0: int, relations: RelationLattice | None = None,
                     verify: bool = False) -> bool:
    """Exact test of ``Re(s_kappa) = sigma0`` for integer ``sigma0``.

    ``Re(s_kappa) = sigma0`` iff ``|prod alpha_i^{w_i}| = 1`` with
    ``w = (-(|kappa| + sigma0), kappa)``, iff ``w + conj(w)`` is a relation.
    """
    w = (-(sum(kappa) + sigma0),) + tuple(kappa)
    v = tuple(a + b for a, b in zip(w, _conj_vector(system, w)))
    if _in_relations(system, v, relations):
        return True
    if verify:
        return verify_relation(system, v).holds
    return False


def pole_location(system: ConjugateSystem, kappa, n: int = 0,
                  relations: RelationLattice | None = None) -> ComplexEnclosure:
    """Enclosure of ``s_{kappa,n}``, with imaginary part from the principal argument.

    Real and imaginary parts are exact when a relation (from ``relations`` or
    the exactly known inverse-pair and norm relations) proves them.
    """
    kappa = _check_kappa(system, kappa)
    prec = system.work_prec
    log_alpha = system.log_alpha
    v = (0,) + kappa
    total = sum(kappa)
    if total == 0:
        re_ball = ComplexEnclosure(_ZERO, _ZERO, _ZERO, prec)
        arg = ComplexEnclosure(_ZERO, _ZERO, _ZERO, prec)
    else:
        re_ball = _real_form(system, v) / log_alpha - total
        re_ball = _snap_real_part(system, kappa, re_ball, relations)
        arg = _principal_arg(system, v, relations)
    if n:
        arg = arg + ComplexEnclosure.pi(prec) * (2 * n)
    im_ball = arg / log_alpha if not arg.is_exact() or arg.mid_fraction()[0] != 0 else arg
    return ComplexEnclosure.from_parts(re_ball, im_ball)


def kappa_bound(system: ConjugateSystem, sigma0) -> int:
    """Largest ``|kappa|`` that can have ``Re(s_kappa) = sigma0``."""
    sigma0 = Fraction(sigma0)
    if sigma0 >= 0 or system.degree < 2:
        return 0
    gap = system.log_alpha - system.log_moduli[1]
    if gap.re_lower() <= 0:
        raise LatticeError("dominance gap not certified positive", module="poles")
    bound = system.log_alpha * ComplexEnclosure.from_value(-sigma0, system.work_prec) / gap
    return max(0, math.floor(bound.re_upper()))


@dataclass(frozen=True)
class PoleRecord:
    representative: tuple[int, ...]
    location: ComplexEnclosure
    fibre: tuple[tuple[int, ...], ...]
    fibre_size_total: int


def _weights(system: ConjugateSystem):
    """Lower and upper bounds of ``w_i = log alpha - log|alpha_i|`` (i >= 2)."""
    out = []
    for lm in system.log_moduli[1:]:
        w = system.log_alpha - lm
        if w.re_lower() <= 0:
            raise LatticeError("fibre region is not bounded: dominance gap not certified", module="poles")
        out.append((w.re_lower(), w.re_upper()))
    return out


@lru_cache(maxsize=64)
def _projected_basis(basis: tuple) -> tuple:
    return tuple(il.hnf([v[1:] for v in basis]))


def _box_points(basis, lower, upper):
    """Integer combinations of an HNF basis lying in the box ``lower <= x <= upper``."""
    if not basis:
        yield tuple([0] * len(lower))
        return
    piv = il.pivots(basis)
    n = len(lower)

    def rec(j, x):
        if j == len(basis):
            if all(lower[i] <= x[i] <= upper[i] for i in range(n)):
                yield tuple(x)
            return
        row, p = basis[j], piv[j]
        h = row[p]
        lo_c = -((x[p] - lower[p]) // h)
        hi_c = (upper[p] - x[p]) // h
        for c in range(lo_c, hi_c + 1):
            y = [a + c * b for a, b in zip(x, row)]
            # coordinates before the next pivot are final once this row is chosen
            nxt = piv[j + 1] if j + 1 < len(basis) else n
            if all(lower[i] <= y[i] <= upper[i] for i in range(p, nxt)):
                yield from rec(j + 1, y)

    yield from rec(0, [0] * n)


def _fibre_box(system: ConjugateSystem, kappa):
    weights = _weights(system)
    total = sum(w_hi * k for (_, w_hi), k in zip(weights, kappa))
    upper = []
    for (w_lo, _), k in zip(weights, kappa):
        upper.append(math.floor(total / w_lo) - k)
    lower = [-k for k in kappa]
    return lower, upper


def fibre_members(system: ConjugateSystem, L0: RelationLattice, kappa) -> list[tuple[int, ...]]:
    """Every eta with ``s_eta = s_kappa`` (no range limit), sorted."""
    kappa = _check_kappa(system, kappa)
    if not L0.basis:
        return [kappa]
    lower, upper = _fibre_box(system, kappa)
    basis = _projected_basis(tuple(L0.basis))
    out = [tuple(k + d for k, d in zip(kappa, x)) for x in _box_points(basis, lower, upper)]
    return sorted(out)


def fibre_size(system: ConjugateSystem, L0: RelationLattice, kappa) -> int:
    """Number of multi-indices mapping to the same point as ``kappa``."""
    return len(fibre_members(system, L0, kappa))


@lru_cache(maxsize=16)
def _real_part_table(system: ConjugateSystem, length: int, max_kappa: int):
    rows = []
    for eta in multi_indices(length, max_kappa):
        re_ball = _real_form(system, (0,) + eta) / system.log_alpha - sum(eta)
        rows.append((re_ball.re_lower(), re_ball.re_upper(), eta))
    rows.sort(key=lambda t: t[0])
    return rows, [t[0] for t in rows], max(t[1] - t[0] for t in rows)


def fibre_brute_force(system: ConjugateSystem, kappa, max_kappa: int) -> int:
    """Independent fibre count: test every eta with ``|eta| <= max_kappa`` directly."""
    kappa = _check_kappa(system, kappa)
    rows, lows, widest = _real_part_table(system, len(kappa), max_kappa)
    re_k = _real_form(system, (0,) + kappa) / system.log_alpha - sum(kappa)
    lo, hi = re_k.re_lower(), re_k.re_upper()
    start = bisect.bisect_left(lows, lo - widest)
    ek = extended(kappa)
    count = 0
    for a, b, eta in rows[start:]:
        if a > hi:
            break
        if b < lo:
            continue
        d = tuple(x - y for x, y in zip(ek, extended(eta)))
        if verify_relation(system, d).holds:
            count += 1
    return count


def _same_real_part(system, L0, a, b) -> bool:
    d = tuple(x - y for x, y in zip(extended(a), extended(b)))
    v = tuple(x + y for x, y in zip(d, _conj_vector(system, d)))
    return not any(v) or il.contains(L0.basis, v)


def _same_imag_part(system, L0, a, b, loc_a, loc_b) -> bool:
    d = tuple(x - y for x, y in zip(extended(a), extended(b)))
    v = tuple(x - y for x, y in zip(d, _conj_vector(system, d)))
    if any(v) and not il.contains(L0.basis, v):
        return False
    return loc_a.imag_part().overlaps(loc_b.imag_part())


def _compare_records(system, L0):
    def cmp(x: PoleRecord, y: PoleRecord) -> int:
        a, b = x.location, y.location
        if not _same_real_part(system, L0, x.representative, y.representative):
            if a.re_upper() < b.re_lower():
                return -1
            if b.re_upper() < a.re_lower():
                return 1
            raise PrecisionError("real parts of distinct poles not separated", module="poles")
        if _same_imag_part(system, L0, x.representative, y.representative, a, b):
            return 0
        if a.im_upper() < b.im_lower():
            return -1
        if b.im_upper() < a.im_lower():
            return 1
        raise PrecisionError("imaginary parts of distinct poles not separated", module="poles")
    return cmp


def enumerate_poles(system: ConjugateSystem, L0: RelationLattice, max_kappa: int,
                    relations: RelationLattice | None = None) -> list[PoleRecord]:
    """One record per point ``s_kappa`` with ``|kappa| <= max_kappa``, sorted by (Re, Im)."""
    if max_kappa < 0:
        raise ValueError("max_kappa must be nonnegative")
    length = system.degree - 1
    groups: dict[tuple, list] = {}
    for kappa in multi_indices(length, max_kappa):
        key = il.reduce_mod(extended(kappa), L0.basis)
        groups.setdefault(key, []).append(kappa)
    records = []
    for members in groups.values():
        members.sort()
        rep = members[0]
        records.append(PoleRecord(
            representative=rep,
            location=pole_location(system, rep, 0, relations),
            fibre=tuple(members),
            fibre_size_total=fibre_size(system, L0, rep),
        ))
    records.sort(key=functools.cmp_to_key(_compare_records(system, L0)))
    return records


def vertical_translates(system: ConjugateSystem, record: PoleRecord, n_range) -> list[ComplexEnclosure]:
    """``s_{kappa,n} = s_kappa + 2 pi i n / log alpha`` for n in ``n_range``."""
    step = (ComplexEnclosure.pi(system.work_prec) * 2 / system.log_alpha).mul_i()
    return [record.location if n == 0 else record.location + step * n for n in n_range]


@dataclass(frozen=True)
class PlotRow:
    re: ComplexEnclosure
    im: ComplexEnclosure
    fibre_size: int
    representative: tuple[int, ...]


def plot_data(records) -> list[PlotRow]:
    return [PlotRow(r.location.real_part(), r.location.imag_part(), r.fibre_size_total, r.representative)
            for r in records]


def fundamental_strip_contains(system: ConjugateSystem, s: ComplexEnclosure) -> bool:
    """Whether an enclosure is compatible with ``-pi/log alpha < Im <= pi/log alpha``."""
    half = ComplexEnclosure.pi(system.work_prec) / system.log_alpha
    return s.im_upper() > -half.re_upper() and s.im_lower() <= half.re_upper()


__all__ = [
    "PoleRecord", "PlotRow", "extended", "multi_indices", "count_multi_indices", "pole_location",
    "kappa_bound", "enumerate_poles", "fibre_size", "fibre_members", "fibre_brute_force",
    "vertical_translates", "plot_data", "real_part_equals", "fundamental_strip_contains",
]
