"""The Dirichlet series sum a_n^{-s} of a recurrence, summed directly and through its
continuation as a sum over multi-indices of geometric factors.

Writing ``a_n = lambda_1 alpha^n (1 + sum_i x_i)`` with
``x_i = (lambda_i/lambda_1)(alpha_i/alpha)^n`` and expanding ``(1 + sum x_i)^{-s}``
multinomially, the terms with ``n >= start`` regroup as

    phi_term(kappa, s) = lambda_1^{-s} binom(-s, kappa) prod (lambda_i/lambda_1)^{k_i} q^start / (1 - q),
    q = alpha^{-s} prod (alpha_i/alpha)^{k_i},

which is meromorphic in s with poles where q = 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .ball import ComplexEnclosure, _ZERO
from .errors import DomainError, PoleProximityError
from .poles import multi_indices
from .recurrence import RecurrenceSpec, _rounded, tail_ratio_bounds, terms, x_bound

AUTO_START_THRESHOLD = Fraction(1, 16)


@dataclass(frozen=True)
class ZetaParams:
    spec: RecurrenceSpec
    truncation: int = 16
    dirichlet_terms: int = 512
    target_precision_bits: int = 40

    def __post_init__(self):
        if self.truncation < 0 or self.dirichlet_terms < 1:
            raise ValueError("need truncation >= 0 and dirichlet_terms >= 1")


@dataclass(frozen=True)
class PhiResult:
    value: ComplexEnclosure
    certified_tail: bool
    tail_bound: Fraction | None
    start: int
    truncation: int


def _as_ball(s, prec: int) -> ComplexEnclosure:
    return s if isinstance(s, ComplexEnclosure) else ComplexEnclosure.from_value(s, prec)


def multinomial_coefficient(z, kappa) -> ComplexEnclosure:
    """``z (z-1) ... (z-|kappa|+1) / kappa!``."""
    prec = z.prec if isinstance(z, ComplexEnclosure) else 256
    z = _as_ball(z, prec)
    acc = ComplexEnclosure.from_value(1, z.prec)
    for j in range(sum(kappa)):
        acc = acc * (z - j)
    denom = 1
    for k in kappa:
        denom *= math.factorial(k)
    if denom == 1:
        return acc
    return acc / ComplexEnclosure.from_value(denom, z.prec)


def _power_of_log(log_base: ComplexEnclosure, s: ComplexEnclosure) -> ComplexEnclosure:
    """``base^{-s} = exp(-s log base)``."""
    return (-(s * log_base)).exp()


class _Tables:
    """s-independent data of a recurrence, shared by all terms."""

    def __init__(self, spec: RecurrenceSpec):
        system = spec.system
        prec = system.work_prec
        self.prec = prec
        self.system = system
        lam1 = spec.lambdas[0]
        alpha = system.roots[0].with_prec(prec)
        self.log_lambda1 = lam1.with_prec(prec).log()
        self.log_alpha = system.log_alpha
        inv_alpha = alpha.inv()
        inv_lam1 = lam1.with_prec(prec).inv()
        r = system.degree
        self.root_ratios = [system.roots[i].with_prec(prec) * inv_alpha for i in range(r)]
        self.lambda_ratios = [spec.lambdas[i].with_prec(prec) * inv_lam1 for i in range(r)]
        # conjugate pairs first, then real roots, each in index order
        conj = system.conj_perm
        self.pairs = [(i, conj[i]) for i in range(1, r) if i < conj[i]]
        self.reals = [i for i in range(1, r) if conj[i] == i]

    def structured_product(self, factors, kappa) -> ComplexEnclosure:
        """``prod factors[i]^{kappa_i}`` grouped so conjugation acts factor by factor."""
        acc = ComplexEnclosure.from_value(1, self.prec)
        for i, j in self.pairs:
            ki, kj = kappa[i - 1], kappa[j - 1]
            if ki or kj:
                acc = acc * (factors[i].pow_int(ki) * factors[j].pow_int(kj))
        for i in self.reals:
            k = kappa[i - 1]
            if k:
                acc = acc * factors[i].pow_int(k)
        return acc

    def conjugate_index(self, kappa) -> tuple[int, ...]:
        out = [0] * len(kappa)
        for i, k in enumerate(kappa, start=1):
            out[self.system.conj_perm[i] - 1] = k
        return tuple(out)


_TABLES: dict = {}


def _tables(spec: RecurrenceSpec) -> _Tables:
    key = id(spec)
    hit = _TABLES.get(key)
    if hit is None or hit[0] is not spec:
        if len(_TABLES) > 32:
            _TABLES.clear()
        hit = (spec, _Tables(spec))
        _TABLES[key] = hit
    return hit[1]


def _check_kappa(spec: RecurrenceSpec, kappa):
    kappa = tuple(int(k) for k in kappa)
    if len(kappa) != spec.system.degree - 1 or any(k < 0 for k in kappa):
        raise ValueError(f"multi-index must be {spec.system.degree - 1} nonnegative integers")
    return kappa


def _term(tab: _Tables, kappa, s: ComplexEnclosure, lam_pow: ComplexEnclosure,
          alpha_pow: ComplexEnclosure, start: int) -> ComplexEnclosure:
    q = alpha_pow * tab.structured_product(tab.root_ratios, kappa)
    one_minus_q = 1 - q
    if one_minus_q.contains_zero():
        raise PoleProximityError(f"s is within enclosure distance of a pole of the kappa={list(kappa)} term")
    coef = multinomial_coefficient(-s, kappa) * tab.structured_product(tab.lambda_ratios, kappa)
    return lam_pow * coef * q.pow_int(start) / one_minus_q


def phi_term(spec: RecurrenceSpec, kappa, s, start: int | None = None) -> ComplexEnclosure:
    """Continued contribution of one multi-index (sum over n >= start of its binomial term)."""
    kappa = _check_kappa(spec, kappa)
    tab = _tables(spec)
    s = _as_ball(s, tab.prec)
    start = spec.start_index if start is None else start
    lam_pow = _power_of_log(tab.log_lambda1, s)
    alpha_pow = _power_of_log(tab.log_alpha, s)
    return _term(tab, kappa, s, lam_pow, alpha_pow, start)


def auto_start(spec: RecurrenceSpec, threshold: Fraction = AUTO_START_THRESHOLD) -> int:
    """Smallest ``n >= n0`` with the perturbation sum ``X_n`` certified below ``threshold``."""
    cs, rhos = tail_ratio_bounds(spec.system, spec.lambdas)
    cs = [_rounded(c) for c in cs]
    rhos = [_rounded(p) for p in rhos]
    n = spec.start_index
    while x_bound(spec.system, spec.lambdas, n, cs, rhos) > threshold:
        n += 1
    return n


def _power_term(n_value: int, s: ComplexEnclosure, prec: int) -> ComplexEnclosure:
    """``a^{-s}`` for a positive integer a."""
    return _power_of_log(ComplexEnclosure.from_value(n_value, prec).log(), s)


def _upper_exp(log_base: ComplexEnclosure, sigma: ComplexEnclosure, factor: int = 1) -> Fraction:
    """Upper bound of ``base^{-factor * sigma}`` over a real ball sigma."""
    return (-(sigma * log_base) * factor).exp().re_upper()


def _remainder_bound(abs_s: Fraction, x: Fraction, K: int) -> Fraction:
    """Bound for ``sum_{k > K} (|s|)_k / k! X^k`` (Lagrange remainder of ``(1 - X)^{-|s|}``)."""
    rising = Fraction(1)
    for j in range(K + 1):
        rising *= abs_s + j
    exponent = math.ceil(abs_s) + K + 1
    return rising / math.factorial(K + 1) * x ** (K + 1) / (1 - x) ** exponent


def phi_tail_bound(spec: RecurrenceSpec, s: ComplexEnclosure, K: int, start: int) -> Fraction | None:
    """Certified bound for the multi-indices with ``|kappa| > K``, or None outside its region."""
    system = spec.system
    if system.degree == 1:
        return Fraction(0)
    tab = _tables(spec)
    cs, rhos = tail_ratio_bounds(system, spec.lambdas)
    x = _rounded(x_bound(system, spec.lambdas, start))
    if x >= 1:
        return None
    rho = _rounded(max(rhos))
    sigma = s.real_part()
    alpha_sigma = _rounded(_upper_exp(tab.log_alpha, sigma))
    ratio = alpha_sigma * rho ** (K + 1)
    if ratio >= 1:
        return None
    abs_s = _rounded(s.mod_upper())
    rem = _remainder_bound(abs_s, x, K)
    lam = _upper_exp(tab.log_lambda1, sigma)
    head = _upper_exp(tab.log_alpha, sigma, start)
    return _rounded(lam * rem * head / (1 - ratio))


def phi_eval(spec: RecurrenceSpec, s, K: int, start: int | None = None) -> PhiResult:
    """Continued series truncated at ``|kappa| <= K``, plus its tail bound when certifiable.

    Terms ``n0 <= n < start`` are summed directly; the rest go through the
    multi-index expansion, whose remainder is bounded once ``X_start < 1``.
    """
    if K < 0:
        raise ValueError("truncation must be nonnegative")
    tab = _tables(spec)
    prec = tab.prec
    s = _as_ball(s, prec)
    if start is None:
        start = auto_start(spec)
    if start < spec.start_index:
        raise ValueError("start must not precede the start index of the sequence")
    seq = terms(spec, start)
    total = ComplexEnclosure(_ZERO, _ZERO, _ZERO, prec)
    for n in range(spec.start_index, start):
        total = total + _power_term(seq[n], s, prec)
    lam_pow = _power_of_log(tab.log_lambda1, s)
    alpha_pow = _power_of_log(tab.log_alpha, s)
    for kappa in multi_indices(spec.system.degree - 1, K):
        partner = tab.conjugate_index(kappa)
        if partner < kappa:
            continue
        t = _term(tab, kappa, s, lam_pow, alpha_pow, start)
        if partner != kappa:
            t = t + _term(tab, partner, s, lam_pow, alpha_pow, start)
        total = total + t
    bound = phi_tail_bound(spec, s, K, start)
    if bound is None:
        return PhiResult(total, False, None, start, K)
    return PhiResult(total.inflate(bound), True, bound, start, K)


def dirichlet_sum(spec: RecurrenceSpec, s, N: int) -> ComplexEnclosure:
    """``sum_{n=n0}^{n0+N-1} a_n^{-s}`` with a certified bound on the rest in the radius."""
    if N < 1:
        raise ValueError("need at least one term")
    tab = _tables(spec)
    prec = tab.prec
    s = _as_ball(s, prec)
    if s.re_lower() <= 0:
        raise DomainError("the Dirichlet series needs Re(s) > 0")
    n0 = spec.start_index
    end = n0 + N
    system = spec.system
    cs, rhos = tail_ratio_bounds(system, spec.lambdas)
    cs = [_rounded(c) for c in cs]
    rhos = [_rounded(p) for p in rhos]
    tail_from = end
    while x_bound(system, spec.lambdas, tail_from, cs, rhos) >= Fraction(1, 2):
        tail_from += 1
    seq = terms(spec, max(end, tail_from))
    total = ComplexEnclosure(_ZERO, _ZERO, _ZERO, prec)
    for n in range(n0, end):
        total = total + _power_term(seq[n], s, prec)
    sigma = s.real_part()
    extra = Fraction(0)
    for n in range(end, tail_from):
        extra += _power_term(seq[n], sigma, prec).re_upper()
    x = x_bound(system, spec.lambdas, tail_from, cs, rhos)
    c_low = spec.lambdas[0].re_lower() * (1 - x)
    c_ball = ComplexEnclosure.from_value(_rounded_down(c_low), prec)
    head = _upper_exp(c_ball.log(), sigma)
    geo = _upper_exp(tab.log_alpha, sigma, tail_from)
    q = _upper_exp(tab.log_alpha, sigma)
    if q >= 1:
        raise DomainError("Re(s) too small for a certified geometric tail")
    extra += head * geo / (1 - q)
    return total.inflate(_rounded(extra))


def _rounded_down(q: Fraction, bits: int = 64) -> Fraction:
    if q <= 0:
        raise DomainError("lower bound for the sequence is not positive")
    e = q.numerator.bit_length() - q.denominator.bit_length() - bits
    scaled = q / Fraction(2) ** e
    return Fraction(scaled.numerator // scaled.denominator) * Fraction(2) ** e


def pole_of_term(spec: RecurrenceSpec, kappa, s) -> bool:
    """Whether ``s`` is within enclosure distance of a pole of ``phi_term(kappa, .)``."""
    try:
        phi_term(spec, kappa, s)
    except PoleProximityError:
        return True
    return False
