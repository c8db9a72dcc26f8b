"""Integer recurrences attached to a Perron polynomial: terms, Binet coefficients, start index."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .ball import ComplexEnclosure
from .errors import BinetError, InconsistencyError, PrecisionError
from .polyarith import ConjugateSystem, refine

MAX_REFINEMENTS = 4
CROSS_CHECK_WINDOW = 32


@dataclass(frozen=True)
class RecurrenceSpec:
    system: ConjugateSystem
    initial_terms: tuple[int, ...]
    lambdas: tuple[ComplexEnclosure, ...]
    start_index: int

    @property
    def order(self) -> int:
        return self.system.degree

    @property
    def recurrence_coefficients(self) -> tuple[int, ...]:
        """``c_0..c_{r-1}`` with ``a_{n+r} = -sum_j c_j a_{n+j}``."""
        return self.system.polynomial.coefficients[:-1]


def power_sums(coefficients, count: int) -> list[int]:
    """``p_k = sum_i alpha_i^k`` for k < count via Newton's identities (monic input)."""
    c = list(coefficients)
    r = len(c) - 1
    if c[-1] != 1:
        raise ValueError("Newton's identities need a monic polynomial")
    # e-type coefficients: x^r + b_1 x^{r-1} + ... + b_r, b_j = c_{r-j}
    b = [1] + [c[r - j] for j in range(1, r + 1)]
    p = []
    for k in range(count):
        if k == 0:
            p.append(r)
            continue
        s = -sum(b[j] * p[k - j] for j in range(1, min(k - 1, r) + 1))
        if k <= r:
            s -= k * b[k]
        p.append(s)
    return p


def _extend(initial: list[int], coefficients, count: int) -> list[int]:
    r = len(coefficients) - 1
    out = list(initial[:count])
    while len(out) < count:
        n = len(out) - r
        out.append(-sum(coefficients[j] * out[n + j] for j in range(r)))
    return out


def terms(spec: RecurrenceSpec, count: int) -> list[int]:
    """Exact terms ``a_0 .. a_{count-1}``."""
    if count < 0:
        raise ValueError("count must be nonnegative")
    return _extend(list(spec.initial_terms), spec.system.polynomial.coefficients, count)


def _solve_vandermonde(roots, values, prec):
    """Ball Gaussian elimination with partial pivoting on ``sum_i roots[i]^n x_i = values[n]``."""
    r = len(roots)
    rows = []
    for n in range(r):
        rows.append([z.pow_int(n) for z in roots] + [ComplexEnclosure.from_value(values[n], prec)])
    for col in range(r):
        piv = max(range(col, r), key=lambda i: (rows[i][col].mod_lower(), -i))
        if rows[piv][col].mod_lower() == 0:
            return None
        rows[col], rows[piv] = rows[piv], rows[col]
        inv = rows[col][col].inv()
        for i in range(col + 1, r):
            f = rows[i][col] * inv
            rows[i] = [a - f * b for a, b in zip(rows[i], rows[col])]
    x = [None] * r
    for i in range(r - 1, -1, -1):
        acc = rows[i][r]
        for j in range(i + 1, r):
            acc = acc - rows[i][j] * x[j]
        x[i] = acc / rows[i][i]
    return x


def _symmetrize(system: ConjugateSystem, lam):
    """Real roots get real coefficients, conjugate roots conjugate ones (exact for integer data)."""
    out = list(lam)
    for i in range(system.degree):
        j = system.conj_perm[i]
        if j == i:
            out[i] = lam[i].real_part()
        elif i < j:
            out[j] = lam[i].conj()
    return out


def binet_coefficients(system: ConjugateSystem, initial_terms) -> list[ComplexEnclosure]:
    """``lambda_i`` with ``a_n = sum_i lambda_i alpha_i^n``, in root order."""
    initial_terms = [int(a) for a in initial_terms]
    r = system.degree
    if len(initial_terms) != r:
        raise ValueError(f"need exactly {r} initial terms, got {len(initial_terms)}")
    current = system
    for _ in range(MAX_REFINEMENTS + 1):
        prec = current.work_prec
        roots = [z.with_prec(prec) for z in current.roots]
        lam = _solve_vandermonde(roots, initial_terms, prec)
        if lam is not None:
            lam = _symmetrize(current, lam)
            if lam[0].re_upper() <= 0:
                raise BinetError("leading Binet coefficient is not positive; the sequence is not eventually increasing")
            if lam[0].re_lower() > 0:
                return lam
        current = refine(system, current.precision_bits * 2)
    raise PrecisionError("Binet coefficients not separated from zero within the precision cap", module="recurrence")


def tail_ratio_bounds(system: ConjugateSystem, lambdas):
    """Upper bounds ``c_i >= |lambda_i / lambda_1|`` and ``rho_i >= |alpha_i| / alpha`` for i >= 2."""
    lam1 = lambdas[0]
    alpha = system.roots[0]
    cs, rhos = [], []
    for lam, z in zip(lambdas[1:], system.roots[1:]):
        cs.append((lam / lam1).mod_upper())
        rhos.append((z / alpha).mod_upper())
    return cs, rhos


def x_bound(system: ConjugateSystem, lambdas, n: int, cs=None, rhos=None) -> Fraction:
    """Certified upper bound for ``X_n = sum_{i>=2} |lambda_i/lambda_1| |alpha_i/alpha|^n``."""
    if cs is None:
        cs, rhos = tail_ratio_bounds(system, lambdas)
    return sum((c * rho ** n for c, rho in zip(cs, rhos)), Fraction(0))


def _rounded(q: Fraction, bits: int = 64) -> Fraction:
    """Round a positive rational up to a dyadic with ``bits`` significant bits."""
    if q <= 0:
        return Fraction(0)
    e = q.numerator.bit_length() - q.denominator.bit_length() - bits
    scaled = q / Fraction(2) ** e
    m = -(-scaled.numerator // scaled.denominator)
    return Fraction(m) * Fraction(2) ** e


def _certified_tail_start(system: ConjugateSystem, lambdas) -> int:
    """Smallest N with a_n > 0 and a_{n+1} > a_n provable for every n >= N from the Binet form."""
    cs, rhos = tail_ratio_bounds(system, lambdas)
    cs = [_rounded(c) for c in cs]
    rhos = [_rounded(p) for p in rhos]
    if any(p >= 1 for p in rhos):
        raise PrecisionError("dominance ratio not certified below 1", module="recurrence")
    alpha_lo = system.roots[0].re_lower()
    gaps = [_rounded((z - 1).mod_upper()) for z in system.roots[1:]]
    powers = [Fraction(1)] * len(rhos)
    for n in range(100000):
        x = sum(c * p for c, p in zip(cs, powers))
        y = sum(c * p * g for c, p, g in zip(cs, powers, gaps))
        if x < 1 and y < alpha_lo - 1:
            return n
        powers = [_rounded(p * rho) for p, rho in zip(powers, rhos)]
    raise PrecisionError("no certified start index found", module="recurrence")


def start_index(system: ConjugateSystem, initial_terms, lambdas) -> int:
    """Smallest n0 with ``a_{n+1} > a_n >= 1`` for all n >= n0."""
    coeffs = system.polynomial.coefficients
    tail = _certified_tail_start(system, lambdas)
    seq = _extend(list(initial_terms), coeffs, tail + 2)
    n0 = tail
    while n0 > 0 and seq[n0 - 1] >= 1 and seq[n0] > seq[n0 - 1]:
        n0 -= 1
    check = _extend(list(initial_terms), coeffs, n0 + CROSS_CHECK_WINDOW + 1)
    for n in range(n0, n0 + CROSS_CHECK_WINDOW):
        if not (check[n] >= 1 and check[n + 1] > check[n]):
            raise InconsistencyError(f"start index {n0} contradicted at n = {n}", module="recurrence")
    return n0


def make_recurrence(system: ConjugateSystem, initial_terms=None) -> RecurrenceSpec:
    """Recurrence with the given initial terms, or the power sums of the roots by default."""
    if initial_terms is None:
        initial_terms = power_sums(system.polynomial.coefficients, system.degree)
    initial_terms = tuple(int(a) for a in initial_terms)
    lam = binet_coefficients(system, initial_terms)
    n0 = start_index(system, initial_terms, lam)
    return RecurrenceSpec(system, initial_terms, tuple(lam), n0)
