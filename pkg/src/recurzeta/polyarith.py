"""Integer polynomials, certified root isolation, and Perron/Pisot/Salem classification."""
from __future__ import annotations

import cmath
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache

import sympy
from mpmath import libmp as L

from .ball import ComplexEnclosure, _ZERO, raw_to_fraction
from .errors import (
    NotMonicError,
    NotPerronError,
    PolynomialParseError,
    PrecisionError,
    ReducibleError,
    RepeatedRootError,
)

MAX_DOUBLINGS = 5


@dataclass(frozen=True)
class IntPolynomial:
    """Integer polynomial, coefficients in ascending degree order."""

    coefficients: tuple[int, ...]

    def __post_init__(self):
        c = tuple(int(x) for x in self.coefficients)
        if len(c) < 2 or c[-1] == 0:
            raise PolynomialParseError("polynomial must have degree >= 1 and nonzero leading coefficient")
        object.__setattr__(self, "coefficients", c)

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @property
    def leading(self) -> int:
        return self.coefficients[-1]

    @property
    def constant(self) -> int:
        return self.coefficients[0]

    def is_monic(self) -> bool:
        return self.leading == 1

    def is_reciprocal(self) -> bool:
        c = self.coefficients
        return c == c[::-1] or c == tuple(-x for x in c[::-1])

    def derivative(self) -> "IntPolynomial | None":
        d = tuple(i * c for i, c in enumerate(self.coefficients))[1:]
        return IntPolynomial(d) if len(d) >= 2 else None

    def __call__(self, z):
        acc = 0
        for c in reversed(self.coefficients):
            acc = acc * z + c
        return acc

    def to_sympy(self, x=None):
        x = x if x is not None else sympy.Symbol("x")
        return sympy.Poly(list(reversed(self.coefficients)), x, domain="ZZ")

    def __str__(self):
        parts = []
        for k in range(self.degree, -1, -1):
            c = self.coefficients[k]
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            a = abs(c)
            if k == 0:
                body = str(a)
            else:
                mono = "x" if k == 1 else f"x^{k}"
                body = mono if a == 1 else f"{a}*{mono}"
            parts.append((sign, body))
        head_sign, head = parts[0]
        out = ("-" if head_sign == "-" else "") + head
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out


# ---------------------------------------------------------------- parsing

_TOKEN = re.compile(r"\s*(?:(\d+\.\d*|\.\d+)|(\d+)|([A-Za-z_]\w*)|(\*\*|[-+*^()\[\],/]))")


def _tokenize(text: str):
    text = text.replace("−", "-").replace("–", "-")
    pos, out = 0, []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise PolynomialParseError(f"unexpected character {text[pos]!r} at position {pos}")
        flt, num, name, op = m.groups()
        if flt is not None:
            raise PolynomialParseError(f"non-integer coefficient {flt!r}")
        if num is not None:
            out.append(("int", int(num)))
        elif name is not None:
            out.append(("var", name))
        else:
            out.append(("op", "^" if op == "**" else op))
        pos = m.end()
    return out


def _parse_list(tokens) -> list[int]:
    if tokens[-1] != ("op", "]"):
        raise PolynomialParseError("unterminated coefficient list")
    body = tokens[1:-1]
    coeffs, sign, expect_value = [], 1, True
    for kind, val in body:
        if expect_value:
            if (kind, val) == ("op", "-"):
                sign = -sign
            elif (kind, val) == ("op", "+"):
                pass
            elif kind == "int":
                coeffs.append(sign * val)
                sign, expect_value = 1, False
            else:
                raise PolynomialParseError(f"unexpected {val!r} in coefficient list")
        else:
            if (kind, val) != ("op", ","):
                raise PolynomialParseError(f"expected ',' in coefficient list, got {val!r}")
            expect_value = True
    if expect_value and coeffs:
        raise PolynomialParseError("trailing comma in coefficient list")
    return coeffs


def _parse_expression(tokens) -> list[int]:
    terms: dict[int, int] = {}
    variable = None
    i, n = 0, len(tokens)

    def peek():
        return tokens[i] if i < n else (None, None)

    first = True
    while i < n:
        sign = 1
        seen_sign = False
        while peek()[0] == "op" and peek()[1] in "+-":
            if peek()[1] == "-":
                sign = -sign
            seen_sign = True
            i += 1
        if not first and not seen_sign:
            raise PolynomialParseError(f"expected '+' or '-', got {peek()[1]!r}")
        first = False
        coef, exponent = None, 0
        if peek()[0] == "int":
            coef = peek()[1]
            i += 1
            if peek() == ("op", "*"):
                i += 1
                if peek()[0] != "var":
                    raise PolynomialParseError("expected variable after '*'")
        if peek()[0] == "var":
            name = peek()[1]
            if variable is None:
                variable = name
            elif name != variable:
                raise PolynomialParseError(f"multivariate input: {variable!r} and {name!r}")
            i += 1
            exponent = 1
            if peek() == ("op", "^"):
                i += 1
                if peek()[0] != "int":
                    raise PolynomialParseError("exponent must be a nonnegative integer")
                exponent = peek()[1]
                i += 1
            if peek() == ("op", "*"):
                raise PolynomialParseError("coefficients must precede the variable")
        elif coef is None:
            raise PolynomialParseError(f"expected a term, got {peek()[1]!r}")
        if peek()[0] in ("int", "var"):
            raise PolynomialParseError(f"unexpected {peek()[1]!r}")
        if peek() == ("op", "/"):
            raise PolynomialParseError("non-integer coefficient (division)")
        if peek()[0] == "op" and peek()[1] not in "+-":
            raise PolynomialParseError(f"unexpected {peek()[1]!r}")
        terms[exponent] = terms.get(exponent, 0) + sign * (1 if coef is None else coef)
    if not terms:
        raise PolynomialParseError("empty polynomial")
    deg = max(terms)
    return [terms.get(k, 0) for k in range(deg + 1)]


def parse_polynomial(text: str) -> IntPolynomial:
    """Parse ``"[c0, c1, ..., cr]"`` (ascending) or an expression like ``"x^6-2x^4-6x^3-2x^2+1"``."""
    tokens = _tokenize(text)
    if not tokens:
        raise PolynomialParseError("empty polynomial")
    if tokens[0] == ("op", "["):
        coeffs = _parse_list(tokens)
    else:
        coeffs = _parse_expression(tokens)
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    if not coeffs:
        raise PolynomialParseError("zero polynomial")
    if len(coeffs) == 1:
        raise PolynomialParseError("constant polynomial has no roots")
    return IntPolynomial(tuple(coeffs))


# ---------------------------------------------------------------- root finding

def is_squarefree(p: IntPolynomial) -> bool:
    d = p.derivative()
    if d is None:
        return True
    x = sympy.Symbol("x")
    return sympy.degree(sympy.gcd(p.to_sympy(x), d.to_sympy(x)), x) == 0


def is_irreducible(p: IntPolynomial) -> bool:
    content, factors = p.to_sympy().factor_list()
    return abs(content) == 1 and len(factors) == 1 and factors[0][1] == 1


def _initial_guesses(p: IntPolynomial) -> list[complex]:
    n = p.degree
    lc = p.leading
    centre = -p.coefficients[n - 1] / (n * lc)
    bound = 1 + max(abs(c / lc) for c in p.coefficients[:-1])
    return [centre + bound * cmath.exp(1j * (2 * math.pi * k / n + 0.4)) for k in range(n)]


def _aberth_double(p: IntPolynomial, max_iter: int = 500) -> list[complex]:
    coeffs = [float(c) for c in p.coefficients]
    dcoeffs = [i * c for i, c in enumerate(coeffs)][1:]
    z = _initial_guesses(p)
    n = len(z)
    try:
        for _ in range(max_iter):
            biggest = 0.0
            for i in range(n):
                pv = 0j
                for c in reversed(coeffs):
                    pv = pv * z[i] + c
                dv = 0j
                for c in reversed(dcoeffs):
                    dv = dv * z[i] + c
                if pv == 0:
                    continue
                ratio = pv / dv
                s = sum(1 / (z[i] - z[j]) for j in range(n) if j != i)
                w = ratio / (1 - ratio * s)
                z[i] -= w
                biggest = max(biggest, abs(w) / max(1.0, abs(z[i])))
            if biggest < 1e-14:
                break
    except (ZeroDivisionError, OverflowError):
        return _initial_guesses(p)
    if not all(math.isfinite(v.real) and math.isfinite(v.imag) for v in z):
        return _initial_guesses(p)
    return z


def _mpc(z, wp):
    return (L.from_float(z.real, wp, "n"), L.from_float(z.imag, wp, "n"))


def _aberth_mp(p: IntPolynomial, z0, wp: int, max_iter: int = 200):
    """Refine approximations with Aberth steps at ``wp`` bits; returns raw complex pairs."""
    coeffs = [(L.from_int(c), _ZERO) for c in p.coefficients]
    dcoeffs = [(L.from_int(i * c), _ZERO) for i, c in enumerate(p.coefficients)][1:]
    z = [w if isinstance(w, tuple) else _mpc(w, wp) for w in z0]
    n = len(z)
    one = (L.fone, _ZERO)
    tol = L.from_man_exp(1, -(wp - 8))

    def horner(cs, x):
        acc = (_ZERO, _ZERO)
        for c in reversed(cs):
            acc = L.mpc_add(L.mpc_mul(acc, x, wp), c, wp)
        return acc

    for _ in range(max_iter):
        converged = True
        for i in range(n):
            pv = horner(coeffs, z[i])
            if pv == (_ZERO, _ZERO):
                continue
            dv = horner(dcoeffs, z[i])
            ratio = L.mpc_div(pv, dv, wp)
            s = (_ZERO, _ZERO)
            for j in range(n):
                if j != i:
                    s = L.mpc_add(s, L.mpc_div(one, L.mpc_sub(z[i], z[j], wp), wp), wp)
            w = L.mpc_div(ratio, L.mpc_sub(one, L.mpc_mul(ratio, s, wp), wp), wp)
            z[i] = L.mpc_sub(z[i], w, wp)
            scale = L.mpf_max(L.fone, L.mpc_abs(z[i], 53)) if hasattr(L, "mpf_max") else None
            mag = L.mpc_abs(w, 53)
            if scale is None:
                zabs = L.mpc_abs(z[i], 53)
                scale = zabs if L.mpf_gt(zabs, L.fone) else L.fone
            if L.mpf_gt(mag, L.mpf_mul(tol, scale)):
                converged = False
        if converged:
            break
    return z


def _symmetrize(z, wp):
    """Snap near-real approximations to the axis and mirror conjugate pairs bit-exactly."""
    tol = raw_to_fraction(L.from_man_exp(1, -(wp // 2)))
    reals, ups, downs = [], [], []
    for re_, im_ in z:
        r, i = raw_to_fraction(re_), raw_to_fraction(im_)
        scale = max(Fraction(1), abs(r) + abs(i))
        if abs(i) <= tol * scale:
            reals.append((re_, _ZERO))
        elif i > 0:
            ups.append((re_, im_))
        else:
            downs.append((re_, im_))
    if len(ups) != len(downs):
        return None
    out = list(reals)
    remaining = list(downs)
    for u in sorted(ups, key=lambda w: (raw_to_fraction(w[0]), raw_to_fraction(w[1]))):
        ur, ui = raw_to_fraction(u[0]), raw_to_fraction(u[1])
        k = min(range(len(remaining)),
                key=lambda j: (raw_to_fraction(remaining[j][0]) - ur) ** 2
                + (raw_to_fraction(remaining[j][1]) + ui) ** 2)
        remaining.pop(k)
        out.append(u)
        out.append((u[0], L.mpf_neg(u[1])))
    return out


def _certify(p: IntPolynomial, z, wp: int, precision_bits: int):
    """Weierstrass-Gerschgorin inclusion disks; None if they are not separated enough.

    With ``W_i = p(z_i) / (lc * prod_{j != i} (z_i - z_j))`` every connected
    component of the union of disks ``|z - z_i| <= n |W_i|`` holds as many
    roots as disks, so pairwise disjoint disks hold exactly one root each.
    """
    n = p.degree
    pts = [ComplexEnclosure(re_, im_, _ZERO, wp) for re_, im_ in z]
    radii = []
    for i, zi in enumerate(pts):
        pv = ComplexEnclosure(_ZERO, _ZERO, _ZERO, wp)
        for c in reversed(p.coefficients):
            pv = pv * zi + c
        prod = ComplexEnclosure.from_value(p.leading, wp)
        for j, zj in enumerate(pts):
            if j != i:
                prod = prod * (zi - zj)
        low = prod.mod_lower()
        if low == 0:
            return None
        radii.append(n * pv.mod_upper() / low)
    limit = Fraction(1, 2 ** (precision_bits // 2))
    mids = [zi.mid_fraction() for zi in pts]
    for i in range(n):
        if radii[i] > limit:
            return None
        if mids[i][1] != 0 and abs(mids[i][1]) <= radii[i]:
            return None
        for j in range(i + 1, n):
            d2 = (mids[i][0] - mids[j][0]) ** 2 + (mids[i][1] - mids[j][1]) ** 2
            if d2 <= (radii[i] + radii[j]) ** 2:
                return None
    out = []
    for (re_, im_), r in zip(z, radii):
        rad = L.from_rational(r.numerator, r.denominator, 64, "u") if r else _ZERO
        out.append(ComplexEnclosure(re_, im_, rad, wp))
    out.sort(key=lambda b: (-b.mid_fraction()[0], -b.mid_fraction()[1]))
    return out


def isolate_roots(p: IntPolynomial, precision_bits: int = 256,
                  max_doublings: int = MAX_DOUBLINGS) -> list[ComplexEnclosure]:
    """Certified, pairwise disjoint enclosures of all roots of a squarefree ``p``.

    Each radius is at most ``2**-(precision_bits/2)``; non-real roots come in
    mirrored pairs; output is sorted by real part, then imaginary part, descending.
    """
    if precision_bits < 64:
        raise ValueError("precision_bits must be at least 64")
    if not is_squarefree(p):
        raise RepeatedRootError(f"{p} has repeated roots")
    wp = precision_bits + 32
    if p.degree == 1:
        root = Fraction(-p.constant, p.leading)
        return [ComplexEnclosure.from_value(root, wp)]
    approx = _aberth_double(p)
    for _ in range(max_doublings + 1):
        z = _aberth_mp(p, approx, wp)
        sym = _symmetrize(z, wp)
        if sym is not None:
            enclosures = _certify(p, sym, wp, precision_bits)
            if enclosures is not None:
                return enclosures
        approx = z
        wp *= 2
    raise PrecisionError(f"could not separate the roots of {p} within the precision cap", module="polyarith")


# ---------------------------------------------------------------- classification

@dataclass(frozen=True)
class ClassFlags:
    is_perron: bool
    is_pisot: bool
    is_salem: bool
    is_unit: bool
    is_reciprocal: bool

    def as_dict(self) -> dict:
        return {
            "is_perron": self.is_perron,
            "is_pisot": self.is_pisot,
            "is_salem": self.is_salem,
            "is_unit": self.is_unit,
            "is_reciprocal": self.is_reciprocal,
        }


@dataclass(frozen=True)
class ConjugateSystem:
    """Certified conjugates of a Perron number in Perron order.

    ``roots[0]`` is the dominant real root; the others follow by decreasing
    modulus.  ``conj_perm[i]`` is the index of the complex conjugate of root
    ``i`` and ``recip_perm[i]`` (reciprocal polynomials only) the index of
    ``1/root_i``.
    """

    polynomial: IntPolynomial
    roots: tuple[ComplexEnclosure, ...]
    precision_bits: int
    flags: ClassFlags
    conj_perm: tuple[int, ...]
    recip_perm: tuple[int, ...] | None = None

    @property
    def degree(self) -> int:
        return self.polynomial.degree

    @property
    def work_prec(self) -> int:
        return self.precision_bits + 32

    def is_real(self, i: int) -> bool:
        return self.conj_perm[i] == i

    def on_unit_circle(self, i: int) -> bool:
        """Exact: a non-real root whose reciprocal is its conjugate has modulus 1."""
        return (self.recip_perm is not None and not self.is_real(i)
                and self.recip_perm[i] == self.conj_perm[i])

    @cached_property
    def negative_real(self) -> frozenset:
        return frozenset(i for i in range(self.degree) if self.is_real(i) and self.roots[i].re_upper() < 0)

    @cached_property
    def log_moduli(self) -> tuple[ComplexEnclosure, ...]:
        prec = self.work_prec
        out: list = [None] * self.degree
        for i in range(self.degree):
            if out[i] is not None:
                continue
            if self.on_unit_circle(i):
                out[i] = ComplexEnclosure(_ZERO, _ZERO, _ZERO, prec)
                continue
            val = self.roots[i].with_prec(prec).log_abs()
            out[i] = val
            j = self.conj_perm[i]
            out[j] = val
            if self.recip_perm is not None:
                k = self.recip_perm[i]
                out[k] = -val
                out[self.conj_perm[k]] = -val
        return tuple(out)

    @cached_property
    def args(self) -> tuple[ComplexEnclosure, ...]:
        prec = self.work_prec
        pi = ComplexEnclosure.pi(prec)
        zero = ComplexEnclosure(_ZERO, _ZERO, _ZERO, prec)
        out: list = [None] * self.degree
        for i in range(self.degree):
            if out[i] is not None:
                continue
            if self.is_real(i):
                out[i] = pi if i in self.negative_real else zero
                continue
            j = self.conj_perm[i]
            top = i if self.roots[i].imag_mid > 0 else j
            val = self.roots[top].with_prec(prec).arg()
            out[top] = val
            out[self.conj_perm[top]] = -val
        return tuple(out)

    @property
    def log_alpha(self) -> ComplexEnclosure:
        return self.log_moduli[0]

    def root_ratio_logs(self) -> list[ComplexEnclosure]:
        """``log alpha - log|alpha_i|`` for i >= 1 (all certified positive)."""
        return [self.log_alpha - lm for lm in self.log_moduli[1:]]


def _conjugate_permutation(roots) -> tuple[int, ...]:
    perm = []
    for i, z in enumerate(roots):
        if z.has_real_center():
            perm.append(i)
            continue
        zc = z.conj()
        partner = [j for j, w in enumerate(roots) if j != i and w.raw == zc.raw]
        if len(partner) != 1:
            raise PrecisionError("conjugate pairing is not bit-exact", module="polyarith")
        perm.append(partner[0])
    return tuple(perm)


def _reciprocal_permutation(roots) -> tuple[int, ...]:
    perm = []
    for z in roots:
        w = z.inv()
        hits = [j for j, v in enumerate(roots) if v.overlaps(w)]
        if len(hits) != 1:
            raise PrecisionError("reciprocal pairing not resolved at this precision", module="polyarith")
        perm.append(hits[0])
    if any(perm[perm[i]] != i for i in range(len(perm))):
        raise PrecisionError("reciprocal pairing is not an involution", module="polyarith")
    return tuple(perm)


def _forced_equal_moduli(p: IntPolynomial) -> bool:
    """p(x) = g(x^k) with k >= 2 forces roots of equal modulus."""
    support = [i for i, c in enumerate(p.coefficients) if c]
    g = 0
    for i in support:
        g = math.gcd(g, i)
    return g >= 2


def _perron_order(roots, dominant: int) -> list[int]:
    rest = [i for i in range(len(roots)) if i != dominant]
    bounds = {i: (roots[i].mod_lower(), roots[i].mod_upper()) for i in rest}

    def tiebreak(i):
        re_, im_ = roots[i].mid_fraction()
        return (-im_, -re_)

    rest.sort(key=lambda i: (-(bounds[i][0] + bounds[i][1]), tiebreak(i)))
    clusters: list[list[int]] = []
    for i in rest:
        if clusters:
            lo = min(bounds[j][0] for j in clusters[-1])
            if bounds[i][1] >= lo:
                clusters[-1].append(i)
                continue
        clusters.append([i])
    order = [dominant]
    for c in clusters:
        order.extend(sorted(c, key=tiebreak))
    return order


def classify(p: IntPolynomial, roots: list[ComplexEnclosure], precision_bits: int | None = None) -> ConjugateSystem:
    """Check Perron-ness, set certified flags, and put the roots in Perron order."""
    if not p.is_monic():
        raise NotMonicError(f"{p} is not monic")
    if p.degree < 2:
        raise NotPerronError("degree-1 polynomials define no conjugate system (r = 1)")
    if not is_irreducible(p):
        raise ReducibleError(f"{p} is reducible over the rationals")
    if len(roots) != p.degree:
        raise ValueError("need exactly one enclosure per root")
    if precision_bits is None:
        precision_bits = roots[0].prec - 32

    real_idx = [i for i, z in enumerate(roots) if z.has_real_center()]
    if not real_idx:
        raise NotPerronError(f"{p} has no real root")
    top = max(real_idx, key=lambda i: roots[i].mid_fraction()[0])
    if roots[top].re_upper() <= 1:
        raise NotPerronError(f"largest real root of {p} is not greater than 1")
    lo_top = roots[top].mod_lower()
    for j in range(len(roots)):
        if j == top:
            continue
        if roots[j].mod_upper() < lo_top:
            continue
        if roots[j].mod_lower() > roots[top].mod_upper() or _forced_equal_moduli(p):
            raise NotPerronError(f"{p}: the largest real root does not dominate its conjugates")
        raise PrecisionError("dominance not certifiable at this precision; raise precision", module="polyarith")
    if roots[top].re_lower() <= 1:
        raise PrecisionError("cannot certify the dominant root exceeds 1", module="polyarith")

    order = _perron_order(roots, top)
    ordered = tuple(roots[i] for i in order)
    conj = _conjugate_permutation(ordered)
    reciprocal = p.is_reciprocal()
    recip = _reciprocal_permutation(ordered) if reciprocal else None

    is_pisot = all(z.mod_upper() < 1 for z in ordered[1:])
    n_real = sum(1 for i in range(len(ordered)) if conj[i] == i)
    is_salem = (
        reciprocal
        and n_real == 2
        and n_real < len(ordered)
        and all(recip[i] == conj[i] for i in range(len(ordered)) if conj[i] != i)
    )
    flags = ClassFlags(
        is_perron=True,
        is_pisot=is_pisot,
        is_salem=is_salem,
        is_unit=abs(p.constant) == 1,
        is_reciprocal=reciprocal,
    )
    return ConjugateSystem(p, ordered, precision_bits, flags, conj, recip)


def conjugate_system(poly: IntPolynomial | str, precision_bits: int = 256,
                     max_doublings: int = MAX_DOUBLINGS) -> ConjugateSystem:
    """Parse/isolate/classify, doubling precision when dominance is not yet certifiable."""
    p = parse_polynomial(poly) if isinstance(poly, str) else poly
    prec = precision_bits
    for _ in range(max_doublings + 1):
        try:
            system = classify(p, isolate_roots(p, prec), prec)
        except PrecisionError:
            prec *= 2
            continue
        if prec != precision_bits:
            system = ConjugateSystem(system.polynomial, system.roots, precision_bits,
                                     system.flags, system.conj_perm, system.recip_perm)
        return system
    raise PrecisionError(f"classification of {p} did not certify within the precision cap", module="polyarith")


def degree_one_system(p: IntPolynomial, precision_bits: int = 256) -> ConjugateSystem:
    """The trivial system of ``x - a`` with integer ``a >= 2``; there are no other conjugates."""
    if p.degree != 1 or not p.is_monic():
        raise NotPerronError("expected a monic linear polynomial")
    a = -p.constant
    if a < 2:
        raise NotPerronError(f"root {a} is not an integer greater than 1")
    root = ComplexEnclosure.from_value(a, precision_bits + 32)
    flags = ClassFlags(is_perron=True, is_pisot=True, is_salem=False, is_unit=False, is_reciprocal=False)
    return ConjugateSystem(p, (root,), precision_bits, flags, (0,), None)


@lru_cache(maxsize=64)
def _refined(coefficients: tuple[int, ...], precision_bits: int) -> ConjugateSystem:
    if len(coefficients) == 2:
        return degree_one_system(IntPolynomial(coefficients), precision_bits)
    return conjugate_system(IntPolynomial(coefficients), precision_bits)


def refine(system: ConjugateSystem, precision_bits: int) -> ConjugateSystem:
    """The same conjugate system recomputed at ``precision_bits``, in the same root order."""
    if precision_bits == system.precision_bits:
        return system
    return _refine_mapped(system, precision_bits)


@lru_cache(maxsize=128)
def _refine_mapped(system: ConjugateSystem, precision_bits: int) -> ConjugateSystem:
    new = _refined(system.polynomial.coefficients, precision_bits)
    mapping = []
    for z in system.roots:
        hits = [j for j, w in enumerate(new.roots) if z.overlaps(w)]
        if len(hits) != 1:
            raise PrecisionError("refined roots do not match the original enclosures", module="polyarith")
        mapping.append(hits[0])
    if mapping == list(range(system.degree)):
        return new
    roots = tuple(new.roots[j] for j in mapping)
    conj = _conjugate_permutation(roots)
    recip = _reciprocal_permutation(roots) if system.recip_perm is not None else None
    return ConjugateSystem(system.polynomial, roots, precision_bits, system.flags, conj, recip)
