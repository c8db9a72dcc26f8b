"""Midpoint-radius complex balls with outward rounding.

Midpoints are mpmath raw binary floats (``(sign, man, exp, bc)`` tuples) held
at an explicit working precision; radii are nonnegative raw floats kept at
``RAD_PREC`` bits and always rounded upward.  Ring operations compute the exact
midpoint first, round it to nearest, and fold the exact rounding error into the
radius, so every ball contains the exact result of the operation applied to
any points of its operands.

Elementary functions are evaluated by mpmath at ``prec + GUARD`` bits and their
evaluation error is bounded by ``2**-(prec + GUARD - 10)`` relative to the
result (plus an absolute term of the same size), a thousand-ulp allowance over
mpmath's documented accuracy.

Nothing here touches ``mpmath.mp``; all precision is passed explicitly, so the
values are safe to share between threads.
"""
from __future__ import annotations

from decimal import ROUND_HALF_EVEN, Context, Decimal
from fractions import Fraction
import math

import mpmath
from mpmath import libmp as L

RAD_PREC = 64
GUARD = 20

_ZERO = L.fzero
_ONE = L.fone


class BranchCutError(ValueError):
    """The ball meets the branch cut of a principal-branch function."""


def _up_add(a, b):
    return L.mpf_add(a, b, RAD_PREC, "u")


def _up_mul(a, b):
    return L.mpf_mul(a, b, RAD_PREC, "u")


def _up_div(a, b):
    return L.mpf_div(a, b, RAD_PREC, "u")


def _dn_sub(a, b):
    return L.mpf_sub(a, b, RAD_PREC, "d")


def _dn_mul(a, b):
    return L.mpf_mul(a, b, RAD_PREC, "d")


def _round(x, prec):
    """Round an exact value to nearest; return ``(rounded, |error|)``."""
    y = L.mpf_pos(x, prec, "n")
    if y == x:
        return y, _ZERO
    return y, L.mpf_abs(L.mpf_sub(x, y))


def _mag_up(re, im):
    if im == _ZERO:
        return L.mpf_abs(re)
    if re == _ZERO:
        return L.mpf_abs(im)
    s = _up_add(_up_mul(re, re), _up_mul(im, im))
    return L.mpf_sqrt(s, RAD_PREC, "u")


def _mag_dn(re, im):
    if im == _ZERO:
        return L.mpf_abs(re)
    if re == _ZERO:
        return L.mpf_abs(im)
    s = L.mpf_add(_dn_mul(re, re), _dn_mul(im, im), RAD_PREC, "d")
    return L.mpf_sqrt(s, RAD_PREC, "d")


def _eval_error(values, wp):
    """Bound on the evaluation error of an mpmath elementary function."""
    total = _ONE
    for v in values:
        total = _up_add(total, L.mpf_abs(v))
    return L.mpf_shift(total, -(wp - 10))


def _expm1_up(r):
    """Upper bound for exp(r) - 1, r >= 0."""
    if r == _ZERO:
        return _ZERO
    if L.mpf_le(r, _ONE):
        return _up_add(r, _up_mul(r, r))
    e = L.mpf_exp(r, RAD_PREC, "u")
    return _up_mul(_up_mul(r, e), L.from_rational(1025, 1024, RAD_PREC, "u"))


def raw_to_fraction(x) -> Fraction:
    if x == _ZERO:
        return Fraction(0)
    sign, man, exp, _ = x
    v = Fraction(int(man)) * (Fraction(2) ** exp)
    return -v if sign else v


def _fraction_to_raw(q: Fraction, prec):
    """Round a rational to nearest; return ``(raw, |error| as raw upper bound)``."""
    q = Fraction(q)
    den = q.denominator
    if den & (den - 1) == 0:
        x = L.from_man_exp(q.numerator, -(den.bit_length() - 1))
        return _round(x, prec)
    x = L.from_rational(q.numerator, den, prec, "n")
    err = abs(q - raw_to_fraction(x))
    return x, L.from_rational(err.numerator, err.denominator, RAD_PREC, "u")


def format_real(x, digits: int) -> str:
    """Decimal rendering of a raw float or mpf, ``digits`` significant digits, half-even."""
    if isinstance(x, mpmath.mpf):
        x = x._mpf_
    q = raw_to_fraction(x)
    if q == 0:
        return "0"
    num, den = q.numerator, q.denominator
    k = den.bit_length() - 1
    d = Decimal(num * 5**k).scaleb(-k)
    d = Context(prec=digits, rounding=ROUND_HALF_EVEN).plus(d)
    s = format(d, "f")
    if "." in s:
        s = s.rstrip("0").rstrip(".")
    return s


class ComplexEnclosure:
    """A closed disk ``{z : |z - (real_mid + i imag_mid)| <= radius}``."""

    __slots__ = ("_re", "_im", "_rad", "prec")

    def __init__(self, re=_ZERO, im=_ZERO, rad=_ZERO, prec=53):
        self._re = re
        self._im = im
        self._rad = rad
        self.prec = prec

    # ---- construction ------------------------------------------------
    @classmethod
    def from_value(cls, value, prec: int) -> "ComplexEnclosure":
        if isinstance(value, ComplexEnclosure):
            return value
        if isinstance(value, bool):
            value = int(value)
        if isinstance(value, int):
            re, e = _round(L.from_int(value), prec)
            return cls(re, _ZERO, e, prec)
        if isinstance(value, Fraction):
            re, e = _fraction_to_raw(value, prec)
            return cls(re, _ZERO, e, prec)
        if isinstance(value, float):
            return cls.from_value(Fraction(value), prec)
        if isinstance(value, complex):
            re, e1 = _fraction_to_raw(Fraction(value.real), prec)
            im, e2 = _fraction_to_raw(Fraction(value.imag), prec)
            return cls(re, im, _up_add(e1, e2), prec)
        if isinstance(value, mpmath.mpf):
            re, e = _round(value._mpf_, prec)
            return cls(re, _ZERO, e, prec)
        if isinstance(value, mpmath.mpc):
            re, e1 = _round(value._mpc_[0], prec)
            im, e2 = _round(value._mpc_[1], prec)
            return cls(re, im, _up_add(e1, e2), prec)
        raise TypeError(f"cannot enclose {type(value).__name__}")

    @classmethod
    def from_parts(cls, re_ball: "ComplexEnclosure", im_ball: "ComplexEnclosure") -> "ComplexEnclosure":
        """Combine two real balls into ``re + i*im``."""
        prec = max(re_ball.prec, im_ball.prec)
        rad = _up_add(_up_add(re_ball._rad, im_ball._rad),
                      _up_add(L.mpf_abs(re_ball._im), L.mpf_abs(im_ball._im)))
        return cls(re_ball._re, im_ball._re, rad, prec)

    @classmethod
    def pi(cls, prec: int) -> "ComplexEnclosure":
        lo = L.mpf_pi(prec, "d")
        hi = L.mpf_pi(prec, "u")
        return cls(lo, _ZERO, L.mpf_sub(hi, lo, RAD_PREC, "u"), prec)

    # ---- accessors ---------------------------------------------------
    @property
    def real_mid(self):
        return mpmath.mp.make_mpf(self._re)

    @property
    def imag_mid(self):
        return mpmath.mp.make_mpf(self._im)

    @property
    def radius(self):
        return mpmath.mp.make_mpf(self._rad)

    @property
    def raw(self):
        return self._re, self._im, self._rad

    def mid_fraction(self) -> tuple[Fraction, Fraction]:
        return raw_to_fraction(self._re), raw_to_fraction(self._im)

    def radius_fraction(self) -> Fraction:
        return raw_to_fraction(self._rad)

    def mid_complex(self) -> complex:
        return complex(L.to_float(self._re), L.to_float(self._im))

    def radius_log2(self) -> float:
        if self._rad == _ZERO:
            return -math.inf
        sign, man, exp, bc = self._rad
        return exp + bc

    def is_exact(self) -> bool:
        return self._rad == _ZERO

    def has_real_center(self) -> bool:
        return self._im == _ZERO

    def __repr__(self):
        re = mpmath.nstr(self.real_mid, 20)
        im = mpmath.nstr(self.imag_mid, 20)
        rad = mpmath.nstr(self.radius, 3)
        return f"ComplexEnclosure({re} + {im}j ± {rad})"

    def __eq__(self, other):
        if not isinstance(other, ComplexEnclosure):
            return NotImplemented
        return self.raw == other.raw

    def __hash__(self):
        return hash(self.raw)

    # ---- exact predicates (via rationals) ----------------------------
    def re_lower(self) -> Fraction:
        return raw_to_fraction(self._re) - raw_to_fraction(self._rad)

    def re_upper(self) -> Fraction:
        return raw_to_fraction(self._re) + raw_to_fraction(self._rad)

    def im_lower(self) -> Fraction:
        return raw_to_fraction(self._im) - raw_to_fraction(self._rad)

    def im_upper(self) -> Fraction:
        return raw_to_fraction(self._im) + raw_to_fraction(self._rad)

    def mod_upper(self) -> Fraction:
        return raw_to_fraction(_up_add(_mag_up(self._re, self._im), self._rad))

    def mod_lower(self) -> Fraction:
        m = raw_to_fraction(_mag_dn(self._re, self._im)) - raw_to_fraction(self._rad)
        return max(m, Fraction(0))

    def contains(self, value) -> bool:
        if isinstance(value, ComplexEnclosure):
            if value._rad != _ZERO:
                return self.contains_ball(value)
            vr, vi = value.mid_fraction()
        else:
            c = complex(value) if isinstance(value, complex) else None
            if c is not None:
                vr, vi = Fraction(c.real), Fraction(c.imag)
            else:
                vr, vi = Fraction(value), Fraction(0)
        mr, mi = self.mid_fraction()
        r = self.radius_fraction()
        return (mr - vr) ** 2 + (mi - vi) ** 2 <= r * r

    def contains_ball(self, other: "ComplexEnclosure") -> bool:
        mr, mi = self.mid_fraction()
        nr, ni = other.mid_fraction()
        slack = self.radius_fraction() - other.radius_fraction()
        if slack < 0:
            return False
        return (mr - nr) ** 2 + (mi - ni) ** 2 <= slack * slack

    def overlaps(self, other: "ComplexEnclosure") -> bool:
        mr, mi = self.mid_fraction()
        nr, ni = other.mid_fraction()
        r = self.radius_fraction() + other.radius_fraction()
        return (mr - nr) ** 2 + (mi - ni) ** 2 <= r * r

    def contains_zero(self) -> bool:
        return self.contains(0)

    def is_real_certified_positive(self) -> bool:
        """True when every point of the ball has positive real part and the ball is centred on the axis."""
        return self._im == _ZERO and self.re_lower() > 0

    # ---- arithmetic --------------------------------------------------
    def _coerce(self, other) -> "ComplexEnclosure":
        if isinstance(other, ComplexEnclosure):
            return other
        return ComplexEnclosure.from_value(other, self.prec)

    def __neg__(self):
        return ComplexEnclosure(L.mpf_neg(self._re), L.mpf_neg(self._im), self._rad, self.prec)

    def __pos__(self):
        return self

    def conj(self) -> "ComplexEnclosure":
        return ComplexEnclosure(self._re, L.mpf_neg(self._im), self._rad, self.prec)

    def __add__(self, other):
        o = self._coerce(other)
        prec = max(self.prec, o.prec)
        re, e1 = _round(L.mpf_add(self._re, o._re), prec)
        im, e2 = _round(L.mpf_add(self._im, o._im), prec)
        rad = _up_add(_up_add(self._rad, o._rad), _up_add(e1, e2))
        return ComplexEnclosure(re, im, rad, prec)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        prec = max(self.prec, o.prec)
        ar, ai, ra = self._re, self._im, self._rad
        br, bi, rb = o._re, o._im, o._rad
        if ai == _ZERO and bi == _ZERO:
            re, e1 = _round(L.mpf_mul(ar, br), prec)
            im, e2 = _ZERO, _ZERO
        else:
            re, e1 = _round(L.mpf_sub(L.mpf_mul(ar, br), L.mpf_mul(ai, bi)), prec)
            im, e2 = _round(L.mpf_add(L.mpf_mul(ar, bi), L.mpf_mul(ai, br)), prec)
        rad = _up_add(e1, e2)
        if rb != _ZERO:
            rad = _up_add(rad, _up_mul(_mag_up(ar, ai), rb))
        if ra != _ZERO:
            rad = _up_add(rad, _up_mul(_mag_up(br, bi), ra))
            if rb != _ZERO:
                rad = _up_add(rad, _up_mul(ra, rb))
        return ComplexEnclosure(re, im, rad, prec)

    __rmul__ = __mul__

    def inv(self) -> "ComplexEnclosure":
        ar, ai, ra = self._re, self._im, self._rad
        prec = self.prec
        d = L.mpf_add(L.mpf_mul(ar, ar), L.mpf_mul(ai, ai))
        if d == _ZERO:
            raise ZeroDivisionError("inverse of a ball centred at zero")
        re = L.mpf_div(ar, d, prec, "n")
        im = L.mpf_div(L.mpf_neg(ai), d, prec, "n") if ai != _ZERO else _ZERO
        rad = L.mpf_shift(_up_add(L.mpf_abs(re), L.mpf_abs(im)), 1 - prec)
        if ra != _ZERO:
            m = _mag_dn(ar, ai)
            if not L.mpf_gt(m, ra):
                raise ZeroDivisionError("inverse of a ball containing zero")
            den = _dn_mul(m, _dn_sub(m, ra))
            if not L.mpf_gt(den, _ZERO):
                raise ZeroDivisionError("inverse of a ball containing zero")
            rad = _up_add(rad, _up_div(ra, den))
        return ComplexEnclosure(re, im, rad, prec)

    def __truediv__(self, other):
        return self * self._coerce(other).inv()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inv()

    def __pow__(self, n):
        if not isinstance(n, int):
            raise TypeError("only integer powers; use exp/log for complex exponents")
        return self.pow_int(n)

    def pow_int(self, n: int) -> "ComplexEnclosure":
        if n < 0:
            return self.pow_int(-n).inv()
        result = ComplexEnclosure(_ONE, _ZERO, _ZERO, self.prec)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def real_part(self) -> "ComplexEnclosure":
        return ComplexEnclosure(self._re, _ZERO, self._rad, self.prec)

    def imag_part(self) -> "ComplexEnclosure":
        return ComplexEnclosure(self._im, _ZERO, self._rad, self.prec)

    def mul_i(self) -> "ComplexEnclosure":
        return ComplexEnclosure(L.mpf_neg(self._im), self._re, self._rad, self.prec)

    # ---- elementary functions ----------------------------------------
    def exp(self) -> "ComplexEnclosure":
        prec = self.prec
        wp = prec + GUARD
        ex = L.mpf_exp(self._re, wp, "n")
        if self._im == _ZERO:
            re, e1 = _round(ex, prec)
            im, e2 = _ZERO, _ZERO
        else:
            c, s = L.mpf_cos_sin(self._im, wp, "n")
            re, e1 = _round(L.mpf_mul(ex, c), prec)
            im, e2 = _round(L.mpf_mul(ex, s), prec)
        ex_up = _up_add(ex, L.mpf_shift(ex, -(wp - 12)))
        rad = _up_add(_up_add(e1, e2), L.mpf_shift(ex_up, -(wp - 12)))
        if self._rad != _ZERO:
            rad = _up_add(rad, _up_mul(ex_up, _expm1_up(self._rad)))
        return ComplexEnclosure(re, im, rad, prec)

    def _check_cut(self):
        if L.mpf_gt(L.mpf_abs(self._im), self._rad):
            return
        if L.mpf_gt(L.mpf_sub(self._re, self._rad, RAD_PREC, "d"), _ZERO):
            return
        raise BranchCutError("ball meets the non-positive real axis")

    def _lipschitz_log(self):
        """Bound on |log(z) - log(mid)| over the ball (log is 1/|w|-Lipschitz there)."""
        if self._rad == _ZERO:
            return _ZERO
        m = _mag_dn(self._re, self._im)
        den = _dn_sub(m, self._rad)
        if not L.mpf_gt(den, _ZERO):
            raise BranchCutError("ball too close to zero")
        return _up_div(self._rad, den)

    def log(self) -> "ComplexEnclosure":
        """Principal logarithm; raises BranchCutError when the ball meets (-inf, 0]."""
        self._check_cut()
        prec = self.prec
        wp = prec + GUARD
        if self._im == _ZERO:
            lr, li = L.mpf_log(self._re, wp, "n"), _ZERO
        else:
            lr, li = L.mpc_log((self._re, self._im), wp, "n")
        re, e1 = _round(lr, prec)
        im, e2 = _round(li, prec)
        rad = _up_add(_up_add(e1, e2), _eval_error((lr, li), wp))
        rad = _up_add(rad, self._lipschitz_log())
        return ComplexEnclosure(re, im, rad, prec)

    def arg(self) -> "ComplexEnclosure":
        """Principal argument as a real ball; same domain restriction as log."""
        self._check_cut()
        prec = self.prec
        wp = prec + GUARD
        if self._im == _ZERO:
            a = _ZERO
            rad = _ZERO
        else:
            a0 = L.mpf_atan2(self._im, self._re, wp, "n")
            a, e = _round(a0, prec)
            rad = _up_add(e, _eval_error((a0,), wp))
        rad = _up_add(rad, self._lipschitz_log())
        return ComplexEnclosure(a, _ZERO, rad, prec)

    def abs(self) -> "ComplexEnclosure":
        """Modulus as a real ball."""
        prec = self.prec
        if self._im == _ZERO:
            m, e = L.mpf_abs(self._re), _ZERO
        else:
            h = L.mpf_hypot(self._re, self._im, prec + GUARD, "n")
            m, e = _round(h, prec)
            e = _up_add(e, L.mpf_shift(h, -(prec + GUARD - 4)))
        return ComplexEnclosure(m, _ZERO, _up_add(self._rad, e), prec)

    def log_abs(self) -> "ComplexEnclosure":
        """log|z| as a real ball (needs 0 outside the ball)."""
        prec = self.prec
        wp = prec + GUARD
        if self._im == _ZERO:
            lr = L.mpf_log(L.mpf_abs(self._re), wp, "n")
        else:
            lr = L.mpc_log((self._re, self._im), wp, "n")[0]
        re, e = _round(lr, prec)
        rad = _up_add(e, _eval_error((lr,), wp))
        rad = _up_add(rad, self._lipschitz_log())
        return ComplexEnclosure(re, _ZERO, rad, prec)

    def inflate(self, extra) -> "ComplexEnclosure":
        """Same midpoint, radius enlarged by the nonnegative rational ``extra``."""
        extra = Fraction(extra)
        if extra < 0:
            raise ValueError("radius increment must be nonnegative")
        if extra == 0:
            return self
        e = L.from_rational(extra.numerator, extra.denominator, RAD_PREC, "u")
        return ComplexEnclosure(self._re, self._im, _up_add(self._rad, e), self.prec)

    def with_prec(self, prec: int) -> "ComplexEnclosure":
        """Re-round the midpoint to ``prec`` bits."""
        re, e1 = _round(self._re, prec)
        im, e2 = _round(self._im, prec)
        return ComplexEnclosure(re, im, _up_add(self._rad, _up_add(e1, e2)), prec)

    def floor_upper(self) -> int:
        """floor of the upper bound of the real part."""
        return math.floor(self.re_upper())
