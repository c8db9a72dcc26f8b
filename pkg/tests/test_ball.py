from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from recurzeta.ball import BranchCutError, ComplexEnclosure, format_real, raw_to_fraction

PREC = 96
small = st.fractions(min_value=-50, max_value=50, max_denominator=1000)


def ball(re, im=0):
    return ComplexEnclosure.from_parts(ComplexEnclosure.from_value(Fraction(re), PREC),
                                       ComplexEnclosure.from_value(Fraction(im), PREC))


def exact_contains(b, re, im=Fraction(0)):
    mr, mi = b.mid_fraction()
    r = b.radius_fraction()
    return (mr - re) ** 2 + (mi - im) ** 2 <= r * r


@given(small, small, small, small)
def test_field_operations_enclose_exact_results(a, b, c, d):
    x, y = ball(a, b), ball(c, d)
    s = x + y
    assert exact_contains(s, a + c, b + d)
    p = x * y
    assert exact_contains(p, a * c - b * d, a * d + b * c)
    if c or d:
        q = x / y
        den = c * c + d * d
        assert exact_contains(q, (a * c + b * d) / den, (b * c - a * d) / den)


@settings(max_examples=60)
@given(small, small)
def test_exp_and_log_enclose_high_precision_values(a, b):
    x = ball(a / 10, b)
    with mpmath.workprec(400):
        ref = mpmath.exp(mpmath.mpc(mpmath.mpf(a.numerator) / a.denominator / 10,
                                    mpmath.mpf(b.numerator) / b.denominator))
        e = x.exp()
        dist = abs(mpmath.mpc(e.real_mid, e.imag_mid) - ref)
        assert dist <= e.radius * (1 + mpmath.mpf(2) ** -300)
    if a > 0 or b != 0:
        y = ball(a, b)
        with mpmath.workprec(400):
            ref = mpmath.log(mpmath.mpc(mpmath.mpf(a.numerator) / a.denominator,
                                        mpmath.mpf(b.numerator) / b.denominator))
            lg = y.log()
            assert abs(mpmath.mpc(lg.real_mid, lg.imag_mid) - ref) <= lg.radius


def test_log_rejects_branch_cut():
    with pytest.raises(BranchCutError):
        ball(-2).log()
    with pytest.raises(ZeroDivisionError):
        ComplexEnclosure(mpmath.mpf(0)._mpf_, mpmath.mpf(0)._mpf_, mpmath.mpf(1)._mpf_, 64).inv()


@given(small, small, st.integers(min_value=-6, max_value=6))
def test_conjugation_commutes_bit_exactly(a, b, n):
    x = ball(a, b)
    assert (x * x).conj().raw == (x.conj() * x.conj()).raw
    assert x.exp().conj().raw == x.conj().exp().raw
    if a or b:
        assert x.pow_int(n).conj().raw == x.conj().pow_int(n).raw


def test_pi_enclosure_and_formatting():
    pi = ComplexEnclosure.pi(128)
    with mpmath.workprec(300):
        ref = raw_to_fraction(mpmath.mpf(mpmath.pi)._mpf_)
    assert pi.re_lower() <= ref <= pi.re_upper()
    assert pi.radius_log2() < -120
    assert format_real(mpmath.mpf("2.5"), 3) == "2.5"
    assert format_real(mpmath.mpf(1) / 3, 5) == "0.33333"
    # half-even at the last digit
    assert format_real(mpmath.mpf("0.125"), 2) == "0.12"


def test_inflate_grows_radius():
    x = ball(1)
    y = x.inflate(Fraction(1, 8))
    assert y.radius_fraction() >= Fraction(1, 8)
    assert y.contains(Fraction(9, 8))
