from fractions import Fraction

import mpmath
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import FIBONACCI, HEXABONACCI, SALEM4, SCHINZEL, TRIBONACCI, system_for
from recurzeta.ball import ComplexEnclosure
from recurzeta.errors import (
    NotMonicError,
    NotPerronError,
    PolynomialParseError,
    PrecisionError,
    ReducibleError,
    RepeatedRootError,
)
from recurzeta.polyarith import (
    IntPolynomial,
    classify,
    conjugate_system,
    isolate_roots,
    parse_polynomial,
    refine,
)


def horner(p: IntPolynomial, z: ComplexEnclosure) -> ComplexEnclosure:
    acc = ComplexEnclosure.from_value(0, z.prec)
    for c in reversed(p.coefficients):
        acc = acc * z + c
    return acc


def oracle_roots(p: IntPolynomial, dps: int = 120):
    with mpmath.workdps(dps):
        return mpmath.polyroots(list(reversed(p.coefficients)), maxsteps=400, extraprec=4 * dps)


# ---------------------------------------------------------------- parsing

@pytest.mark.parametrize("text, coeffs", [
    ("x^2-x-1", (-1, -1, 1)),
    ("x^6-2x^4-6x^3-2x^2+1", (1, 0, -2, -6, -2, 0, 1)),
    ("  x ^ 3 - x**2 -  x - 1 ", (-1, -1, -1, 1)),
    ("3*x - 7", (-7, 3)),
    ("[-1, -1, 1]", (-1, -1, 1)),
    ("[1,0,-2,-6,-2,0,1]", (1, 0, -2, -6, -2, 0, 1)),
    ("-x+x^2-1", (-1, -1, 1)),
    ("x^2 + x^2 - 2", (-2, 0, 2)),
    ("x^40 - 12345678901234567890123", (-12345678901234567890123,) + (0,) * 39 + (1,)),
])
def test_parse_examples(text, coeffs):
    assert parse_polynomial(text).coefficients == coeffs


@pytest.mark.parametrize("text", [
    "x^2 + y", "x^2 + 1.5", "x^2/2", "", "0", "x - x", "7", "[0, 0]", "x^", "x^2 +* 1", "[1, 2",
    "x^-2 + 1", "(x+1)^2",
])
def test_parse_errors(text):
    with pytest.raises(PolynomialParseError):
        parse_polynomial(text)


polys = st.lists(st.integers(-20, 20), min_size=2, max_size=8).filter(lambda c: c[-1] != 0)


@given(polys)
def test_parse_round_trip(coeffs):
    p = IntPolynomial(tuple(coeffs))
    assert parse_polynomial(str(p)) == p
    assert parse_polynomial(str(list(coeffs))) == p


@given(polys)
def test_parse_agrees_with_sympy(coeffs):
    p = IntPolynomial(tuple(coeffs))
    x = sympy.Symbol("x")
    expr = sympy.sympify(str(p).replace("^", "**"))
    assert sympy.Poly(expr, x).all_coeffs()[::-1] == list(coeffs)


# ---------------------------------------------------------------- roots

def test_fibonacci_roots_match_quadratic_formula():
    roots = isolate_roots(parse_polynomial(FIBONACCI), 128)
    with mpmath.workprec(400):
        phi = (1 + mpmath.sqrt(5)) / 2
        psi = (1 - mpmath.sqrt(5)) / 2
        expected = sorted([phi, psi], reverse=True)
        for z, ref in zip(roots, expected):
            assert abs(mpmath.mpc(z.real_mid, z.imag_mid) - ref) <= z.radius
    assert all(z.radius_log2() <= -64 for z in roots)


@pytest.mark.parametrize("text", [TRIBONACCI, HEXABONACCI, SCHINZEL, SALEM4, "x^5-x-1", "x^7-3x^2+x-5"])
def test_roots_contain_independent_oracle_roots(text):
    p = parse_polynomial(text)
    roots = isolate_roots(p, 256)
    assert len(roots) == p.degree
    ref = oracle_roots(p)
    with mpmath.workdps(120):
        for w in ref:
            hits = [z for z in roots if abs(mpmath.mpc(z.real_mid, z.imag_mid) - w) <= z.radius]
            assert len(hits) == 1
    for i, a in enumerate(roots):
        assert a.radius_log2() <= -128
        for b in roots[i + 1:]:
            assert not a.overlaps(b)


def test_schinzel_and_salem_reference_values(schinzel, salem):
    assert abs(schinzel.roots[0].mid_complex() - 2.2433) < 1e-3
    assert any(abs(z.mid_complex() - complex(-0.92, 1.17)) < 0.02 for z in schinzel.roots)
    values = [z.mid_complex() for z in salem.roots]
    assert abs(values[0] - 1.7221) < 1e-3
    assert any(abs(v - 0.5807) < 1e-3 for v in values)
    assert any(abs(v - complex(-0.6514, 0.7587)) < 1e-3 for v in values)


def test_repeated_roots_rejected():
    with pytest.raises(RepeatedRootError):
        isolate_roots(parse_polynomial("x^3 - 3x + 2"), 128)
    with pytest.raises(ValueError):
        isolate_roots(parse_polynomial(FIBONACCI), 32)


def test_roots_are_deterministic():
    p = parse_polynomial(SCHINZEL)
    assert [z.raw for z in isolate_roots(p, 256)] == [z.raw for z in isolate_roots(p, 256)]


@pytest.mark.parametrize("text", [FIBONACCI, TRIBONACCI, HEXABONACCI, SCHINZEL, SALEM4, "x^3-5x+1"])
def test_root_invariants(text):
    p = parse_polynomial(text)
    roots = isolate_roots(p, 192)
    r = p.degree
    total = sum(roots[1:], roots[0])
    assert total.contains(-p.coefficients[-2])
    prod = roots[0]
    for z in roots[1:]:
        prod = prod * z
    assert prod.contains((-1) ** r * p.constant)
    for z in roots:
        assert horner(p, z).contains_zero()
        if not z.has_real_center():
            mirror = [w for w in roots if w.raw == z.conj().raw]
            assert len(mirror) == 1


@pytest.mark.parametrize("text", [TRIBONACCI, SCHINZEL, SALEM4])
def test_refinement_is_consistent(text):
    low = system_for(text, 128)
    high = refine(low, 512)
    for a, b in zip(low.roots, high.roots):
        assert a.contains_ball(b) or a.overlaps(b)
        assert b.radius_fraction() <= a.radius_fraction()


@settings(max_examples=25, deadline=None)
@given(st.lists(st.integers(-6, 6), min_size=2, max_size=6))
def test_random_polynomials_isolate(coeffs):
    p = IntPolynomial(tuple(coeffs) + (1,))
    try:
        roots = isolate_roots(p, 128)
    except RepeatedRootError:
        x = sympy.Symbol("x")
        assert sympy.degree(sympy.gcd(p.to_sympy(x), sympy.diff(p.to_sympy(x), x)), x) > 0
        return
    assert len(roots) == p.degree
    for z in roots:
        assert horner(p, z).contains_zero()


# ---------------------------------------------------------------- classification

def test_hexabonacci_flags(hexa):
    f = hexa.flags
    assert f.is_perron and f.is_pisot and f.is_unit and not f.is_reciprocal and not f.is_salem
    assert abs(hexa.roots[0].mid_complex() - 1.98358284342) < 1e-10


def test_schinzel_flags(schinzel):
    f = schinzel.flags
    assert f.is_perron and f.is_unit and f.is_reciprocal
    assert not f.is_pisot and not f.is_salem


def test_salem_flags(salem):
    f = salem.flags
    assert f.is_salem and f.is_perron and f.is_unit and f.is_reciprocal and not f.is_pisot
    # unit-circle roots certified through the reciprocal pairing
    assert [salem.on_unit_circle(i) for i in range(4)] == [False, True, True, False]
    assert salem.log_moduli[1].is_exact() and salem.log_moduli[1].contains(0)


def test_non_unit_flags(nonunit):
    assert nonunit.flags.is_perron and not nonunit.flags.is_unit


@pytest.mark.parametrize("text", [FIBONACCI, TRIBONACCI, HEXABONACCI, SCHINZEL, SALEM4, "x^2-5x+3", "x^5-x-1"])
def test_classification_invariants(text):
    s = system_for(text)
    f = s.flags
    assert not f.is_pisot or f.is_perron
    assert not f.is_salem or (f.is_reciprocal and f.is_unit)
    top = s.roots[0]
    assert top.has_real_center() and top.re_lower() > 1
    for z in s.roots[1:]:
        assert top.mod_lower() > z.mod_upper()
    # decreasing modulus, up to clusters the enclosures cannot order
    for a, b in zip(s.roots[1:], s.roots[2:]):
        assert b.mod_lower() <= a.mod_upper()
    for i in range(s.degree):
        assert s.roots[s.conj_perm[i]].raw == s.roots[i].conj().raw


@pytest.mark.parametrize("text, error", [
    ("x^2-1", ReducibleError),
    ("x^4-x^3-x^2+1", ReducibleError),
    ("2x^2-x-1", NotMonicError),
    ("x^2+1", NotPerronError),
    ("x^2+x-1", NotPerronError),
    ("x^4-2", NotPerronError),
    ("x-3", NotPerronError),
])
def test_classification_errors(text, error):
    with pytest.raises(error):
        conjugate_system(text, 128)


def test_classify_direct_call():
    p = parse_polynomial(FIBONACCI)
    roots = isolate_roots(p, 128)
    s = classify(p, list(reversed(roots)), 128)
    assert s.roots[0].re_lower() > Fraction(3, 2)
    assert s.precision_bits == 128


def test_precision_error_is_not_a_math_error():
    assert not issubclass(PrecisionError, NotPerronError)
