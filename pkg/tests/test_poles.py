import math
from fractions import Fraction

import mpmath
import pytest

from conftest import (
    ALL_FIXTURES,
    FIBONACCI,
    HEXABONACCI,
    SALEM4,
    SCHINZEL,
    TRIBONACCI,
    kappa_to_perron,
    lattices_for,
    salem_listed_order,
    system_for,
)
from recurzeta.ball import ComplexEnclosure
from recurzeta.poles import (
    count_multi_indices,
    enumerate_poles,
    extended,
    fibre_brute_force,
    fibre_members,
    fibre_size,
    fundamental_strip_contains,
    kappa_bound,
    multi_indices,
    plot_data,
    pole_location,
    real_part_equals,
    vertical_translates,
)
from recurzeta.relations import verify_relation


def oracle_location(system, kappa, n=0, dps=60):
    """s_{kappa,n} from mpmath roots matched to the Perron order."""
    coeffs = list(reversed(system.polynomial.coefficients))
    with mpmath.workdps(dps):
        raw = mpmath.polyroots(coeffs, maxsteps=400, extraprec=400)
        roots = [min(raw, key=lambda w: abs(complex(w) - z.mid_complex())) for z in system.roots]
        log_a = mpmath.log(roots[0])
        prod = mpmath.mpc(1)
        for z, k in zip(roots[1:], kappa):
            prod *= z ** k
        arg = mpmath.arg(prod) if kappa and any(kappa) else mpmath.mpf(0)
        return mpmath.mpc(-sum(kappa) + mpmath.log(abs(prod)) / log_a, (arg + 2 * mpmath.pi * n) / log_a)


def close(loc, ref, slack=mpmath.mpf(10) ** -45):
    with mpmath.workdps(60):
        return abs(mpmath.mpc(loc.real_mid, loc.imag_mid) - ref) <= loc.radius + slack


def brute_reach(system, kappa):
    return kappa_bound(system, math.floor(pole_location(system, kappa).re_lower()))


def salem_closed_form(kp):
    k2, k3, k4 = kp
    return k2 + min(k3, k4) + 1


# ---------------------------------------------------------------- multi-indices

def test_multi_index_enumeration_order():
    got = list(multi_indices(2, 2))
    assert got == [(0, 0), (0, 1), (1, 0), (0, 2), (1, 1), (2, 0)]
    assert len(list(multi_indices(5, 6))) == count_multi_indices(5, 6) == 462
    assert list(multi_indices(0, 3)) == [()]
    assert extended((2, 3, 1)) == (-6, 2, 3, 1)


# ---------------------------------------------------------------- locations

@pytest.mark.parametrize("poly", ALL_FIXTURES)
def test_origin_and_first_translate(poly):
    s = system_for(poly)
    zero = (0,) * (s.degree - 1)
    loc = pole_location(s, zero)
    assert loc.is_exact() and loc.contains(0)
    one = pole_location(s, zero, 1)
    ref = oracle_location(s, zero, 1)
    assert close(one, ref)
    assert one.mid_fraction()[0] == 0


def test_salem_reciprocal_pole_is_exactly_minus_two(salem):
    perm = salem_listed_order(salem)
    # kappa selecting beta_2 = 1/beta once
    kappa = kappa_to_perron((1, 0, 0), perm)
    loc = pole_location(salem, kappa)
    assert loc.is_exact() and loc.contains(-2)


@pytest.mark.parametrize("poly", [TRIBONACCI, HEXABONACCI, SCHINZEL, SALEM4])
def test_locations_match_oracle(poly):
    s = system_for(poly)
    R, _ = lattices_for(poly)
    for kappa in list(multi_indices(s.degree - 1, 3))[:40]:
        for n in (-1, 0, 2):
            loc = pole_location(s, kappa, n, R)
            ref = oracle_location(s, kappa, n)
            assert close(loc, ref)


def test_location_rejects_bad_kappa(fib):
    with pytest.raises(ValueError):
        pole_location(fib, (1, 2))
    with pytest.raises(ValueError):
        pole_location(fib, (-1,))


def test_real_part_equals(salem, fib):
    perm = salem_listed_order(salem)
    assert real_part_equals(salem, kappa_to_perron((1, 0, 0), perm), -2)
    assert not real_part_equals(salem, kappa_to_perron((1, 0, 0), perm), -1)
    # unit-circle conjugates: Re(s) = -|kappa|
    assert real_part_equals(salem, kappa_to_perron((0, 2, 1), perm), -3)
    assert real_part_equals(fib, (3,), -6)


# ---------------------------------------------------------------- kappa bound

def test_kappa_bound_examples(salem, schinzel, hexa, fib):
    for s in (salem, schinzel, hexa, fib):
        assert kappa_bound(s, Fraction(1, 2)) == 0
        assert kappa_bound(s, 0) == 0
    assert kappa_bound(salem, -2) == 2
    assert kappa_bound(fib, -2) == 1
    assert [kappa_bound(schinzel, t) for t in (-1, -2, -3)] == [2, 4, 6]


@pytest.mark.parametrize("poly", ALL_FIXTURES)
def test_kappa_bound_against_oracle(poly):
    s = system_for(poly)
    with mpmath.workdps(50):
        coeffs = list(reversed(s.polynomial.coefficients))
        mods = sorted((abs(z) for z in mpmath.polyroots(coeffs, maxsteps=400, extraprec=300)), reverse=True)
        for t in (-1, -2, -3, mpmath.mpf("-2.5")):
            ref = mpmath.log(mods[0]) * (-t) / (mpmath.log(mods[0]) - mpmath.log(mods[1]))
            got = kappa_bound(s, Fraction(str(t)))
            assert got == int(mpmath.floor(ref + mpmath.mpf(10) ** -30))


# ---------------------------------------------------------------- enumeration

def test_hexabonacci_poles_are_singletons(hexa):
    _, H = lattices_for(HEXABONACCI)
    recs = enumerate_poles(hexa, H, 6)
    assert len(recs) == 462
    assert all(r.fibre_size_total == 1 and len(r.fibre) == 1 for r in recs)
    assert all(row.fibre_size == 1 for row in plot_data(recs))


def test_schinzel_poles_collide(schinzel):
    R, H = lattices_for(SCHINZEL)
    recs = enumerate_poles(schinzel, H, 4, R)
    assert len(recs) < count_multi_indices(5, 4)
    assert sum(len(r.fibre) for r in recs) == count_multi_indices(5, 4)
    assert any(row.fibre_size >= 2 for row in plot_data(recs))
    for r in recs:
        assert r.representative == min(r.fibre)
        assert r.fibre_size_total >= len(r.fibre) >= 1
        assert fundamental_strip_contains(schinzel, r.location)
        # grouping soundness
        for eta in r.fibre[1:]:
            d = tuple(a - b for a, b in zip(extended(r.representative), extended(eta)))
            assert verify_relation(schinzel, d).holds


@pytest.mark.parametrize("poly", ALL_FIXTURES)
def test_zero_range_gives_single_record(poly):
    s = system_for(poly)
    _, H = lattices_for(poly)
    recs = enumerate_poles(s, H, 0)
    assert len(recs) == 1 and recs[0].location.contains(0) and recs[0].fibre_size_total == 1


def test_records_sorted_and_discrete(salem):
    R, H = lattices_for(SALEM4)
    recs = enumerate_poles(salem, H, 6, R)
    for a, b in zip(recs, recs[1:]):
        assert a.location.re_lower() <= b.location.re_upper()
    # points on one vertical line are bounded by the multi-indices reaching it
    lines: dict = {}
    for r in recs:
        t = round(r.location.mid_fraction()[0])
        if r.location.is_exact() or r.location.real_part().contains(t):
            lines.setdefault(t, []).append(r)
    for t, on_line in lines.items():
        if t < 0:
            assert len(on_line) <= count_multi_indices(3, kappa_bound(salem, t))
    assert plot_data([]) == []


# ---------------------------------------------------------------- fibres

def test_salem_fibre_example(salem):
    _, H = lattices_for(SALEM4)
    perm = salem_listed_order(salem)
    kappa = kappa_to_perron((2, 3, 1), perm)
    assert fibre_size(salem, H, kappa) == 4
    assert fibre_brute_force(salem, kappa, brute_reach(salem, kappa)) == 4
    assert kappa in fibre_members(salem, H, kappa)


@pytest.mark.parametrize("poly", ALL_FIXTURES)
def test_fibre_at_origin(poly):
    s = system_for(poly)
    _, H = lattices_for(poly)
    zero = (0,) * (s.degree - 1)
    assert fibre_size(s, H, zero) == 1
    assert fibre_brute_force(s, zero, 0) == 1


def test_hexabonacci_fibres(hexa):
    _, H = lattices_for(HEXABONACCI)
    assert fibre_size(hexa, H, (1, 0, 0, 0, 0)) == 1
    assert fibre_brute_force(hexa, (1, 0, 0, 0, 0), 4) == 1


def test_salem_closed_form_small_range(salem):
    _, H = lattices_for(SALEM4)
    perm = salem_listed_order(salem)
    for kp in multi_indices(3, 6):
        assert fibre_size(salem, H, kappa_to_perron(kp, perm)) == salem_closed_form(kp)


@pytest.mark.parametrize("poly, depth", [(SCHINZEL, 3), (TRIBONACCI, 8), (FIBONACCI, 8), (HEXABONACCI, 2)])
def test_fibre_agrees_with_brute_force(poly, depth):
    s = system_for(poly)
    _, H = lattices_for(poly)
    for kappa in multi_indices(s.degree - 1, depth):
        assert fibre_size(s, H, kappa) == fibre_brute_force(s, kappa, brute_reach(s, kappa))


# ---------------------------------------------------------------- translates

def test_vertical_translates(salem):
    _, H = lattices_for(SALEM4)
    rec = enumerate_poles(salem, H, 1)[1]
    pts = vertical_translates(salem, rec, range(-2, 3))
    assert pts[2] is rec.location
    step = ComplexEnclosure.pi(salem.work_prec) * 2 / salem.log_alpha
    for a, b in zip(pts, pts[1:]):
        gap = (b - a).imag_part()
        assert gap.overlaps(step)
        assert (b - a).real_part().contains(0)
    assert abs(float(step.real_mid) - 2 * math.pi / math.log(1.7221)) < 1e-3
