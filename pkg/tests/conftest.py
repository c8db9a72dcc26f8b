import pytest

from recurzeta.polyarith import conjugate_system
from recurzeta.recurrence import make_recurrence
from recurzeta.relations import find_relation_lattice, intersect_with_H0

FIBONACCI = "x^2-x-1"
TRIBONACCI = "x^3-x^2-x-1"
HEXABONACCI = "x^6-x^5-x^4-x^3-x^2-x-1"
SCHINZEL = "x^6-2x^4-6x^3-2x^2+1"
SALEM4 = "x^4-x^3-x^2-x+1"
NONUNIT = "x^2-5x+3"

UNIT_FIXTURES = [FIBONACCI, TRIBONACCI, HEXABONACCI, SCHINZEL, SALEM4]
ALL_FIXTURES = UNIT_FIXTURES + [NONUNIT]

# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE_RESULTS: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS):
        terminalreporter.write_line(ACCEPTANCE_RESULTS[key])


_SYSTEMS: dict = {}


def system_for(poly: str, precision_bits: int = 256):
    key = (poly, precision_bits)
    if key not in _SYSTEMS:
        _SYSTEMS[key] = conjugate_system(poly, precision_bits)
    return _SYSTEMS[key]


_LATTICES: dict = {}


def lattices_for(poly: str):
    """(R, R cap H0) at default settings."""
    if poly not in _LATTICES:
        R = find_relation_lattice(system_for(poly))
        _LATTICES[poly] = (R, intersect_with_H0(R))
    return _LATTICES[poly]


def nearest_index(system, value: complex) -> int:
    return min(range(system.degree), key=lambda i: abs(system.roots[i].mid_complex() - value))


def schinzel_listed_order(system):
    """Positions (in Perron order) of the sextic's roots listed as alpha_1..alpha_6.

    alpha_2 = 1/alpha_1, alpha_3 is the root near -0.93 + 1.17i, alpha_4 its
    conjugate, alpha_5 = 1/alpha_4 and alpha_6 = 1/alpha_3.
    """
    a1 = system.roots[0].mid_complex()
    a3 = complex(-0.93, 1.17)
    a4 = a3.conjugate()
    values = [a1, 1 / a1, a3, a4, 1 / a4, 1 / a3]
    perm = [nearest_index(system, v) for v in values]
    assert sorted(perm) == list(range(6))
    return perm


def salem_listed_order(system):
    """Positions of beta, beta_2 = 0.58..., beta_3 = -0.65 + 0.75i, beta_4 = conj(beta_3)."""
    values = [system.roots[0].mid_complex(), 0.58, complex(-0.65, 0.76), complex(-0.65, -0.76)]
    perm = [nearest_index(system, v) for v in values]
    assert sorted(perm) == list(range(4))
    return perm


def to_perron(vector_in_listed_order, perm):
    """Re-index a vector given in the listed order into Perron order."""
    out = [0] * len(perm)
    for listed_pos, perron_pos in enumerate(perm):
        out[perron_pos] = vector_in_listed_order[listed_pos]
    return tuple(out)


def kappa_to_perron(kappa_listed, perm):
    """Multi-index (k_2..k_r) in listed order -> Perron order."""
    return to_perron((0,) + tuple(kappa_listed), perm)[1:]


@pytest.fixture(scope="session")
def fib():
    return system_for(FIBONACCI)


@pytest.fixture(scope="session")
def trib():
    return system_for(TRIBONACCI)


@pytest.fixture(scope="session")
def hexa():
    return system_for(HEXABONACCI)


@pytest.fixture(scope="session")
def schinzel():
    return system_for(SCHINZEL)


@pytest.fixture(scope="session")
def salem():
    return system_for(SALEM4)


@pytest.fixture(scope="session")
def nonunit():
    return system_for(NONUNIT)


@pytest.fixture(scope="session")
def fib_spec(fib):
    return make_recurrence(fib, (0, 1))


@pytest.fixture(scope="session")
def trib_spec(trib):
    return make_recurrence(trib, (0, 0, 1))
