"""Certified computations for zeta functions of integer linear recurrence sequences."""

from .ball import ComplexEnclosure
from .errors import (
    BinetError,
    InconsistencyError,
    LatticeError,
    MathematicalError,
    NotMonicError,
    NotPerronError,
    PoleProximityError,
    PolynomialParseError,
    PrecisionError,
    RecurZetaError,
    ReducibleError,
    RepeatedRootError,
)
from .polyarith import ConjugateSystem, IntPolynomial, classify, conjugate_system, isolate_roots, parse_polynomial
from .recurrence import RecurrenceSpec, binet_coefficients, make_recurrence, terms
from .relations import (
    NormClass,
    RelationLattice,
    Verdict,
    decide_injectivity,
    find_relation_lattice,
    intersect_with_H0,
    is_trivial,
    norm_class,
    verify_relation,
)
from .poles import PoleRecord, enumerate_poles, fibre_brute_force, fibre_size, kappa_bound, pole_location
from .zeta import dirichlet_sum, multinomial_coefficient, phi_eval, phi_term

__version__ = "0.1.0"
