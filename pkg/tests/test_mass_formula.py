import math
from fractions import Fraction

import mpmath
import pytest
import sympy
from hypothesis import given, strategies as st

from quatcancel import FixtureRequiredError, ValidationError
from quatcancel.cyclotomic_arithmetic import RealCyclotomicField, disc_real_cyclotomic, zeta_minus_one
from quatcancel.mass_formula import (
    BoundValue,
    QuaternionAlgebraSpec,
    ambiguous_class_number,
    class_set_lower_bound,
    eichler_constant,
    log_class_set_bound_estimate,
    mass_class_set,
    numerator_power_of_two_test,
    sfc_degree_obstruction,
)

PUBLISHED_EI = {
    16: Fraction(5, 48),
    22: Fraction(5, 132),
    26: Fraction(19, 156),
    28: Fraction(13, 21),
    36: Fraction(31, 36),
    42: Fraction(1, 6),
}


@pytest.mark.parametrize("m, ei", sorted(PUBLISHED_EI.items()))
def test_published_eichler_constants(m, ei):
    assert eichler_constant(m) == ei


@pytest.mark.parametrize("m", range(3, 46))
def test_eichler_constant_identity(m):
    d = RealCyclotomicField(m).degree
    ei = eichler_constant(m)
    assert ei > 0
    assert ei * 2 ** (d - 1) == (-1) ** d * zeta_minus_one(m)


def test_known_small_values():
    # ei of Q is -zeta(-1) = 1/12; of Q(sqrt 5) it is zeta(-1)/2 = 1/60
    assert eichler_constant(3) == Fraction(1, 12)
    assert eichler_constant(5) == Fraction(1, 60)


def test_mass_with_no_ramification_equals_ei():
    alg = QuaternionAlgebraSpec(16, ())
    mass = mass_class_set(alg, 1)
    assert mass.value == Fraction(5, 48)
    assert mass.ramification_factor == 1


def test_mass_ramification_factor():
    mass = mass_class_set(QuaternionAlgebraSpec(16, (2, 9)), 3)
    assert mass.value == Fraction(5, 48) * 3 * 1 * 8
    assert mass.as_dict()["class_number_factor"] == 3


def test_unknown_ramification_requires_fixture_data():
    with pytest.raises(FixtureRequiredError):
        mass_class_set(QuaternionAlgebraSpec(16), 1)
    assert QuaternionAlgebraSpec.from_fixture(16).ramified_norms is None


def test_algebra_spec_validation():
    with pytest.raises(ValidationError):
        QuaternionAlgebraSpec(2)
    with pytest.raises(ValidationError):
        QuaternionAlgebraSpec(16, (6,))
    with pytest.raises(ValidationError):
        mass_class_set(QuaternionAlgebraSpec(16, ()), 0)


def test_fixture_missing_field():
    with pytest.raises(FixtureRequiredError):
        QuaternionAlgebraSpec.from_fixture(97)


@pytest.mark.parametrize("m, expected", [(16, False), (28, False), (42, True), (12, True), (22, False)])
def test_numerator_test(m, expected):
    assert numerator_power_of_two_test(m) is expected


@pytest.mark.parametrize("m", range(3, 60))
def test_degree_obstruction(m):
    assert sfc_degree_obstruction(m) == (sympy.totient(m) // 2 <= 6 or m <= 2)


# ---------------------------------------------------------------------------
# class set bound

def _bound_reference(m):
    with mpmath.workdps(60):
        phi = int(sympy.totient(m))
        D = mpmath.mpf(disc_real_cyclotomic(m))
        value = 2 * D ** mpmath.mpf(1.5) / (2 ** phi * (2 * mpmath.pi) ** phi)
        return value, mpmath.log(value)


@pytest.mark.parametrize("n", [3, 5, 7, 10, 14, 30, 45, 60, 100])
def test_class_set_bound_enclosure(n):
    b = class_set_lower_bound(2 * n)
    ref, log_ref = _bound_reference(2 * n)
    assert b.lower <= ref <= b.upper
    assert b.log_lower <= log_ref <= b.log_upper
    assert (b.upper - b.lower) <= abs(ref) * mpmath.mpf(2) ** -50
    assert sympy.factorint(b.radicand) == {p: 1 for p in sympy.factorint(b.radicand)}


@pytest.mark.parametrize("n", [3, 10, 21, 50, 200, 400])
def test_float_estimate_tracks_exact_value(n):
    b = class_set_lower_bound(2 * n)
    assert abs(log_class_set_bound_estimate(2 * n) - float(b.log_lower)) < 1e-6 * max(1, abs(float(b.log_lower)))


def test_class_set_bound_requires_even_m():
    with pytest.raises(ValidationError):
        class_set_lower_bound(15)
    with pytest.raises(ValidationError):
        class_set_lower_bound(4)


def test_bound_value_helpers():
    b = class_set_lower_bound(6)
    assert b.certified_integer() == 1
    s = b.scaled(Fraction(10 ** 6))
    assert s.coefficient == b.coefficient * 10 ** 6
    assert b.certainly_less_than(s)
    assert isinstance(b.as_dict()["interval"][0], str)
    big = BoundValue(Fraction(10 ** 30), 2, 1)
    assert big.certified_integer() >= 4 * 10 ** 29


@given(st.integers(3, 150))
def test_bound_is_positive_and_ordered(n):
    b = class_set_lower_bound(2 * n)
    assert 0 < b.lower <= b.upper


# ---------------------------------------------------------------------------

@pytest.mark.parametrize("p", [int(p) for p in sympy.primerange(3, 101)])
def test_ambiguous_class_number_is_one(p):
    assert ambiguous_class_number(p) == 1


@pytest.mark.parametrize("p", [2, 9, 1, 15])
def test_ambiguous_class_number_rejects(p):
    with pytest.raises(ValidationError):
        ambiguous_class_number(p)


def test_log_estimate_large_m_is_finite():
    assert math.isfinite(log_class_set_bound_estimate(2 * 997))
