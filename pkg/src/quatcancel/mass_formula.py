"""Eichler mass computations for quaternion algebras over real cyclotomic fields.

All values are exact.  The one place a transcendental number enters is the
lower bound for class sets, which carries a power of pi; it is returned as an
exact symbolic triple together with a certified interval.
"""

import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath
from mpmath import iv

from ._data import load_fixture
from ._nt import euler_phi, factorize, is_prime
from .cyclotomic_arithmetic import (
    RealCyclotomicField,
    _as_field,
    disc_real_cyclotomic,
    zeta_minus_one,
)
from .errors import FixtureRequiredError, InternalError, ValidationError

INTERVAL_BITS = 64
_iv_lock = threading.Lock()


def eichler_constant(field):
    """ei_K = (-1)^d zeta_K(-1) / 2^(d-1) for K = Q(zeta_m)^+ of degree d."""
    return _eichler_constant(_as_field(field).m)


@lru_cache(maxsize=None)
def _eichler_constant(m):
    K = RealCyclotomicField(m)
    d = K.degree
    ei = (-1) ** d * zeta_minus_one(K) / Fraction(2) ** (d - 1)
    if ei <= 0:
        raise InternalError(f"Eichler constant for m={K.m} is not positive: {ei}")
    return ei


# ---------------------------------------------------------------------------
# mass formula

@dataclass(frozen=True)
class QuaternionAlgebraSpec:
    """The algebra Q[zeta_m, j] with centre K = Q(zeta_m)^+.

    ``ramified_norms`` lists N(p) for the finite primes p of K where the
    algebra ramifies; ``None`` means the data is not known.
    """

    m: int
    ramified_norms: tuple = None

    def __post_init__(self):
        if self.m < 3:
            raise ValidationError(f"Q[zeta_m, j] is totally definite only for m >= 3, got m={self.m}")
        if self.ramified_norms is not None:
            norms = tuple(int(q) for q in self.ramified_norms)
            for q in norms:
                if q < 2 or len(factorize(q)) != 1:
                    raise ValidationError(f"residue norm {q} is not a prime power")
            object.__setattr__(self, "ramified_norms", norms)

    @property
    def field(self):
        return RealCyclotomicField(self.m)

    @classmethod
    def from_fixture(cls, m):
        rec = field_record(m)
        norms = rec.get("ramified_norms")
        return cls(m, None if norms is None else tuple(norms))


@dataclass(frozen=True)
class MassValue:
    value: Fraction
    eichler_constant: Fraction
    class_number_factor: int
    ramification_factor: int

    def __post_init__(self):
        prod = self.eichler_constant * self.class_number_factor * self.ramification_factor
        if prod != self.value or self.value <= 0:
            raise InternalError("mass decomposition does not multiply back to its value")

    def as_dict(self):
        return {
            "value": self.value,
            "eichler_constant": self.eichler_constant,
            "class_number_factor": self.class_number_factor,
            "ramification_factor": self.ramification_factor,
        }


def field_record(m):
    table = load_fixture("fields.json")["fields"]
    rec = table.get(str(m))
    if rec is None:
        raise FixtureRequiredError(f"fields.json has no record for m={m}")
    return rec


def mass_class_set(alg, h_K):
    """Mass of the class set of a maximal order: ei_K * h_K * prod (N(p) - 1)."""
    if alg.ramified_norms is None:
        raise FixtureRequiredError(
            f"ramified primes of Q[zeta_{alg.m}, j] are not known; supply ramified_norms"
        )
    if int(h_K) != h_K or h_K < 1:
        raise ValidationError(f"class number must be a positive integer, got {h_K}")
    ei = eichler_constant(alg.field)
    ram = math.prod(q - 1 for q in alg.ramified_norms)
    return MassValue(ei * h_K * ram, ei, int(h_K), ram)


# ---------------------------------------------------------------------------
# obstructions to stably free cancellation

def sfc_degree_obstruction(field):
    """True when [K:Q] <= 6, i.e. the degree bound does not rule out SFC."""
    return _as_field(field).degree <= 6


def numerator_power_of_two_test(field):
    """True when the numerator of ei_K is a power of 2.

    A False answer rules out stably free cancellation for maximal orders in
    totally definite quaternion algebras over K.
    """
    num = eichler_constant(field).numerator
    return num & (num - 1) == 0


# ---------------------------------------------------------------------------
# lower bound for class sets

def _interval(fn):
    with _iv_lock:
        saved = iv.prec
        iv.prec = INTERVAL_BITS
        try:
            return fn()
        finally:
            iv.prec = saved


def _split_square(n, primes):
    """Write n = s^2 * q with q squarefree, given every prime factor of n."""
    s = q = 1
    for p in primes:
        k = 0
        while n % p == 0:
            n //= p
            k += 1
        s *= p ** (k // 2)
        q *= p ** (k % 2)
    if n != 1:
        raise InternalError("incomplete factorisation in _split_square")
    return s, q


@dataclass(frozen=True)
class BoundValue:
    """coefficient * sqrt(radicand) / pi^pi_power, plus a certified enclosure.

    ``lower``/``upper`` bound the value and ``log_lower``/``log_upper`` its
    natural logarithm; they are mpmath floats rounded outward.
    """

    coefficient: Fraction
    radicand: int
    pi_power: int
    lower: object = None
    upper: object = None
    log_lower: object = None
    log_upper: object = None

    def __post_init__(self):
        if self.lower is None:
            c, r, k = self.coefficient, self.radicand, self.pi_power

            def ev():
                v = iv.mpf(c.numerator) / iv.mpf(c.denominator) * iv.sqrt(iv.mpf(r)) / iv.pi**k
                lg = iv.log(v)
                return v._mpi_ + lg._mpi_

            # keep the raw endpoints: converting through mpf() would round to nearest
            ends = _interval(ev)
            for name, raw in zip(("lower", "upper", "log_lower", "log_upper"), ends):
                object.__setattr__(self, name, mpmath.mp.make_mpf(raw))

    def scaled(self, factor):
        return BoundValue(self.coefficient * Fraction(factor), self.radicand, self.pi_power)

    def certified_integer(self):
        """Smallest integer the true value is certainly at least (never below 1)."""
        return max(1, int(mpmath.ceil(self.lower)))

    def certainly_less_than(self, other):
        other_lo = other.lower if isinstance(other, BoundValue) else mpmath.mpf(other)
        return self.upper < other_lo

    def approx(self):
        return float(mpmath.sqrt(self.lower * self.upper)) if self.lower > 0 else 0.0

    def as_dict(self):
        return {
            "coefficient": self.coefficient,
            "radicand": self.radicand,
            "pi_power": self.pi_power,
            "interval": [mpmath.nstr(self.lower, 20), mpmath.nstr(self.upper, 20)],
            "log_interval": [mpmath.nstr(self.log_lower, 20), mpmath.nstr(self.log_upper, 20)],
            "certified_integer": self.certified_integer(),
        }


def class_set_lower_bound(m):
    """Lower bound 2|D_K|^(3/2) / (2^t (2 pi)^phi(m)) with t = phi(m).

    K = Q(zeta_m)^+ and m = 2n is even with n >= 3.  The exponent t is the
    2-valuation of a unit index that is not computed here; phi(m) is its
    largest possible value, so the result is a valid lower bound.
    """
    if m % 2 or m < 6:
        raise ValidationError(f"class set bound needs an even m >= 6, got {m}")
    phi = euler_phi(m)
    D = disc_real_cyclotomic(m)
    s, q = _split_square(D, [p for p, _ in factorize(m)])
    # 2 D^(3/2) / (4^phi pi^phi) = 2 D s sqrt(q) / (4^phi pi^phi)
    return BoundValue(Fraction(2 * D * s, 4**phi), q, phi)


def log_class_set_bound_estimate(m):
    """Floating point log of class_set_lower_bound(m), without big integers."""
    phi = euler_phi(m)
    primes = [p for p, _ in factorize(m)]
    log_full = phi * (math.log(m) - sum(math.log(p) / (p - 1) for p in primes))
    k = m if m % 2 else m // 2
    kp = factorize(k)
    log_rel = math.log(kp[0][0]) * (phi // euler_phi(k)) if len(kp) == 1 else 0.0
    log_d = (log_full - log_rel) / 2
    return math.log(2) + 1.5 * log_d - phi * math.log(4 * math.pi)


# ---------------------------------------------------------------------------
# ambiguous classes

def ambiguous_class_number(p):
    """|C(Z[zeta_p])^G| for G = Gal(Q(zeta_p)/Q) from the ambiguous class formula.

    The product of ramification indices over all places is 2(p-1) (p is
    totally ramified, the real place ramifies), the degree is p-1, and -1 is
    not a norm from the totally complex field, so the unit norm index is 2.
    """
    if p == 2 or not is_prime(p):
        raise ValidationError(f"ambiguous class number needs an odd prime, got {p}")
    ram = (p - 1) * 2
    degree = p - 1
    unit_index = 2
    value = Fraction(ram, degree * unit_index)
    if value.denominator != 1:
        raise InternalError(f"non-integral ambiguous class number for p={p}")
    return int(value)
