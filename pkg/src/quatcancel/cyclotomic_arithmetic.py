"""Exact arithmetic in cyclotomic fields and special values of zeta functions.

Rationals are :class:`fractions.Fraction`.  Polynomials are dense lists of
coefficients, lowest degree first.  An element of Q(zeta_e) is stored as its
coefficient vector reduced modulo Phi_e, so equality of vectors is equality of
field elements.

The value zeta_K(-1) for K = Q(zeta_m)^+ is obtained from the factorisation
of the Dedekind zeta function into Dirichlet L-functions of the even
characters mod m, with L(-1, chi) = -B_{2,chi}/2.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import gcd, isqrt

from ._nt import divisors, euler_phi, factorize
from .errors import InternalError, ValidationError

ExactRational = Fraction


# ---------------------------------------------------------------------------
# integer polynomials

def poly_trim(p):
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


def poly_mul(a, b):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return poly_trim(out)


def poly_divmod(a, b):
    """Divide ``a`` by ``b`` over Q; exact integers are kept when ``b`` is monic."""
    b = poly_trim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    a = list(a)
    lead = b[-1]
    db = len(b) - 1
    q = [0] * max(len(a) - db, 0)
    for i in range(len(a) - 1, db - 1, -1):
        c = a[i]
        if c:
            c = c // lead if lead in (1, -1) else Fraction(c, lead)
            q[i - db] = c
            for j, y in enumerate(b):
                a[i - db + j] -= c * y
    return poly_trim(q), poly_trim(a[:db])


@lru_cache(maxsize=None)
def _cyclotomic(n):
    num = [-1] + [0] * (n - 1) + [1]
    for d in divisors(n):
        if d < n:
            num, rem = poly_divmod(num, _cyclotomic(d))
            if rem:
                raise InternalError(f"Phi_{d} does not divide x^{n}-1")
    return tuple(num)


def cyclotomic_poly(n):
    """Return the n-th cyclotomic polynomial as a coefficient list (low to high).

    Computed by dividing x^n - 1 by Phi_d for every proper divisor d of n.
    """
    if n < 1:
        raise ValidationError(f"cyclotomic polynomial needs n >= 1, got {n}")
    return list(_cyclotomic(n))


def poly_eval(p, x):
    acc = 0
    for c in reversed(p):
        acc = acc * x + c
    return acc


# ---------------------------------------------------------------------------
# Q(zeta_e)

def _reduce(vec, e):
    """Reduce a coefficient vector (any length) modulo Phi_e."""
    phi = _cyclotomic(e)
    d = len(phi) - 1
    vec = list(vec)
    for i in range(len(vec) - 1, d - 1, -1):
        c = vec[i]
        if c:
            for j in range(d + 1):
                vec[i - d + j] -= c * phi[j]
    vec = vec[:d] + [0] * (d - len(vec))
    return tuple(Fraction(c) for c in vec)


@dataclass(frozen=True)
class CyclotomicNumber:
    """An element sum(c_i zeta_e^i) of Q(zeta_e), reduced mod Phi_e."""

    conductor: int
    coefficients: tuple

    @classmethod
    def from_powers(cls, e, terms):
        """Build sum(c * zeta_e^k) from a mapping or iterable of (k, c) pairs."""
        items = terms.items() if isinstance(terms, dict) else terms
        vec = [Fraction(0)] * e
        for k, c in items:
            vec[k % e] += c
        return cls(e, _reduce(vec, e))

    @classmethod
    def rational(cls, q, e=1):
        return cls.from_powers(e, [(0, Fraction(q))])

    @classmethod
    def zeta(cls, e, k=1):
        return cls.from_powers(e, [(k, 1)])

    def lift(self, e):
        """Re-express in Q(zeta_e) for a multiple e of the conductor."""
        if e % self.conductor:
            raise ValidationError(f"{e} is not a multiple of {self.conductor}")
        s = e // self.conductor
        return CyclotomicNumber.from_powers(
            e, [(i * s, c) for i, c in enumerate(self.coefficients)])

    def _common(self, other):
        if not isinstance(other, CyclotomicNumber):
            other = CyclotomicNumber.rational(other, self.conductor)
        if other.conductor == self.conductor:
            return self, other
        e = self.conductor * other.conductor // gcd(self.conductor, other.conductor)
        return self.lift(e), other.lift(e)

    def __add__(self, other):
        a, b = self._common(other)
        return CyclotomicNumber(a.conductor, tuple(x + y for x, y in zip(a.coefficients, b.coefficients)))

    __radd__ = __add__

    def __neg__(self):
        return CyclotomicNumber(self.conductor, tuple(-c for c in self.coefficients))

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        a, b = self._common(other)
        return CyclotomicNumber(a.conductor, _reduce(poly_mul(a.coefficients, b.coefficients), a.conductor))

    __rmul__ = __mul__

    def __pow__(self, k):
        if k < 0:
            return self.inverse() ** (-k)
        result = CyclotomicNumber.rational(1, self.conductor)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def is_zero(self):
        return not any(self.coefficients)

    def inverse(self):
        """Multiplicative inverse via the extended Euclidean algorithm over Q[x]."""
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in Q(zeta)")
        r0, r1 = [Fraction(c) for c in _cyclotomic(self.conductor)], poly_trim(self.coefficients)
        s0, s1 = [], [Fraction(1)]
        while r1:
            q, r = poly_divmod(r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, poly_trim(_poly_sub(s0, poly_mul(q, s1)))
        # r0 is a nonzero constant since Phi_e is irreducible
        if len(r0) != 1:
            raise InternalError("gcd with cyclotomic polynomial is not constant")
        inv = [c / r0[0] for c in s0]
        return CyclotomicNumber(self.conductor, _reduce(inv, self.conductor))

    def __truediv__(self, other):
        a, b = self._common(other)
        return a * b.inverse()

    def is_rational(self):
        return not any(self.coefficients[1:])

    def to_rational(self):
        if not self.is_rational():
            raise InternalError(f"{self} is not rational")
        return self.coefficients[0]

    def __eq__(self, other):
        if not isinstance(other, CyclotomicNumber):
            if isinstance(other, (int, Fraction)):
                return self.is_rational() and self.coefficients[0] == other
            return NotImplemented
        a, b = self._common(other)
        return a.coefficients == b.coefficients

    def __hash__(self):
        return hash((self.conductor, self.coefficients))

    def __repr__(self):
        terms = [f"{c}*z^{i}" for i, c in enumerate(self.coefficients) if c]
        return f"CyclotomicNumber(e={self.conductor}: {' + '.join(terms) or '0'})"


def _poly_sub(a, b):
    n = max(len(a), len(b))
    a = list(a) + [0] * (n - len(a))
    b = list(b) + [0] * (n - len(b))
    return [x - y for x, y in zip(a, b)]


# ---------------------------------------------------------------------------
# Dirichlet characters

def _primitive_root(pk, p):
    phi = euler_phi(pk)
    qs = [q for q, _ in factorize(phi)]
    for g in range(2, pk):
        if g % p and all(pow(g, phi // q, pk) != 1 for q in qs):
            return g
    raise InternalError(f"no primitive root mod {pk}")


@lru_cache(maxsize=None)
def unit_group_structure(m):
    """Generators, their orders, and a discrete-log table for (Z/m)^x.

    Returns ``(gens, orders, logs)`` with ``logs[a]`` the exponent vector of a
    unit ``a`` with respect to ``gens``.  Local generators at each prime power
    are found by brute force and lifted by CRT.
    """
    local = []  # (modulus, [(generator mod pk, order)])
    for p, k in factorize(m) if m > 1 else ():
        pk = p**k
        if p == 2:
            if k == 1:
                gens = []
            elif k == 2:
                gens = [(pk - 1, 2)]
            else:
                gens = [(pk - 1, 2), (5, 2 ** (k - 2))]
        else:
            gens = [(_primitive_root(pk, p), euler_phi(pk))]
        local.append((pk, gens))

    def lift(pk, g):
        # g mod pk, 1 mod m/pk
        rest = m // pk
        if rest == 1:
            return g % m
        t = ((g - 1) * pow(rest, -1, pk)) % pk
        return (1 + rest * t) % m

    gens, orders = [], []
    for pk, lg in local:
        for g, o in lg:
            gens.append(lift(pk, g))
            orders.append(o)

    logs = {}
    for exps in product(*[range(o) for o in orders]):
        a = 1
        for g, e in zip(gens, exps):
            a = a * pow(g, e, m) % m
        logs[a % m if m > 1 else 0] = exps
    if len(logs) != euler_phi(m):
        raise InternalError(f"discrete-log table for (Z/{m})^x is incomplete")
    return tuple(gens), tuple(orders), logs


@dataclass(frozen=True)
class DirichletCharacter:
    """A Dirichlet character mod ``modulus`` with values in the ``order``-th roots of unity.

    ``values[a]`` is k with chi(a) = exp(2 pi i k / order), or None when
    gcd(a, modulus) > 1.
    """

    modulus: int
    order: int
    values: tuple = field(repr=False)

    def __call__(self, a):
        k = self.values[a % self.modulus]
        if k is None:
            return CyclotomicNumber.rational(0, self.order)
        return CyclotomicNumber.zeta(self.order, k)

    @property
    def is_even(self):
        return self.values[(-1) % self.modulus] == 0

    @property
    def is_trivial(self):
        return self.order == 1

    def conductor(self):
        m = self.modulus
        for f in divisors(m):
            if all(self.values[a] == 0 for a in range(1, m) if gcd(a, m) == 1 and a % f == 1 % f):
                return f
        return m

    def primitive(self):
        """The primitive character inducing this one."""
        f = self.conductor()
        if f == self.modulus:
            return self
        vals = [None] * f
        for b in range(f):
            if gcd(b, f) != 1:
                continue
            a = b
            while gcd(a, self.modulus) != 1:
                a += f
            vals[b] = self.values[a % self.modulus]
        if f == 1:
            vals = [0]
        return DirichletCharacter(f, self.order, tuple(vals))._normalised()

    def _normalised(self):
        ks = [k for k in self.values if k is not None]
        g = self.order
        for k in ks:
            g = gcd(g, k)
        if g <= 1:
            return self
        return DirichletCharacter(self.modulus, self.order // g,
                                  tuple(None if k is None else k // g for k in self.values))


def dirichlet_characters(m):
    """All Dirichlet characters mod ``m``."""
    gens, orders, logs = unit_group_structure(m)
    exponent = 1
    for o in orders:
        exponent = exponent * o // gcd(exponent, o)
    chars = []
    for cs in product(*[range(o) for o in orders]):
        vals = [None] * m if m > 1 else [0]
        for a, exps in logs.items():
            vals[a] = sum(c * e * (exponent // o) for c, e, o in zip(cs, exps, orders)) % exponent
        chars.append(DirichletCharacter(m, exponent, tuple(vals))._normalised())
    return chars


def characters_of_real_subfield(m):
    """Primitive characters attached to K = Q(zeta_m + zeta_m^-1): the even characters mod m."""
    if m < 3:
        raise ValidationError(f"real cyclotomic field needs m >= 3, got {m}")
    return [chi.primitive() for chi in dirichlet_characters(m) if chi.is_even]


def bernoulli_B2_chi(chi):
    """Generalised Bernoulli number B_{2,chi} = f * sum_{a=1}^{f} chi(a) B_2(a/f)."""
    if not chi.is_even:
        raise ValidationError("B_{2,chi} is only used for even characters here")
    if chi.conductor() != chi.modulus:
        raise ValidationError("character must be primitive")
    f = chi.modulus
    terms = {}
    for a in range(1, f + 1):
        k = chi.values[a % f]
        if k is None:
            continue
        x = Fraction(a, f)
        terms[k] = terms.get(k, 0) + x * x - x + Fraction(1, 6)
    return CyclotomicNumber.from_powers(chi.order, {k: f * v for k, v in terms.items()})


# ---------------------------------------------------------------------------
# real cyclotomic fields

@dataclass(frozen=True)
class RealCyclotomicField:
    """K = Q(zeta_m + zeta_m^-1)."""

    m: int

    def __post_init__(self):
        if self.m < 1:
            raise ValidationError(f"m must be positive, got {self.m}")

    @property
    def degree(self):
        return 1 if self.m <= 2 else euler_phi(self.m) // 2


def _as_field(field_or_m):
    if isinstance(field_or_m, RealCyclotomicField):
        return field_or_m
    return RealCyclotomicField(int(field_or_m))


def cyclotomic_field_discriminant(m):
    """|disc Q(zeta_m)| = m^phi / prod_{p | m} p^(phi/(p-1))."""
    phi = euler_phi(m)
    num = m**phi
    for p, _ in factorize(m) if m > 1 else ():
        num //= p ** (phi // (p - 1))
    return num


def disc_real_cyclotomic(field):
    """|disc K| for K = Q(zeta_m)^+, m >= 3.

    Uses disc Q(zeta_m) = N_{K/Q}(disc of Q(zeta_m)/K) * disc(K)^2, where the
    relative discriminant is generated by (zeta - zeta^-1)^2, whose norm has
    absolute value |N_{Q(zeta_m)/Q}(1 - zeta_m^2)|.
    """
    K = _as_field(field)
    m = K.m
    if m < 3:
        raise ValidationError(f"disc of real cyclotomic field needs m >= 3, got {m}")
    full = cyclotomic_field_discriminant(m)
    # zeta_m^2 has order k; the norm of 1 - zeta_k from Q(zeta_m) is Phi_k(1)^[Q(zeta_m):Q(zeta_k)]
    k = m if m % 2 else m // 2
    rel = poly_eval(cyclotomic_poly(k), 1) ** (euler_phi(m) // euler_phi(k))
    sq, r = divmod(full, rel)
    root = isqrt(sq)
    if r or root * root != sq:
        raise InternalError(f"non-integral discriminant for Q(zeta_{m})^+")
    return root


def zeta_minus_one(field):
    """Exact zeta_K(-1) for K = Q(zeta_m)^+ as a product of L(-1, chi) = -B_{2,chi}/2."""
    K = _as_field(field)
    if K.m < 3:
        raise ValidationError(f"zeta_K(-1) is computed for m >= 3, got {K.m}")
    chars = characters_of_real_subfield(K.m)
    if len(chars) != K.degree:
        raise InternalError(f"expected {K.degree} even characters mod {K.m}, found {len(chars)}")
    total = CyclotomicNumber.rational(1)
    for chi in chars:
        total = total * (bernoulli_B2_chi(chi) * Fraction(-1, 2))
    if not total.is_rational():
        raise InternalError(f"zeta_K(-1) for m={K.m} did not reduce to a rational")
    return total.to_rational()


def format_rational(q):
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"
