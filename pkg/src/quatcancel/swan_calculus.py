"""Swan modules, fork-shaped stable classes and cancellation predicates.

A Swan module (I, r) over Z G with |G| = N depends only on r mod N, so it is
modelled by the residue alone.  A stable class of projective modules is a
fork: finitely many vertices at the minimal rank and a single vertex at every
rank above it.  Cancellation means the minimal level has one vertex.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

from ._nt import euler_phi
from .errors import ValidationError
from .mass_formula import class_set_lower_bound, log_class_set_bound_estimate
from .periodic_groups import min_quaternion_quotient_index, m_H


@dataclass(frozen=True)
class SwanClass:
    N: int
    r: int

    def __post_init__(self):
        if self.N < 1:
            raise ValidationError(f"group order must be positive, got {self.N}")
        object.__setattr__(self, "r", self.r % self.N)
        if gcd(self.r, self.N) != 1:
            raise ValidationError(f"r = {self.r} is not a unit mod N = {self.N}")

    @property
    def is_free(self):
        return self.r == 1 % self.N

    def __mul__(self, other):
        return swan_product(self, other)


def swan_product(a, b):
    """(I, r) (x) (I, s) = (I, rs)."""
    if a.N != b.N:
        raise ValidationError(f"Swan modules over groups of orders {a.N} and {b.N}")
    return SwanClass(a.N, a.r * b.r)


def induce_swan(a, M):
    """Image of (I, r) under a quotient G -> H with |H| = M."""
    if M < 1 or a.N % M:
        raise ValidationError(f"{M} does not divide {a.N}")
    return SwanClass(M, a.r)


def swan_group(N):
    return [SwanClass(N, r) for r in range(N) if gcd(r, N) == 1] if N > 1 else [SwanClass(1, 0)]


def swan_trivializes_under(psi_augmentation, r):
    """True when (I, r) becomes free over Z G/(psi), i.e. gcd(eps(psi), r) = 1."""
    return gcd(psi_augmentation, r) == 1


# Facts about Swan subgroups T_G, recorded rather than computed.
SWAN_SUBGROUP_FACTS = {
    "Q12": {"statement": "T_{Q_12} = 0", "source": "cited from Swan's computation for Q_12"},
    "Q8": {"statement": "C(Z Q_8) = T_{Q_8}", "source": "cited from Swan's computation for Q_8"},
}


def swan_subgroup_fact(group):
    key = group.upper().replace("_", "")
    if key not in SWAN_SUBGROUP_FACTS:
        raise ValidationError(f"no recorded Swan subgroup fact for {group!r}")
    return SWAN_SUBGROUP_FACTS[key]


def cancellation_predicate_swan_class(spec):
    """Cancellation for the stable class of the finiteness obstruction: m_H(G) <= 2.

    Returns ``(holds, m_H, reason)``.
    """
    mh = m_H(spec)
    if mh == 0:
        return True, mh, "m_H = 0: Eichler condition, Z G has projective cancellation"
    if mh <= 2:
        return True, mh, f"m_H = {mh} <= 2"
    return False, mh, f"m_H = {mh} >= 3"


# ---------------------------------------------------------------------------
# forks

@dataclass(frozen=True)
class GradedStableClass:
    """A fork.  ``action`` is a list of permutations of ``minimal``, each a dict or tuple."""

    minimal: tuple
    action: tuple = ()
    grade: int = 0
    labels: dict = field(default=None, compare=False, hash=False)

    def __post_init__(self):
        if not self.minimal:
            raise ValidationError("a fork needs at least one minimal vertex")
        if len(set(self.minimal)) != len(self.minimal):
            raise ValidationError("minimal vertices must be distinct")
        verts = set(self.minimal)
        perms = []
        for g in self.action:
            g = dict(g) if isinstance(g, dict) else dict(zip(self.minimal, g))
            if set(g) != verts or set(g.values()) != verts:
                raise ValidationError("an action element must permute the minimal vertices")
            perms.append(g)
        object.__setattr__(self, "action", tuple(tuple(sorted(g.items(), key=repr)) for g in perms))

    def orbits(self):
        perms = [dict(g) for g in self.action]
        seen, out = set(), []
        for v in self.minimal:
            if v in seen:
                continue
            orb, stack = {v}, [v]
            while stack:
                u = stack.pop()
                for g in perms:
                    w = g[u]
                    if w not in orb:
                        orb.add(w)
                        stack.append(w)
            seen |= orb
            out.append(sorted(orb, key=self.minimal.index))
        return out


def fork_cancellation(cls):
    return len(cls.minimal) == 1


def fork_cancellation_mod_action(cls):
    return len(cls.orbits()) == 1


def forks_from_pipeline(report):
    """Trivial and nontrivial forks of Z Q_28 from the Milnor pipeline report."""
    split = report["square_class_split"]
    orbit_of = {v: tuple(o) for o in report["orbits"] for v in o}
    forks = {}
    for name in ("trivial", "nontrivial"):
        verts = tuple(split[name])
        perm = {}
        for v in verts:
            o = orbit_of[v]
            perm[v] = o[(o.index(v) + 1) % len(o)]
        forks[name] = GradedStableClass(verts, (perm,))
    return forks


def cyclic_action_orbits(order, generator_action, n_classes):
    """Orbits on Z/n_classes of a cyclic group acting through ``generator_action``."""
    verts = tuple(range(n_classes))
    g = {v: generator_action(v) % n_classes for v in verts}
    return GradedStableClass(verts, (g,)).orbits()


# ---------------------------------------------------------------------------
# lower bounds for N(G, n)

def _harmonic_prime_sum(k):
    """Sum of log p/(p-1) over the first k primes; bounds the same sum for any k primes."""
    total, count, p = 0.0, 0, 2
    while count < k:
        if all(p % q for q in range(2, math.isqrt(p) + 1)):
            total += math.log(p) / (p - 1)
            count += 1
        p += 1
    return total


def _max_distinct_primes(limit):
    """Largest w such that the product of the first w primes is below ``limit``."""
    w, prod, p = 0, 1, 2
    while True:
        if all(p % q for q in range(2, math.isqrt(p) + 1)):
            if prod * p >= limit:
                return w
            prod *= p
            w += 1
        p += 1


TAIL_BLOCKS = 256


def _log_n_tail_floor(M):
    """A lower bound for log(B(m) / (m phi(m))) over all even m >= M.

    B(m) is the class set bound.  For m in [2^k, 2^(k+1)),
        log B(m) >= phi(m) (3/4 (log m - S) - log 4 pi) - 3/2 log m + log 2,
    where S = sum over p | m of log p/(p-1) is at most the same sum over the first w
    primes, w being the most distinct primes an integer below 2^(k+1) can have, and
    phi(m) >= sqrt(m/2).  Blocks past TAIL_BLOCKS only grow, so they are skipped.
    Returns -inf when the estimate is not yet positive.
    """
    k0 = max(M.bit_length() - 1, 1)
    floor = math.inf
    for k in range(k0, TAIL_BLOCKS):
        s_max = _harmonic_prime_sum(_max_distinct_primes(2 ** (k + 1)))
        c = 0.75 * (k * math.log(2) - s_max) - math.log(4 * math.pi)
        if c <= 0:
            return -math.inf
        lo = math.sqrt(2 ** (k - 1)) * c - 3.5 * (k + 1) * math.log(2) + math.log(2)
        floor = min(floor, lo)
    return floor


def _log_n_estimate(n):
    m = 2 * n
    return log_class_set_bound_estimate(m) - math.log(m * euler_phi(m))


@dataclass(frozen=True)
class NLowerBound:
    m_H: int
    n0: int
    argmin_n: int
    scan_limit: int
    value: object            # BoundValue at the minimising n
    at_n0: object            # BoundValue of the same expression at n = n0

    def certified_integer(self):
        return self.value.certified_integer()

    def as_dict(self):
        return {
            "m_H": self.m_H,
            "n0": self.n0,
            "argmin_n": self.argmin_n,
            "scan_limit": self.scan_limit,
            "bound": self.value.as_dict(),
            "value_at_n0": self.at_n0.as_dict(),
            "certified_integer": self.certified_integer(),
        }


def _n_bound_value(n):
    m = 2 * n
    return class_set_lower_bound(m).scaled(Fraction(1, m * euler_phi(m)))


def N_lower_bound(mh):
    """Certified lower bound for N(G, n) for groups with m_H(G) = mh >= 3.

    G has a quotient Q_4n for some n >= n0 = max(ceil(2 mh/3), 6), and then
    N(G, n) >= B(2n) / (2n phi(2n)) with B the class set bound.  Since n is
    only known to be at least n0, the minimum over n >= n0 is taken: an
    exact scan up to a limit, past which an analytic floor certifies that
    nothing smaller occurs.
    """
    if mh < 3:
        raise ValidationError(f"the bound needs m_H >= 3, got {mh}")
    n0 = min_quaternion_quotient_index(mh)
    best = math.inf
    estimates = {}
    hi = max(2 * n0, 64)
    n = n0
    while True:
        while n <= hi:
            estimates[n] = _log_n_estimate(n)
            best = min(best, estimates[n])
            n += 1
        if _log_n_tail_floor(2 * (hi + 1)) > best + 1.0:
            break
        hi *= 2
    # exact evaluation for every n whose float estimate is within a safety margin
    candidates = [k for k, v in estimates.items() if v <= best + 1e-6 * max(1.0, abs(best)) + 1e-6]
    values = {k: _n_bound_value(k) for k in candidates}
    argmin = min(values, key=lambda k: values[k].lower)
    return NLowerBound(mh, n0, argmin, hi, values[argmin], _n_bound_value(n0))
