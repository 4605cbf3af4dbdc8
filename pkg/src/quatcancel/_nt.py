"""Small integer helpers shared by the other modules."""

from functools import lru_cache
from math import gcd


@lru_cache(maxsize=None)
def factorize(n):
    """Return the prime factorisation of ``n >= 1`` as a tuple of (p, k) pairs."""
    if n < 1:
        raise ValueError(f"cannot factor {n}")
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            k = 0
            while n % p == 0:
                n //= p
                k += 1
            out.append((p, k))
        p += 1 if p == 2 else 2
    if n > 1:
        out.append((n, 1))
    return tuple(out)


def prime_factors(n):
    return [p for p, _ in factorize(n)]


def is_prime(n):
    return n >= 2 and factorize(n) == ((n, 1),)


def euler_phi(n):
    result = n
    for p, _ in factorize(n):
        result = result // p * (p - 1)
    return result


def divisors(n):
    divs = [1]
    for p, k in factorize(n):
        divs = [d * p**i for d in divs for i in range(k + 1)]
    return sorted(divs)


def nu2(n):
    """2-adic valuation of a nonzero integer."""
    n = abs(n)
    if n == 0:
        raise ValueError("2-adic valuation of 0")
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    return v


def prime_power_base(n):
    """Return p if ``n`` is a positive power of the prime p, else None."""
    f = factorize(n) if n > 1 else ()
    if len(f) == 1:
        return f[0][0]
    return None


def multiplicative_order(a, n):
    if gcd(a, n) != 1:
        raise ValueError(f"{a} is not a unit mod {n}")
    if n == 1:
        return 1
    k, x = 1, a % n
    while x != 1:
        x = x * a % n
        k += 1
    return k


def crt(residues, moduli):
    """Chinese remaindering for pairwise coprime moduli."""
    x, m = 0, 1
    for r, n in zip(residues, moduli):
        # x + m*t = r mod n
        t = ((r - x) * pow(m, -1, n)) % n if n > 1 else 0
        x += m * t
        m *= n
    return x % m
