"""Groups with periodic cohomology described by structural parameters.

No group is ever built element by element.  Binary polyhedral quotients are
detected by congruences on the presentation parameters, and m_H(G), the
number of copies of the quaternions in the real group algebra, is read off
from the maximal binary polyhedral quotients.
"""

import re
from dataclasses import asdict, dataclass
from math import gcd

from ._nt import crt, euler_phi, factorize, is_prime, multiplicative_order
from .errors import InternalError, NotApplicableError, UnsupportedError, ValidationError

GROUP_TYPES = ("I", "IIa", "IIb", "III", "IV", "Va", "Vb", "VI")

# allowed number of maximal binary polyhedral quotients per type
BM_CARDINALITY = {
    "I": (0, 1),
    "IIa": (1, 2, 3),
    "IIb": (1,),
    "III": (1,),
    "IV": (1,),
    "Va": (1,),
    "Vb": (0,),
    "VI": (0,),
}


def _check(cond, message):
    if not cond:
        raise ValidationError(message)


# ---------------------------------------------------------------------------
# group specs

@dataclass(frozen=True)
class Cyclic:
    n: int

    def __post_init__(self):
        _check(self.n >= 1, f"cyclic group order must be positive, got {self.n}")


@dataclass(frozen=True)
class Quaternion:
    """Q_{4n}; ``order`` is 4n."""

    order: int

    def __post_init__(self):
        _check(self.order % 4 == 0 and self.order >= 8,
               f"quaternion group order must be a multiple of 4 and at least 8, got {self.order}")

    @property
    def n(self):
        return self.order // 4


@dataclass(frozen=True)
class TypeI:
    """C_m x|_(r) C_n4: the generator of C_n4 acts on C_m by u -> u^r."""

    m: int
    n4: int
    r: int

    def __post_init__(self):
        _check(self.m >= 1 and self.m % 2 == 1, f"m must be odd and positive, got {self.m}")
        _check(self.n4 >= 1, f"n must be positive, got {self.n4}")
        _check(gcd(self.m, self.n4) == 1, f"gcd(m, n) = gcd({self.m}, {self.n4}) must be 1")
        object.__setattr__(self, "r", self.r % self.m)
        _check(gcd(self.r, self.m) == 1, f"r = {self.r} is not a unit mod m = {self.m}")
        _check(pow(self.r, self.n4, self.m) == 1 % self.m,
               f"r^n = {self.r}^{self.n4} is not 1 mod m = {self.m}")


@dataclass(frozen=True)
class TypeII:
    """(C_t x|_(r) C_s) x|_(a,b) Q_{2^nExp}, where x acts on C_t by a and y by b."""

    t: int
    s: int
    r: int
    nExp: int
    a: int
    b: int

    def __post_init__(self):
        t = self.t
        _check(t >= 1 and t % 2 == 1, f"t must be odd and positive, got {t}")
        _check(self.s >= 1 and self.s % 2 == 1, f"s must be odd and positive, got {self.s}")
        _check(gcd(self.s, t) == 1, f"gcd(s, t) = gcd({self.s}, {t}) must be 1")
        _check(self.nExp >= 3, f"the 2-part Q_(2^n) needs n >= 3, got n = {self.nExp}")
        for name in ("r", "a", "b"):
            v = getattr(self, name) % t
            object.__setattr__(self, name, v)
            _check(gcd(v, t) == 1, f"{name} = {v} is not a unit mod t = {t}")
        _check(self.a * self.a % t == 1 % t, f"a^2 = {self.a}^2 is not 1 mod t = {t}")
        _check(self.b * self.b % t == 1 % t, f"b^2 = {self.b}^2 is not 1 mod t = {t}")

    @classmethod
    def from_local(cls, t, nExp, a, b, r=1, s=1):
        """Build from residues given per prime power of t, e.g. a={3: -1, 5: 1}."""
        return cls(t, s, _glue(t, r), nExp, _glue(t, a), _glue(t, b))


def _glue(t, local):
    if isinstance(local, int):
        return local % t
    moduli = [p**k for p, k in factorize(t)] if t > 1 else []
    residues = []
    for q in moduli:
        p = factorize(q)[0][0]
        found = [v for key, v in local.items() if key in (p, q)]
        _check(len(found) == 1, f"need exactly one residue for the prime {p} of t = {t}")
        residues.append(found[0] % q)
    return crt(residues, moduli) if moduli else 0


@dataclass(frozen=True)
class BinaryTetra:
    pass


@dataclass(frozen=True)
class BinaryOcta:
    pass


@dataclass(frozen=True)
class BinaryIcosa:
    pass


@dataclass(frozen=True)
class SL2:
    p: int

    def __post_init__(self):
        _check(is_prime(self.p) and self.p >= 3, f"SL2(F_p) needs an odd prime p, got {self.p}")


@dataclass(frozen=True)
class TL2:
    p: int

    def __post_init__(self):
        _check(is_prime(self.p) and self.p >= 3, f"TL2(F_p) needs an odd prime p, got {self.p}")


@dataclass(frozen=True)
class QFamily:
    """Q(2^nExp a; b, c) = C_abc x| Q_{2^nExp}.

    (x, y) act by (-1, -1) mod a, (-1, 1) mod b and (1, -1) mod c.
    """

    nExp: int
    a: int
    b: int
    c: int

    def __post_init__(self):
        _check(self.nExp >= 3, f"Q(2^n a; b, c) needs n >= 3, got {self.nExp}")
        for v in (self.a, self.b, self.c):
            _check(v >= 1 and v % 2 == 1, f"a, b, c must be odd and positive, got {v}")
        _check(gcd(self.a, self.b) == gcd(self.a, self.c) == gcd(self.b, self.c) == 1,
               f"a, b, c = {self.a}, {self.b}, {self.c} must be pairwise coprime")

    def as_type_ii(self):
        t = self.a * self.b * self.c
        moduli = [x for x in (self.a, self.b, self.c) if x > 1]
        signs = {self.a: (-1, -1), self.b: (-1, 1), self.c: (1, -1)}
        if not moduli:
            return TypeII(1, 1, 0, self.nExp, 0, 0)
        xa = crt([signs[q][0] % q for q in moduli], moduli)
        yb = crt([signs[q][1] % q for q in moduli], moduli)
        return TypeII(t, 1, 1, self.nExp, xa, yb)


VARIANTS = {
    "Cyclic": Cyclic,
    "Quaternion": Quaternion,
    "TypeI": TypeI,
    "TypeII": TypeII,
    "BinaryTetra": BinaryTetra,
    "BinaryOcta": BinaryOcta,
    "BinaryIcosa": BinaryIcosa,
    "SL2": SL2,
    "TL2": TL2,
    "QFamily": QFamily,
}


def spec_to_dict(spec):
    return {"variant": type(spec).__name__, **asdict(spec)}


def spec_from_dict(data):
    data = dict(data)
    name = data.pop("variant", None)
    if name not in VARIANTS:
        raise ValidationError(f"unknown group variant {name!r}")
    try:
        return VARIANTS[name](**{k: int(v) for k, v in data.items()})
    except TypeError as exc:
        raise ValidationError(f"bad fields for {name}: {exc}") from None


_ALIASES = {
    "cyclic": ("Cyclic", {"n": "n"}),
    "c": ("Cyclic", {"n": "n"}),
    "typei": ("TypeI", {"m": "m", "n": "n4", "n4": "n4", "r": "r"}),
    "typeii": ("TypeII", {"t": "t", "s": "s", "r": "r", "n": "nExp", "nexp": "nExp", "a": "a", "b": "b"}),
    "qfamily": ("QFamily", {"n": "nExp", "nexp": "nExp", "a": "a", "b": "b", "c": "c"}),
    "sl2": ("SL2", {"p": "p"}),
    "tl2": ("TL2", {"p": "p"}),
}
_NAMED = {
    "tetra": BinaryTetra, "ttilde": BinaryTetra, "t": BinaryTetra,
    "octa": BinaryOcta, "otilde": BinaryOcta, "o": BinaryOcta,
    "icosa": BinaryIcosa, "itilde": BinaryIcosa, "i": BinaryIcosa,
}


def parse_group_spec(text):
    """Parse CLI group strings such as ``q28``, ``c11``, ``typeI:m=15,n=4,r=14``."""
    s = text.strip()
    low = s.lower()
    if low in _NAMED:
        return _NAMED[low]()
    m = re.fullmatch(r"q(\d+)", low)
    if m:
        return Quaternion(int(m.group(1)))
    m = re.fullmatch(r"c(\d+)", low)
    if m:
        return Cyclic(int(m.group(1)))
    m = re.fullmatch(r"(sl2|tl2)\((\d+)\)", low)
    if m:
        return (SL2 if m.group(1) == "sl2" else TL2)(int(m.group(2)))
    m = re.fullmatch(r"q\((\d+)\s*;\s*(\d+)\s*,\s*(\d+)\)", low)
    if m:
        order, b, c = (int(g) for g in m.groups())
        two = order & -order
        return QFamily(two.bit_length() - 1, order // two, b, c)
    if ":" in s:
        head, _, body = s.partition(":")
        key = head.strip().lower()
        if key not in _ALIASES:
            raise ValidationError(f"unknown group family {head!r}")
        variant, names = _ALIASES[key]
        fields = {}
        for part in filter(None, (p.strip() for p in body.split(","))):
            k, eq, v = part.partition("=")
            k = k.strip().lower()
            if not eq or k not in names:
                raise ValidationError(f"bad field {part!r} for {variant}")
            try:
                fields[names[k]] = int(v)
            except ValueError:
                raise ValidationError(f"field {k} must be an integer, got {v!r}") from None
        if variant == "TypeII":
            fields.setdefault("s", 1)
            fields.setdefault("r", 1)
        try:
            return VARIANTS[variant](**fields)
        except TypeError as exc:
            raise ValidationError(f"bad fields for {variant}: {exc}") from None
    raise ValidationError(f"cannot parse group spec {text!r}")


# ---------------------------------------------------------------------------
# binary polyhedral groups

@dataclass(frozen=True, order=True)
class BinaryPolyhedral:
    """Q_{4n} (kind 'Q', n >= 2) or one of 'Ttilde', 'Otilde', 'Itilde'."""

    kind: str
    n: int = 0

    def __post_init__(self):
        if self.kind == "Q":
            _check(self.n >= 2, f"Q_(4n) needs n >= 2, got {self.n}")
        else:
            _check(self.kind in ("Ttilde", "Otilde", "Itilde"), f"unknown binary polyhedral group {self.kind}")

    @property
    def order(self):
        return {"Q": 4 * self.n, "Ttilde": 24, "Otilde": 48, "Itilde": 120}[self.kind]

    @property
    def m_H(self):
        return {"Q": self.n // 2, "Ttilde": 1, "Otilde": 2, "Itilde": 2}[self.kind]

    def label(self):
        return f"Q({4 * self.n})" if self.kind == "Q" else self.kind

    def __str__(self):
        return self.label()


def Q(order):
    return BinaryPolyhedral("Q", order // 4)


# ---------------------------------------------------------------------------
# classification

def classify_type(spec):
    if isinstance(spec, (Cyclic, TypeI)):
        return "I"
    if isinstance(spec, Quaternion):
        k = (spec.n & -spec.n).bit_length() - 1  # 2-adic valuation of n
        return ("I", "IIa")[k] if k < 2 else "IIb"
    if isinstance(spec, (TypeII, QFamily)):
        return "IIa" if spec.nExp == 3 else "IIb"
    if isinstance(spec, BinaryTetra):
        return "III"
    if isinstance(spec, BinaryOcta):
        return "IV"
    if isinstance(spec, BinaryIcosa):
        return "Va"
    if isinstance(spec, SL2):
        return {3: "III", 5: "Va"}.get(spec.p, "Vb")
    if isinstance(spec, TL2):
        return "IV" if spec.p == 3 else "VI"
    raise ValidationError(f"not a group spec: {spec!r}")


def quaternion_quotients_typeI(spec):
    """All a > 1 with Q_{4a} a quotient of the type I group ``spec``."""
    if not isinstance(spec, TypeI):
        raise ValidationError("expected a TypeI spec")
    if spec.n4 % 4:
        return set()
    return {a for a in range(3, spec.m + 1, 2) if spec.m % a == 0 and (spec.r + 1) % a == 0}


def _admissible(nExp, a, b, m):
    if m == 1:
        return True
    pairs = {(1, m - 1)} if nExp >= 4 else {(1, m - 1), (m - 1, 1), (m - 1, m - 1)}
    return (a % m, b % m) in pairs


def quaternion_quotients_typeII(spec):
    """All odd m with Q_{2^nExp m} a quotient of the type II group ``spec``."""
    if isinstance(spec, QFamily):
        spec = spec.as_type_ii()
    if not isinstance(spec, TypeII):
        raise ValidationError("expected a TypeII spec")
    return {
        m for m in range(1, spec.t + 1, 2)
        if spec.t % m == 0 and (spec.r - 1) % m == 0 and _admissible(spec.nExp, spec.a, spec.b, m)
    }


def _maximal_by_divisibility(values):
    return {v for v in values if not any(w != v and w % v == 0 for w in values)}


def maximal_bpq(spec):
    """The maximal binary polyhedral quotients of ``spec``."""
    gtype = classify_type(spec)
    if isinstance(spec, Cyclic):
        out = set()
    elif isinstance(spec, Quaternion):
        out = {Q(spec.order)}
    elif isinstance(spec, TypeI):
        out = {Q(4 * a) for a in _maximal_by_divisibility(quaternion_quotients_typeI(spec))}
    elif isinstance(spec, (TypeII, QFamily)):
        ms = _maximal_by_divisibility(quaternion_quotients_typeII(spec))
        out = {Q(2**spec.nExp * m) for m in ms}
    elif gtype == "III":
        out = {BinaryPolyhedral("Ttilde")}
    elif gtype == "IV":
        out = {BinaryPolyhedral("Otilde")}
    elif gtype == "Va":
        out = {BinaryPolyhedral("Itilde")}
    else:
        out = set()
    if len(out) not in BM_CARDINALITY[gtype]:
        raise InternalError(f"{len(out)} maximal quotients is impossible for type {gtype}: {spec!r}")
    return out


def m_H(spec):
    """Number of quaternionic one-dimensional components of R[G]."""
    bm = maximal_bpq(spec)
    if not bm:
        return 0
    if len(bm) == 1:
        return next(iter(bm)).m_H
    # type IIa with several maximal quotients Q_{8 m_i}: the m_i are pairwise coprime
    ms = [h.order // 8 for h in bm]
    return sum(m - 1 for m in ms) + 1


# ---------------------------------------------------------------------------
# Milgram's non-vanishing criterion

def _odd_power_hits_pm1(p, q):
    order = multiplicative_order(p % q, q)
    return any(pow(p, k, q) in (1, q - 1) for k in range(1, 2 * order, 2))


def milgram_nonvanishing(spec):
    """Decide the sufficient criterion for sigma_4(Q(2^n; p, q)) != 0.

    Returns ``(verdict, reason)``.  Raises NotApplicableError when the group is
    not of the shape Q(8; p, q) or Q(2^n; p, 1) with distinct odd primes.
    """
    if not isinstance(spec, QFamily):
        raise NotApplicableError("the criterion concerns the family Q(2^n a; b, c)")
    if spec.a != 1:
        raise NotApplicableError(f"the criterion needs a = 1, got a = {spec.a}")
    p, q = spec.b, spec.c
    if not is_prime(p):
        raise NotApplicableError(f"b = {p} is not prime")
    if spec.nExp == 3:
        if not is_prime(q) or q == p:
            raise NotApplicableError(f"Q(8; p, q) needs distinct odd primes, got ({p}, {q})")
        if p % 4 == 3 and q % 4 == 3:
            return True, f"p = {p} and q = {q} are both 3 mod 4"
        if p % 4 == 3 and q % 8 == 5:
            if _odd_power_hits_pm1(p, q):
                return False, f"some odd power of {p} is +-1 mod {q}"
            return True, f"p = 3 mod 4, q = 5 mod 8 and no odd power of {p} is +-1 mod {q}"
        return False, f"(p, q) = ({p}, {q}) mod 8 matches neither congruence pattern"
    if q != 1:
        raise NotApplicableError(f"for n >= 4 the criterion needs c = 1, got c = {q}")
    mod = 2 ** (spec.nExp - 1)
    if p % 8 == 1:
        return False, f"p = {p} is 1 mod 8"
    if p % mod in (1, mod - 1):
        return False, f"p = {p} is +-1 mod {mod}"
    return True, f"p = {p} is not 1 mod 8 and not +-1 mod {mod}"


# ---------------------------------------------------------------------------
# automorphisms of Q_4n

@dataclass(frozen=True)
class AutQ4n:
    """theta_{a,b}: x -> x^a, y -> x^b y in Q_4n = <x, y | x^n = y^2, yxy^-1 = x^-1>."""

    n: int
    a: int
    b: int

    def __post_init__(self):
        if self.n < 3:
            raise UnsupportedError("automorphisms of Q_8 are not of the form theta_{a,b}")
        mod = 2 * self.n
        object.__setattr__(self, "a", self.a % mod)
        object.__setattr__(self, "b", self.b % mod)
        _check(gcd(self.a, mod) == 1, f"a = {self.a} is not a unit mod {mod}")

    def __matmul__(self, other):
        return aut_compose(self, other)


def aut_compose(f, g):
    """f o g: (a, b) o (c, d) = (ac, ad + b) mod 2n."""
    if f.n != g.n:
        raise ValidationError(f"automorphisms of different groups Q_{4 * f.n}, Q_{4 * g.n}")
    return AutQ4n(f.n, f.a * g.a, f.a * g.b + f.b)


def aut_identity(n):
    return AutQ4n(n, 1, 0)


def aut_inverse(f):
    mod = 2 * f.n
    ai = pow(f.a, -1, mod)
    return AutQ4n(f.n, ai, -ai * f.b)


def aut_enumerate(n):
    if n < 3:
        raise UnsupportedError("automorphisms of Q_8 are not of the form theta_{a,b}")
    mod = 2 * n
    auts = [AutQ4n(n, a, b) for a in range(mod) if gcd(a, mod) == 1 for b in range(mod)]
    if len(auts) != mod * euler_phi(mod):
        raise InternalError("wrong number of automorphisms")
    return auts


def min_quaternion_quotient_index(m_h):
    """n0 = max(ceil(2 m_H / 3), 6): a group with m_H >= 3 has a quotient Q_4n with n >= n0."""
    if m_h < 3:
        raise ValidationError(f"the quotient bound needs m_H >= 3, got {m_h}")
    return max(-(-2 * m_h // 3), 6)


def quaternion_quotient_bound_holds(spec):
    """Check that some maximal quotient is Q_4n with n >= n0 when m_H >= 3."""
    mh = m_H(spec)
    if mh < 3:
        return True
    n0 = min_quaternion_quotient_index(mh)
    return any(h.kind == "Q" and h.n >= n0 for h in maximal_bpq(spec))


__all__ = [
    "AutQ4n", "BinaryIcosa", "BinaryOcta", "BinaryPolyhedral", "BinaryTetra", "Cyclic",
    "GROUP_TYPES", "QFamily", "Quaternion", "SL2", "TL2", "TypeI", "TypeII",
    "aut_compose", "aut_enumerate", "aut_identity", "aut_inverse", "classify_type",
    "m_H", "maximal_bpq", "milgram_nonvanishing", "parse_group_spec",
    "quaternion_quotients_typeI", "quaternion_quotients_typeII", "spec_from_dict", "spec_to_dict",
]
