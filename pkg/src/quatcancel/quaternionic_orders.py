"""The orders Lambda_S = Z Q_4n / (Phi_n1 ... Phi_nk) and stably free cancellation.

An order is given by its index set S = {n1, ..., nk}.  Whether Lambda_S has
stably free cancellation (SFC) is decided by a cascade of elimination rules;
every rule that fires is recorded in the verdict's trace.
"""

from dataclasses import dataclass, field
from math import lcm

from ._nt import euler_phi, nu2, prime_power_base
from .errors import InternalError, UnsupportedError, ValidationError

# Singletons {m} whose order Lambda_m has SFC.
SFC_SINGLETONS = frozenset({2, 4, 6, 8, 10, 12, 14, 18, 20, 24, 30})

# Condition (*): a set with r = nu_2 of its indices can only have SFC if it lies here.
STAR_SETS = {
    1: frozenset({2, 6, 10, 14, 18, 30}),
    2: frozenset({4, 12, 20}),
    3: frozenset({8, 24}),
}

# Two-element orders without SFC.
FORBIDDEN_PAIRS = (
    frozenset({2, 14}),
    frozenset({6, 18}),
    frozenset({6, 30}),
    frozenset({4, 12}),
    frozenset({4, 20}),
    frozenset({8, 24}),
    frozenset({10, 30}),
)

# Connected orders with more than one index that do have SFC.
SFC_CONNECTED = frozenset(
    frozenset(s) for s in ({2, 6}, {2, 10}, {2, 18}, {2, 6, 10}, {2, 10, 18})
)

CITATIONS = {
    "split": "Lambda_S is the product of Lambda_{S_i} over the components S_i of the ratio graph",
    "singleton": "Lambda_m has SFC exactly for m in {2,4,6,8,10,12,14,18,20,24,30}",
    "degree_bound": "SFC for a totally definite order forces [K:Q] <= 6",
    "numerator_test": "SFC for a maximal order forces the numerator of ei_K to be a power of 2",
    "star": "SFC forces S to lie in {2,6,10,14,18,30}, {4,12,20} or {8,24} for r = 1, 2, 3",
    "forbidden_pair": "Lambda_{2,14}, Lambda_{6,18}, Lambda_{6,30}, Lambda_{4,12}, Lambda_{4,20}, "
                      "Lambda_{8,24} and Lambda_{10,30} fail SFC, and SFC passes to quotients",
    "table_row": "Lambda_{2,6}, Lambda_{2,10}, Lambda_{2,18}, Lambda_{2,6,10}, Lambda_{2,10,18} have SFC",
}

# Orders that witness failure of SFC for Z Q_4n, special cases of n.
WITNESS_SPECIAL = {
    6: (4, 12),
    7: (2, 14),
    9: (6, 18),
    10: (4, 20),
    12: (8, 24),
    15: (6, 30),
}
# Listed alongside the special witnesses but with no matching value of n.
UNASSIGNED_WITNESSES = ((6, 42),)

DEFECT_TRIVIAL_PAIRS = frozenset(frozenset(s) for s in ({4, 12}, {4, 20}, {8, 24}, {6, 30}, {6, 42}))
DEFECT_NONTRIVIAL = frozenset(frozenset(s) for s in ({2, 14}, {6, 18}, {2, 6, 18}))


@dataclass(frozen=True)
class OrderSpec:
    indices: tuple
    r: int
    ambient: int

    def __str__(self):
        return "Lambda_{" + ",".join(map(str, self.indices)) + "}"

    def __iter__(self):
        return iter(self.indices)

    def __len__(self):
        return len(self.indices)


def validate_order_spec(indices):
    """Normalise an index set; all indices must share the same 2-adic valuation r >= 1."""
    if isinstance(indices, OrderSpec):
        return indices
    if isinstance(indices, str):
        try:
            indices = [int(x) for x in indices.replace(" ", "").split(",") if x]
        except ValueError:
            raise ValidationError(f"cannot parse order indices {indices!r}") from None
    vals = list(indices)
    if not vals:
        raise ValidationError("an order needs at least one index")
    if len(set(vals)) != len(vals):
        raise ValidationError(f"indices must be distinct, got {vals}")
    for v in vals:
        if int(v) != v or v < 1:
            raise ValidationError(f"indices must be positive integers, got {v!r}")
    vals = sorted(int(v) for v in vals)
    r = nu2(vals[0])
    if r < 1:
        raise ValidationError(f"index {vals[0]} is odd; every index must be even")
    for v in vals[1:]:
        if nu2(v) != r:
            raise ValidationError(
                f"indices {vals[0]} and {v} have different 2-adic valuations ({r} and {nu2(v)})"
            )
    return OrderSpec(tuple(vals), r, lcm(*vals) // 2)


# ---------------------------------------------------------------------------
# ratio graph

def ratio_edge(a, b):
    """True when a/b or b/a is a positive power of a prime."""
    if a == b:
        return False
    hi, lo = max(a, b), min(a, b)
    return hi % lo == 0 and prime_power_base(hi // lo) is not None


@dataclass(frozen=True)
class RatioGraph:
    vertices: tuple
    edges: tuple = field(default=())


def ratio_graph(spec):
    spec = validate_order_spec(spec)
    vs = spec.indices
    edges = tuple((a, b) for i, a in enumerate(vs) for b in vs[i + 1:] if ratio_edge(a, b))
    return RatioGraph(vs, edges)


def connected_components(graph):
    if not isinstance(graph, RatioGraph):
        graph = ratio_graph(graph)
    adj = {v: set() for v in graph.vertices}
    for a, b in graph.edges:
        adj[a].add(b)
        adj[b].add(a)
    seen, comps = set(), []
    for v in graph.vertices:
        if v in seen:
            continue
        stack, comp = [v], []
        seen.add(v)
        while stack:
            u = stack.pop()
            comp.append(u)
            for w in adj[u]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        comps.append(tuple(sorted(comp)))
    return sorted(comps)


# ---------------------------------------------------------------------------
# classifier

@dataclass(frozen=True)
class SfcVerdict:
    verdict: bool
    trace: tuple

    def __bool__(self):
        return self.verdict

    def as_dict(self):
        return {"verdict": self.verdict, "trace": [dict(t) for t in self.trace]}


def _step(rule, component, holds, detail):
    return {
        "rule": rule,
        "component": list(component),
        "holds": holds,
        "detail": detail,
        "citation": CITATIONS[rule],
    }


def _singleton_step(m):
    if m in SFC_SINGLETONS:
        return _step("singleton", (m,), True, f"Lambda_{m} has SFC")
    if m > 2:
        degree = euler_phi(m) // 2
        if degree > 6:
            return _step("degree_bound", (m,), False, f"[Q(zeta_{m})^+ : Q] = {degree} > 6")
        from .mass_formula import eichler_constant  # local: avoids an import cycle at load

        ei = eichler_constant(m)
        if ei.numerator & (ei.numerator - 1):
            return _step("numerator_test", (m,), False, f"ei = {ei} has numerator {ei.numerator}")
    return _step("singleton", (m,), False, f"Lambda_{m} is not in the SFC singleton list")


def _component_step(comp, r):
    if len(comp) == 1:
        return _singleton_step(comp[0])
    cs = frozenset(comp)
    star = STAR_SETS.get(r, frozenset())
    if not cs <= star:
        outside = sorted(cs - star)
        return _step("star", comp, False, f"indices {outside} lie outside the r = {r} set {sorted(star)}")
    for pair in FORBIDDEN_PAIRS:
        if pair <= cs:
            return _step("forbidden_pair", comp, False, f"contains {sorted(pair)}")
    if cs not in SFC_CONNECTED:
        raise InternalError(f"connected component {sorted(cs)} escaped every rule")
    return _step("table_row", comp, True, f"Lambda_{{{','.join(map(str, comp))}}} has SFC")


def has_sfc(spec):
    """Decide stably free cancellation for Lambda_S, with a rule trace."""
    spec = validate_order_spec(spec)
    comps = connected_components(ratio_graph(spec))
    trace = [_step("split", spec.indices, True, f"components {[list(c) for c in comps]}")]
    verdict = True
    for comp in comps:
        step = _component_step(comp, spec.r)
        trace.append(step)
        verdict = verdict and step["holds"]
    return SfcVerdict(verdict, tuple(trace))


# ---------------------------------------------------------------------------
# witnesses and defect groups

def q4n_noncancellation_witness(n):
    """An order quotient of Z Q_4n without SFC, for n >= 6."""
    if n < 6:
        raise UnsupportedError(f"every order quotient of Z Q_{4 * n} has SFC (n = {n} < 6)")
    spec = validate_order_spec(WITNESS_SPECIAL.get(n, (2 * n,)))
    if any(n % d == 0 or (2 * n) % d for d in spec.indices):
        raise InternalError(f"witness {spec} is not a quotient of Z Q_{4 * n}")
    if has_sfc(spec).verdict:
        raise InternalError(f"witness {spec} has SFC")
    return spec


def defect_trivial(spec):
    """True if D(Lambda_S) = 0 is known, False if D(Lambda_S) != 0 is known, else None."""
    spec = validate_order_spec(spec)
    s = frozenset(spec.indices)
    if len(s) == 1 or s in DEFECT_TRIVIAL_PAIRS:
        return True
    if s in DEFECT_NONTRIVIAL:
        return False
    return None


# ---------------------------------------------------------------------------
# enumeration

def all_order_specs(bound):
    """Every valid index set with all indices <= bound, grouped by 2-adic valuation."""
    out = []
    r = 1
    while 2**r <= bound:
        pool = [v for v in range(2**r, bound + 1, 2**r) if nu2(v) == r]
        for mask in range(1, 1 << len(pool)):
            out.append(validate_order_spec([pool[i] for i in range(len(pool)) if mask >> i & 1]))
        r += 1
    return out
