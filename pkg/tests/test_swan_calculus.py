import math

import pytest
from hypothesis import given, strategies as st

from quatcancel import ValidationError
from quatcancel.finite_ring_lab import q28_pipeline
from quatcancel.periodic_groups import BinaryOcta, BinaryTetra, Cyclic, Quaternion, SL2
from quatcancel.swan_calculus import (
    GradedStableClass,
    N_lower_bound,
    SwanClass,
    _log_n_estimate,
    _log_n_tail_floor,
    cancellation_predicate_swan_class,
    cyclic_action_orbits,
    fork_cancellation,
    fork_cancellation_mod_action,
    forks_from_pipeline,
    induce_swan,
    swan_group,
    swan_product,
    swan_subgroup_fact,
    swan_trivializes_under,
)


def test_swan_basics():
    a = SwanClass(28, 3) * SwanClass(28, 5)
    assert a.r == 15 and not a.is_free
    assert SwanClass(28, 29).is_free
    with pytest.raises(ValidationError):
        SwanClass(28, 7)
    with pytest.raises(ValidationError):
        swan_product(SwanClass(28, 3), SwanClass(12, 5))
    with pytest.raises(ValidationError):
        induce_swan(SwanClass(28, 3), 5)


@given(st.integers(2, 200), st.data())
def test_swan_product_homomorphism(N, data):
    units = [r for r in range(N) if math.gcd(r, N) == 1]
    r, s = data.draw(st.sampled_from(units)), data.draw(st.sampled_from(units))
    assert (SwanClass(N, r) * SwanClass(N, s)).r == r * s % N
    M = data.draw(st.sampled_from([d for d in range(1, N + 1) if N % d == 0]))
    assert induce_swan(SwanClass(N, r) * SwanClass(N, s), M) == induce_swan(SwanClass(N, r), M) * induce_swan(SwanClass(N, s), M)


def test_swan_group_sizes():
    assert len(swan_group(28)) == 12
    assert len(swan_group(1)) == 1


def test_swan_trivializes():
    assert swan_trivializes_under(2, 3)
    assert not swan_trivializes_under(2, 4)


def test_swan_facts():
    assert "0" in swan_subgroup_fact("Q12")["statement"]
    assert swan_subgroup_fact("q_8")
    with pytest.raises(ValidationError):
        swan_subgroup_fact("Q16")


@pytest.mark.parametrize("spec, holds", [
    (Quaternion(28), False), (Quaternion(8), True), (Quaternion(12), True), (Quaternion(20), True),
    (Quaternion(24), False), (BinaryTetra(), True), (BinaryOcta(), True), (SL2(7), True), (Cyclic(5), True),
])
def test_cancellation_predicate(spec, holds):
    assert cancellation_predicate_swan_class(spec)[0] is holds


# ---------------------------------------------------------------------------
# forks

def test_q28_forks():
    forks = forks_from_pipeline(q28_pipeline())
    nt, tr = forks["nontrivial"], forks["trivial"]
    assert (fork_cancellation(nt), fork_cancellation_mod_action(nt)) == (False, True)
    assert (fork_cancellation(tr), fork_cancellation_mod_action(tr)) == (False, False)


@given(st.permutations(list(range(5))), st.permutations(list(range(5))))
def test_orbits_are_invariant_under_relabeling(perm, relabel):
    verts = tuple(range(5))
    g = dict(zip(verts, perm))
    base = GradedStableClass(verts, (g,))
    ren = {v: relabel[v] for v in verts}
    moved = GradedStableClass(tuple(ren[v] for v in verts), ({ren[a]: ren[b] for a, b in g.items()},))
    assert sorted(sorted(ren[v] for v in o) for o in base.orbits()) == sorted(sorted(o) for o in moved.orbits())
    assert fork_cancellation_mod_action(base) == fork_cancellation_mod_action(moved)


@given(st.integers(2, 12))
def test_involution_orbits_have_size_at_most_two(n):
    orbits = cyclic_action_orbits(2, lambda v: -v, n)
    assert all(len(o) <= 2 for o in orbits)
    assert len(orbits) == n // 2 + 1


def test_c23_action_on_order_three_class_group():
    # odd generators act by x -> 2x on Z/3, giving orbits {0} and {1, 2}
    assert len(cyclic_action_orbits(22, lambda v: 2 * v, 3)) == 2


def test_fork_validation():
    with pytest.raises(ValidationError):
        GradedStableClass(())
    with pytest.raises(ValidationError):
        GradedStableClass((1, 1))
    with pytest.raises(ValidationError):
        GradedStableClass((1, 2), ({1: 1, 2: 1},))


# ---------------------------------------------------------------------------
# N(G, n) bound

@pytest.mark.parametrize("M", [64, 200, 514, 1000, 5000])
def test_tail_floor_is_below_sampled_values(M):
    floor = _log_n_tail_floor(M)
    sample = [_log_n_estimate(n) for n in range(M // 2, 4 * M, 7)]
    assert floor <= min(sample)


def test_n_bound_monotone_from_40():
    values = [N_lower_bound(mh).value.log_lower for mh in range(40, 130, 3)]
    assert all(a <= b for a, b in zip(values, values[1:]))


def test_n_bound_examples():
    assert N_lower_bound(50).value.lower > N_lower_bound(30).value.lower
    assert N_lower_bound(3).certified_integer() >= 1
    with pytest.raises(ValidationError):
        N_lower_bound(2)


def test_n_bound_growth():
    lam = 0.1
    logs = [float(N_lower_bound(m).value.log_lower) - lam * m for m in (60, 120, 240)]
    assert logs[0] < logs[1] < logs[2]


def test_n_bound_is_a_minimum_over_the_scan():
    nb = N_lower_bound(60)
    assert nb.argmin_n >= nb.n0
    for n in range(nb.n0, nb.scan_limit + 1, 5):
        assert _log_n_estimate(n) >= float(nb.value.log_lower) - 1e-6
    assert nb.value.lower <= nb.at_n0.upper
    d = nb.as_dict()
    assert d["certified_integer"] == nb.certified_integer()
