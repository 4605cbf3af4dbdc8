import pytest
from hypothesis import given, strategies as st

from oracles import LITERAL_SFC, literal_sfc
from quatcancel import UnsupportedError, ValidationError
from quatcancel.quaternionic_orders import (
    UNASSIGNED_WITNESSES,
    all_order_specs,
    connected_components,
    defect_trivial,
    has_sfc,
    q4n_noncancellation_witness,
    ratio_edge,
    ratio_graph,
    validate_order_spec,
)


def test_validation_examples():
    assert validate_order_spec({2, 14}).r == 1
    assert validate_order_spec("8,24").r == 3
    assert validate_order_spec([2, 14]).ambient == 7


@pytest.mark.parametrize("bad", [[], [3], [2, 4], [2, 2], "2,x", [0]])
def test_validation_rejects(bad):
    with pytest.raises(ValidationError):
        validate_order_spec(bad)


def test_mixed_valuation_error_names_the_pair():
    with pytest.raises(ValidationError, match="2 and 4"):
        validate_order_spec([2, 4])


@pytest.mark.parametrize("indices, expected", [
    ("2,6", True), ("2,18", True), ("14,18,30", True), ("30", True),
    ("2,14", False), ("10,30", False), ("8,24", False), ("16", False), ("22", False),
    ("12,20", True), ("2,6,18", False), ("6,30", False),
])
def test_examples(indices, expected):
    assert has_sfc(indices).verdict is expected


def test_trace_records_rules():
    v = has_sfc("10,30")
    rules = [s["rule"] for s in v.trace]
    assert rules[0] == "split"
    assert rules[-1] == "forbidden_pair"
    assert all(s["citation"] for s in v.trace)
    assert v.as_dict()["verdict"] is False


def test_degree_and_numerator_steps():
    assert has_sfc("34").trace[-1]["rule"] == "degree_bound"
    assert has_sfc("26").trace[-1]["rule"] == "numerator_test"
    assert has_sfc("16").trace[-1]["rule"] == "numerator_test"
    # ei = 1/6 passes the numerator test; 42 is excluded by the singleton list alone
    assert has_sfc("42").trace[-1]["rule"] == "singleton"


def test_ratio_graph():
    assert ratio_edge(6, 18) and ratio_edge(2, 14) and not ratio_edge(6, 10)
    assert not ratio_edge(2, 30)
    assert connected_components("6,10,30") == [(6, 30), (10, 30)] or connected_components("6,10,30") == [(6, 10, 30)]
    assert connected_components("12,20") == [(12,), (20,)]
    g = ratio_graph("2,6,18")
    assert set(g.edges) == {(2, 6), (6, 18), (2, 18)}


def test_exhaustive_against_literal_list():
    specs = all_order_specs(42)
    assert len(specs) == 2087
    mismatches = [s for s in specs if has_sfc(s).verdict != literal_sfc(s, connected_components(s))]
    assert mismatches == []
    assert sum(has_sfc(s).verdict for s in specs) == 29


def test_literal_list_is_closed_under_components():
    for s in LITERAL_SFC:
        for comp in connected_components(sorted(s)):
            assert frozenset(comp) in LITERAL_SFC


@given(st.lists(st.sampled_from([2, 6, 10, 14, 18, 22, 26, 30, 34, 38, 42]), min_size=1, max_size=6, unique=True))
def test_split_invariant(indices):
    whole = has_sfc(indices).verdict
    parts = [has_sfc(list(c)).verdict for c in connected_components(indices)]
    assert whole == all(parts)


@given(st.lists(st.sampled_from([2, 6, 10, 14, 18, 30]), min_size=2, max_size=6, unique=True))
def test_sfc_passes_to_subsets(indices):
    if has_sfc(indices).verdict:
        for drop in indices:
            rest = [i for i in indices if i != drop]
            assert has_sfc(rest).verdict


@pytest.mark.parametrize("n", range(6, 41))
def test_witness_is_a_quotient_without_sfc(n):
    spec = q4n_noncancellation_witness(n)
    assert not has_sfc(spec).verdict
    for d in spec.indices:
        assert (2 * n) % d == 0 and n % d != 0


def test_witness_examples():
    assert q4n_noncancellation_witness(8).indices == (16,)
    assert q4n_noncancellation_witness(7).indices == (2, 14)
    assert q4n_noncancellation_witness(9).indices == (6, 18)
    assert UNASSIGNED_WITNESSES == ((6, 42),)
    assert not has_sfc(UNASSIGNED_WITNESSES[0]).verdict


def test_witness_small_n():
    for n in range(2, 6):
        with pytest.raises(UnsupportedError):
            q4n_noncancellation_witness(n)


def test_defect():
    assert defect_trivial("30") is True
    assert defect_trivial("2,14") is False
    assert defect_trivial("4,12") is True
    assert defect_trivial("2,6") is None
