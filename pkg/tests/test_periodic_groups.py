import math

import pytest
import sympy
from hypothesis import given, strategies as st

from oracles import Q4n, typeI_quaternion_quotients_bruteforce, wedderburn_mh_quaternion
from quatcancel import NotApplicableError, UnsupportedError, ValidationError
from quatcancel.periodic_groups import (
    BM_CARDINALITY,
    AutQ4n,
    BinaryIcosa,
    BinaryOcta,
    BinaryPolyhedral,
    BinaryTetra,
    Cyclic,
    QFamily,
    Quaternion,
    SL2,
    TL2,
    TypeI,
    TypeII,
    aut_compose,
    aut_enumerate,
    aut_identity,
    aut_inverse,
    classify_type,
    min_quaternion_quotient_index,
    m_H,
    maximal_bpq,
    milgram_nonvanishing,
    parse_group_spec,
    quaternion_quotient_bound_holds,
    quaternion_quotients_typeI,
    quaternion_quotients_typeII,
    spec_from_dict,
    spec_to_dict,
)


def test_classification_examples():
    assert classify_type(Quaternion(28)) == "I"
    assert classify_type(Quaternion(8)) == "IIa"
    assert classify_type(Quaternion(16)) == "IIb"
    assert classify_type(SL2(7)) == "Vb"
    assert classify_type(SL2(5)) == "Va"
    assert classify_type(SL2(3)) == "III"
    assert classify_type(TL2(3)) == "IV"
    assert classify_type(TL2(5)) == "VI"
    assert classify_type(BinaryTetra()) == "III"
    assert classify_type(BinaryOcta()) == "IV"
    assert classify_type(BinaryIcosa()) == "Va"
    assert classify_type(Cyclic(11)) == "I"


def test_sl2_has_no_binary_polyhedral_quotient():
    assert maximal_bpq(SL2(7)) == set()
    assert m_H(SL2(7)) == 0


def test_q28_m_h():
    assert m_H(Quaternion(28)) == 3
    assert maximal_bpq(Quaternion(28)) == {BinaryPolyhedral("Q", 7)}


@pytest.mark.parametrize("n", range(2, 201))
def test_quaternion_m_h_matches_wedderburn(n):
    assert m_H(Quaternion(4 * n)) == wedderburn_mh_quaternion(n) == n // 2


def test_binary_polyhedral_m_h():
    assert m_H(BinaryTetra()) == 1
    assert m_H(BinaryOcta()) == 2
    assert m_H(BinaryIcosa()) == 2


# ---------------------------------------------------------------------------
# type I

def test_typeI_examples():
    assert quaternion_quotients_typeI(TypeI(7, 4, 6)) == {7}
    assert quaternion_quotients_typeI(TypeI(15, 4, 14)) == {3, 5, 15}
    assert quaternion_quotients_typeI(TypeI(15, 2, 14)) == set()


def _typeI_cases():
    out = []
    for m in (1, 3, 5, 7, 9, 15, 21):
        for n4 in (1, 2, 4, 8):
            if math.gcd(m, n4) != 1:
                continue
            for r in range(m):
                if math.gcd(r, m) == 1 and pow(r, n4, m) == 1 % m:
                    out.append((m, n4, r))
    return out


@pytest.mark.parametrize("m, n4, r", _typeI_cases())
def test_typeI_quotients_against_bruteforce(m, n4, r):
    got = quaternion_quotients_typeI(TypeI(m, n4, r))
    brute = typeI_quaternion_quotients_bruteforce(m, n4, r, max_a=max(m, 3))
    assert got == brute


def test_typeI_validation():
    for args in [(4, 4, 1), (9, 3, 1), (15, 4, 5), (7, 4, 2)]:
        with pytest.raises(ValidationError):
            TypeI(*args)


# ---------------------------------------------------------------------------
# type II

def test_typeII_examples():
    assert quaternion_quotients_typeII(TypeII(3, 1, 1, 3, 2, 2)) == {1, 3}
    g = TypeII.from_local(15, 3, {3: -1, 5: 1}, {3: 1, 5: -1})
    assert quaternion_quotients_typeII(g) == {1, 3, 5}
    assert maximal_bpq(g) == {BinaryPolyhedral("Q", 6), BinaryPolyhedral("Q", 10)}
    assert m_H(g) == 7
    assert quaternion_quotients_typeII(TypeII(3, 1, 1, 4, 2, 1)) == {1}


def test_typeII_from_qfamily():
    g = QFamily(3, 1, 3, 5)
    assert classify_type(g) == "IIa"
    assert quaternion_quotients_typeII(g) == quaternion_quotients_typeII(g.as_type_ii())


def test_typeII_validation():
    with pytest.raises(ValidationError):
        TypeII(9, 1, 1, 3, 2, 1)  # 2^2 = 4 is not 1 mod 9
    with pytest.raises(ValidationError):
        TypeII(3, 1, 1, 2, 1, 1)


# ---------------------------------------------------------------------------
# classification rows on random corpora

def _units_squaring_to_one(t):
    return [a for a in range(max(t, 1)) if math.gcd(a, t) == 1 and a * a % t == 1 % t] or [0]


@st.composite
def type_i_specs(draw):
    m = draw(st.sampled_from([1, 3, 5, 7, 9, 11, 13, 15, 21, 25, 33, 35, 45, 63, 105]))
    n4 = draw(st.sampled_from([d for d in (1, 2, 4, 8, 16) if math.gcd(d, m) == 1]))
    rs = [r for r in range(max(m, 1)) if math.gcd(r, m) == 1 and pow(r, n4, m) == 1 % m] or [0]
    return TypeI(m, n4, draw(st.sampled_from(rs)))


@st.composite
def type_ii_specs(draw):
    t = draw(st.sampled_from([1, 3, 5, 7, 15, 21, 35, 105, 9, 45]))
    opts = _units_squaring_to_one(t)
    return TypeII(t, 1, 1, draw(st.integers(3, 6)), draw(st.sampled_from(opts)), draw(st.sampled_from(opts)))


@given(st.one_of(type_i_specs(), type_ii_specs()))
def test_classification_rows(spec):
    gtype = classify_type(spec)
    bm = maximal_bpq(spec)
    assert len(bm) in BM_CARDINALITY[gtype]
    mh = m_H(spec)
    if gtype == "IIa":
        assert mh % 2 == 1
    elif gtype == "IIb":
        assert mh >= 2 and mh % 2 == 0
    else:
        assert mh >= 0


@given(type_i_specs())
def test_typeI_quotients_divide_m(spec):
    for a in quaternion_quotients_typeI(spec):
        assert spec.m % a == 0 and a % 2 == 1 and a >= 3


@given(st.one_of(type_i_specs(), type_ii_specs()))
def test_quotient_index_bound(spec):
    assert quaternion_quotient_bound_holds(spec)


def test_min_quaternion_quotient_index():
    assert min_quaternion_quotient_index(3) == 6
    assert min_quaternion_quotient_index(30) == 20
    assert min_quaternion_quotient_index(50) == 34


# ---------------------------------------------------------------------------
# Milgram criterion

def test_milgram_examples():
    assert milgram_nonvanishing(QFamily(3, 1, 3, 7))[0] is True
    assert milgram_nonvanishing(QFamily(4, 1, 3, 1))[0] is True
    assert milgram_nonvanishing(QFamily(4, 1, 7, 1))[0] is False
    assert milgram_nonvanishing(QFamily(3, 1, 17, 3))[0] is False


def test_milgram_not_applicable():
    with pytest.raises(NotApplicableError):
        milgram_nonvanishing(Quaternion(28))
    with pytest.raises(NotApplicableError):
        milgram_nonvanishing(QFamily(3, 3, 5, 7))
    with pytest.raises(NotApplicableError):
        milgram_nonvanishing(QFamily(3, 1, 3, 25))


# ---------------------------------------------------------------------------
# automorphisms of Q_4n against an explicit model of the group

def _apply(Q, f, g):
    """Image of g = x^i y^e under theta_{a,b}."""
    i, e = g
    img = Q.power((f.a, 0), i)
    if e:
        img = Q.mul(img, (f.b, 1))
    return img


@pytest.mark.parametrize("n", [3, 4, 5, 6, 7])
def test_automorphisms_are_automorphisms(n):
    Q = Q4n(n)
    els = Q.elements()
    auts = aut_enumerate(n)
    assert len(auts) == 2 * n * sympy.totient(2 * n)
    for f in auts[:: max(1, len(auts) // 12)]:
        images = {g: _apply(Q, f, g) for g in els}
        assert len(set(images.values())) == len(els)
        for g in els:
            for h in els:
                assert images[Q.mul(g, h)] == Q.mul(images[g], images[h])


@given(st.integers(3, 30), st.data())
def test_aut_group_axioms(n, data):
    units = [a for a in range(2 * n) if math.gcd(a, 2 * n) == 1]
    pick = lambda: AutQ4n(n, data.draw(st.sampled_from(units)), data.draw(st.integers(0, 2 * n - 1)))
    f, g, h = pick(), pick(), pick()
    assert (f @ g) @ h == f @ (g @ h)
    assert f @ aut_identity(n) == f == aut_identity(n) @ f
    assert aut_compose(f, aut_inverse(f)) == aut_identity(n)


@given(st.integers(3, 9), st.data())
def test_composition_matches_function_composition(n, data):
    Q = Q4n(n)
    units = [a for a in range(2 * n) if math.gcd(a, 2 * n) == 1]
    f = AutQ4n(n, data.draw(st.sampled_from(units)), data.draw(st.integers(0, 2 * n - 1)))
    g = AutQ4n(n, data.draw(st.sampled_from(units)), data.draw(st.integers(0, 2 * n - 1)))
    for el in Q.elements():
        assert _apply(Q, f @ g, el) == _apply(Q, f, _apply(Q, g, el))


def test_aut_composition_example_and_count():
    assert (AutQ4n(7, 3, 1) @ AutQ4n(7, 5, 4)).a == 1
    assert len(aut_enumerate(7)) == 84


def test_aut_q8_unsupported():
    with pytest.raises(UnsupportedError):
        AutQ4n(2, 1, 0)
    with pytest.raises(ValidationError):
        AutQ4n(7, 2, 0)


# ---------------------------------------------------------------------------
# parsing

@pytest.mark.parametrize("text, spec", [
    ("q28", Quaternion(28)),
    ("c11", Cyclic(11)),
    ("sl2(7)", SL2(7)),
    ("tetra", BinaryTetra()),
    ("typeI:m=15,n=4,r=14", TypeI(15, 4, 14)),
    ("typeII:t=3,n=3,a=2,b=2", TypeII(3, 1, 1, 3, 2, 2)),
    ("q(16;3,1)", QFamily(4, 1, 3, 1)),
    ("sl2:p=11", SL2(11)),
])
def test_parse_group_spec(text, spec):
    assert parse_group_spec(text) == spec
    assert spec_from_dict(spec_to_dict(spec)) == spec


@pytest.mark.parametrize("text", ["q30", "q", "typeI:m=4,n=4,r=1", "foo:x=1", "typeI:m=15,n=4,q=1",
                                  "sl2(8)", "typeI:m=x"])
def test_parse_group_spec_rejects(text):
    with pytest.raises(ValidationError):
        parse_group_spec(text)
