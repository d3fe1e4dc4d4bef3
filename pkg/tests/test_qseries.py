from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from momentforge.errors import InputError
from momentforge.qseries import (
    SimpleType,
    inversion_coefficient,
    is_prime_power,
    q_binomial,
    q_pochhammer,
)


def test_q_pochhammer_values():
    assert q_pochhammer(2, 0) == 1
    assert q_pochhammer(2, 3) == 21  # (1)(3)(7)
    assert q_pochhammer(3, 2) == 16  # (2)(8)
    assert q_pochhammer(5, 1) == 4


def test_q_binomial_values():
    assert q_binomial(5, 0, 2) == 1
    assert q_binomial(4, 2, 2) == 35
    assert q_binomial(2, 1, 3) == 4
    assert q_binomial(3, 5, 2) == 0


def test_q_binomial_counts_subspaces():
    # enumerate 2-dimensional subspaces of F_2**4 directly
    vectors = list(range(1, 16))
    subspaces = set()
    for a in vectors:
        for b in vectors:
            if b == a:
                continue
            subspaces.add(frozenset({0, a, b, a ^ b}))
    assert len(subspaces) == q_binomial(4, 2, 2) == 35


@pytest.mark.parametrize("h", [2, 3, 4, 5])
def test_pascal_recurrence(h):
    for e in range(1, 11):
        for k in range(1, e + 1):
            assert q_binomial(e, k, h) == h**k * q_binomial(e - 1, k, h) + q_binomial(
                e - 1, k - 1, h
            )


@pytest.mark.parametrize("h", [2, 3, 5])
def test_telescoping_identity(h):
    for e in range(1, 9):
        for r in range(9):
            lhs = sum(
                (-1) ** k * q_binomial(e, k, h) * h ** (k * (k - 1) // 2)
                for k in range(r + 1)
            )
            rhs = (-1) ** r * q_binomial(e - 1, r, h) * h ** ((r + 1) * r // 2)
            assert lhs == rhs


@given(
    e=st.integers(min_value=0, max_value=10),
    k=st.integers(min_value=0, max_value=10),
    h=st.sampled_from([2, 3, 4, 5, 7, 8, 9]),
)
def test_symmetry_and_nonnegativity(e, k, h):
    assert q_binomial(e, k, h) >= 0
    if k <= e:
        assert q_binomial(e, k, h) == q_binomial(e, e - k, h)


def test_coefficient_values():
    t2 = SimpleType.abelian(2)
    assert inversion_coefficient(t2, 0) == 1
    assert inversion_coefficient(t2, 1) == -1
    assert inversion_coefficient(t2, 2) == Fraction(1, 3)
    a5 = SimpleType.nonabelian(120)
    assert inversion_coefficient(a5, 0) == 1
    assert inversion_coefficient(a5, 2) == Fraction(1, 28800)


@pytest.mark.parametrize(
    "t", [SimpleType.abelian(2), SimpleType.abelian(3), SimpleType.nonabelian(120)]
)
def test_coefficient_sign_and_decay(t):
    # sign alternates; magnitude ratio matches the exact closed form
    for k in range(20):
        ck = inversion_coefficient(t, k)
        cn = inversion_coefficient(t, k + 1)
        assert (ck > 0) == (k % 2 == 0)
        if t.is_abelian:
            assert abs(cn) / abs(ck) == Fraction(1, t.h ** (k + 1) - 1)
            assert abs(cn) / abs(ck) <= Fraction(1, t.h ** (k + 1) - 1)
        else:
            assert abs(cn) / abs(ck) == Fraction(1, (k + 1) * t.aut)


def test_prime_power_validation():
    assert is_prime_power(2) and is_prime_power(8) and is_prime_power(9)
    assert not is_prime_power(1) and not is_prime_power(6) and not is_prime_power(12)
    with pytest.raises(InputError):
        SimpleType.abelian(6)
    with pytest.raises(InputError):
        SimpleType.abelian(1)
    with pytest.raises(InputError):
        SimpleType.nonabelian(0)
    with pytest.raises(InputError):
        SimpleType(kind="abelian", h=2, aut=3)


def test_simple_type_json_roundtrip():
    for t in (SimpleType.abelian(4), SimpleType.nonabelian(120)):
        assert SimpleType.from_json_obj(t.to_json_obj()) == t
