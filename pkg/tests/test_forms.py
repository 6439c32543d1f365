import itertools

import pytest
from hypothesis import given, strategies as st

from diagsolve.errors import DomainError
from diagsolve.forms import DiagonalForm, adversarial_ab, adversarial_pq, evaluate, hat_s


def test_parse_round_trip():
    f = DiagonalForm(3, (1, -2, 7))
    assert str(f) == "k=3 a=1,-2,7"
    assert DiagonalForm.parse(str(f)) == f
    assert f.height == 7 and f.s == 3


@given(st.integers(2, 7), st.lists(st.integers(-50, 50).filter(bool), min_size=1, max_size=8))
def test_parse_inverts_str(k, a):
    f = DiagonalForm(k, tuple(a))
    assert DiagonalForm.parse(str(f)) == f


@pytest.mark.parametrize("bad", ["k=3", "a=1,2", "k=3 a=1,,2", "k=x a=1"])
def test_parse_rejects(bad):
    with pytest.raises(DomainError):
        DiagonalForm.parse(bad)


def test_validation():
    with pytest.raises(DomainError):
        DiagonalForm(1, (1, 2))
    with pytest.raises(DomainError):
        DiagonalForm(3, (1, 0))
    with pytest.raises(DomainError):
        DiagonalForm(3, ())


def test_evaluate_exact_big_values():
    f = DiagonalForm(5, (1, -1))
    assert evaluate(f, (10**12, 10**12 - 1)) == 10**60 - (10**12 - 1) ** 5
    with pytest.raises(DomainError):
        f.evaluate((1,))


def test_hat_s():
    assert [hat_s(s) for s in range(3, 9)] == [2, 2, 4, 4, 6, 6]


def test_adversarial_pq_shape_and_bound():
    f = adversarial_pq(3, 2, 7)
    assert f.coefficients == (1, -2, 7, -14)
    # no nonzero solution with sup-norm below p
    for x in itertools.product(range(-6, 7), repeat=4):
        if any(x):
            assert f.evaluate(x) != 0
    with pytest.raises(DomainError):
        adversarial_pq(3, 2, 5)
    with pytest.raises(DomainError):
        adversarial_pq(3, 2, 9)


def test_adversarial_ab():
    f = adversarial_ab(2, 2, 1, 17)
    assert f.coefficients == (1, 1, -17, -17)
    for bad in [(3, 2, 1, 17), (2, 2, 2, 4), (2, 2, 5, 3)]:
        with pytest.raises(DomainError):
            adversarial_ab(*bad)
