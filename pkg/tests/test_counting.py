import itertools
import math

import pytest
from hypothesis import given, settings, strategies as st

from diagsolve.errors import DomainError, ResourceError
from diagsolve.forms import DiagonalForm, adversarial_ab, adversarial_pq
from diagsolve.counting import (
    CountMode,
    congruent_power_pairs,
    count_solutions,
    enumerate_solutions,
    minimal_norm,
    p_count,
    smallest_solution,
    symmetry_key,
    upsilon_count,
    xi_count,
    xi_count_lattice,
)


def brute(form, B):
    return [
        x for x in itertools.product(range(-B, B + 1), repeat=form.s)
        if any(x) and form.evaluate(x) == 0
    ]


forms = st.tuples(
    st.integers(2, 4), st.lists(st.integers(-8, 8).filter(bool), min_size=2, max_size=4)
).map(lambda t: DiagonalForm(t[0], tuple(t[1])))


@given(forms, st.integers(1, 3))
@settings(max_examples=80, deadline=None)
def test_counts_match_brute_force(form, B):
    sols = brute(form, B)
    assert count_solutions(form, B, "vector_nonzero") == len(sols)
    assert count_solutions(form, B, CountMode.ALL_COORDS_NONZERO) == sum(1 for x in sols if all(x))
    assert sorted(enumerate_solutions(form, B)) == sorted(sols)
    m = minimal_norm(form, B)
    assert m == (min(max(map(abs, x)) for x in sols) if sols else 0)


def test_known_counts():
    assert count_solutions(DiagonalForm(3, (1, 1, -1, -1)), 1) == 6
    assert count_solutions(DiagonalForm(2, (1, 1, -2)), 1) == 8
    assert count_solutions(DiagonalForm(3, (1, -2, 7, -14)), 6, "vector_nonzero") == 0
    assert count_solutions(DiagonalForm(4, (1, 1, 1)), 3, "vector_nonzero") == 0


def test_mode_parsing():
    assert CountMode.parse("all-nonzero") is CountMode.ALL_COORDS_NONZERO
    assert CountMode.parse("vector-nonzero") is CountMode.VECTOR_NONZERO
    with pytest.raises(DomainError):
        CountMode.parse("some")


def test_smallest_solution_witnesses():
    out = smallest_solution(adversarial_ab(4, 2, 1, 17), 6)
    assert out.found and out.norm == 2 and out.witness == (2, 1, 1, 0)
    out = smallest_solution(DiagonalForm(3, (1, -1, 1, -1)), 5)
    assert out.witness == (1, 1, 1, 1) and out.exhausted_up_to == 1
    out = smallest_solution(adversarial_pq(3, 2, 7), 6)
    assert not out.found and out.exhausted_up_to == 6
    assert out.to_dict() == {"found": None, "exhausted_up_to": 6}


@given(forms, st.integers(1, 3))
@settings(max_examples=40, deadline=None)
def test_smallest_solution_is_lex_largest_in_first_shell(form, B):
    sols = brute(form, B)
    out = smallest_solution(form, B)
    if not sols:
        assert not out.found
        return
    m = min(max(map(abs, x)) for x in sols)
    shell = [x for x in sols if max(map(abs, x)) <= m]
    assert out.norm == m and out.witness == max(shell)


def test_smallest_solution_budget():
    # no solution of norm below 7, so the affordable shells come up empty
    f = adversarial_pq(3, 3, 7)
    with pytest.raises(ResourceError) as err:
        smallest_solution(f, 40, budget=1000)
    assert "last completed shell: 4" in str(err.value)
    with pytest.raises(ResourceError):
        count_solutions(f, 100, budget=1000)


def test_symmetry_key_invariance():
    assert symmetry_key(3, (2, -1, 5)) == symmetry_key(3, (-5, 1, 2)) == (1, 2, 5)
    assert symmetry_key(4, (2, -1, 5)) == symmetry_key(4, (1, -2, -5))
    assert symmetry_key(4, (1, 1, -1)) != symmetry_key(4, (1, 1, 1))


def brute_upsilon(k, t, A, B):
    vals = [v for v in range(-A, A + 1) if v]
    total = 0
    for a in itertools.product(vals, repeat=2 * t):
        f = DiagonalForm(k, a)
        total += sum(1 for x in brute(f, B) if all(x)) ** 2
    return total


def test_upsilon_and_p_count_small():
    assert upsilon_count(3, 1, 1, 1) == 16 == brute_upsilon(3, 1, 1, 1)
    assert upsilon_count(3, 1, 2, 2) == brute_upsilon(3, 1, 2, 2)
    assert upsilon_count(2, 1, 2, 1) == brute_upsilon(2, 1, 2, 1)
    vals = [-2, -1, 1, 2]
    brute_p = sum(1 for a in itertools.product(vals, repeat=3) if brute(DiagonalForm(3, a), 2))
    assert p_count(3, 3, 2, 2) == brute_p
    assert p_count(3, 2, 1, 1) == 4  # cubes are odd, so (1, -1) solves every sign pattern


@pytest.mark.parametrize("k,s,A,B", [(3, 3, 2, 1), (3, 3, 1, 2), (2, 3, 2, 1), (3, 4, 1, 1), (2, 2, 3, 2)])
def test_xi_routes_agree(k, s, A, B):
    brute_xi = 0
    vals = [v for v in range(-A, A + 1) if v]
    for a in itertools.product(vals, repeat=s):
        brute_xi += len(brute(DiagonalForm(k, a), B))
    assert xi_count(k, s, A, B) == xi_count_lattice(k, s, A, B) == brute_xi


def test_xi_errors():
    with pytest.raises(DomainError):
        xi_count(3, 3, 2, 0)
    with pytest.raises(ResourceError):
        xi_count(3, 30, 2, 30, budget=1000)


@given(st.integers(0, 12), st.integers(1, 40), st.integers(1, 5))
def test_congruent_power_pairs_brute(B, d, k):
    rng = range(-B, B + 1)
    expected = sum(1 for u in rng for v in rng if (u**k - v**k) % d == 0)
    assert congruent_power_pairs(B, d, k) == expected
