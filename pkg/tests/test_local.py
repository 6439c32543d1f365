import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from diagsolve.errors import DomainError, ResourceError
from diagsolve.forms import DiagonalForm, adversarial_pq
from diagsolve.local import (
    chi_p_estimate,
    count_congruence_solutions,
    count_primitive_solutions,
    gamma_level,
    heuristic_cap,
    local_prime_set,
    local_report,
    padic_soluble,
    real_soluble,
    rigorous_cutoff,
    series_lower_certificate,
)


def brute_primitive_exists(form, p, level):
    """Oracle: scan every residue vector mod p^level."""
    mod = p**level
    k = form.k
    for x in itertools.product(range(mod), repeat=form.s):
        if any(v % p for v in x) and sum(a * pow(v, k, mod) for a, v in zip(form.coefficients, x)) % mod == 0:
            return True
    return False


def check_witness(form, verdict):
    mod = verdict.p**verdict.gamma
    w = verdict.witness
    assert w is not None and any(v % verdict.p for v in w)
    assert form.evaluate(w) % mod == 0


@pytest.mark.parametrize(
    "k,a,p,expected",
    [
        (2, (1, 1, 1), 2, "insoluble"),   # sum of three squares is anisotropic at 2
        (2, (1, 1, -3), 3, "insoluble"),
        (2, (1, 1, -1), 2, "soluble"),
        (3, (1, 2, 4), 2, "insoluble"),   # valuations of the terms are distinct mod 3
        (3, (1, 3, 9), 3, "insoluble"),
        (3, (1, -2, 7, -14), 7, "insoluble"),
        (3, (1, 1, 1), 3, "soluble"),
        (4, (1, 1, 1, 1, 1), 2, "insoluble"),
    ],
)
@pytest.mark.parametrize("method", ["dfs", "classes"])
def test_known_verdicts(k, a, p, expected, method):
    f = DiagonalForm(k, a)
    v = padic_soluble(f, p, method=method, shortcut=False)
    assert v.status == expected
    if expected == "soluble":
        check_witness(f, v)


small_forms = st.tuples(
    st.sampled_from([2, 3]),
    st.lists(st.integers(-12, 12).filter(bool), min_size=2, max_size=3),
    st.sampled_from([2, 3, 5, 7]),
)


@given(small_forms)
@settings(max_examples=60, deadline=None)
def test_deciders_agree_with_brute_force(case):
    k, a, p = case
    f = DiagonalForm(k, tuple(a))
    gamma = gamma_level(f, p)
    if (p**gamma) ** f.s > 3 * 10**5:
        return
    truth = brute_primitive_exists(f, p, gamma)
    for method in ("dfs", "classes"):
        v = padic_soluble(f, p, method=method, shortcut=False)
        assert (v.status == "soluble") == truth, (method, v)
        if truth:
            check_witness(f, v)
    assert (count_primitive_solutions(f, p, gamma) > 0) == truth


@given(st.lists(st.integers(-30, 30).filter(bool), min_size=3, max_size=6), st.sampled_from([2, 3, 7, 13]))
@settings(max_examples=60, deadline=None)
def test_dfs_and_classes_agree(a, p):
    f = DiagonalForm(3, tuple(a))
    d = padic_soluble(f, p, method="dfs", shortcut=False)
    c = padic_soluble(f, p, method="classes", shortcut=False)
    assert d.status == c.status
    for v in (d, c):
        if v.status == "soluble":
            check_witness(f, v)


def test_gamma_level():
    f = DiagonalForm(3, (1, 9, 27))
    assert gamma_level(f, 3) == 3 + 1 + 2
    assert gamma_level(f, 2) == 2
    assert gamma_level(DiagonalForm(4, (1, 1)), 2) == 0 + 2 + 2
    with pytest.raises(DomainError):
        gamma_level(f, 4)


def test_count_congruence_against_brute_force():
    f = DiagonalForm(3, (1, 2, -3))
    for p, l in [(2, 1), (2, 3), (3, 2), (5, 1)]:
        mod = p**l
        brute = sum(
            1 for x in itertools.product(range(mod), repeat=3)
            if sum(a * v**3 for a, v in zip(f.coefficients, x)) % mod == 0
        )
        assert count_congruence_solutions(f, p, l) == brute
        prim = sum(
            1 for x in itertools.product(range(mod), repeat=3)
            if any(v % p for v in x) and sum(a * v**3 for a, v in zip(f.coefficients, x)) % mod == 0
        )
        assert count_primitive_solutions(f, p, l) == prim
    assert chi_p_estimate(f, 5, 1) == Fraction(count_congruence_solutions(f, 5, 1), 25)
    with pytest.raises(ResourceError):
        count_congruence_solutions(f, 101, 4, budget=10**6)


def test_local_density_stabilises_once_past_gamma():
    f = DiagonalForm(3, (1, 2, -3, 5))
    g = gamma_level(f, 3)
    assert chi_p_estimate(f, 3, g) == chi_p_estimate(f, 3, g + 1)


def test_real_solubility():
    assert real_soluble(DiagonalForm(3, (1, 1)))
    assert not real_soluble(DiagonalForm(4, (1, 2, 3)))
    assert real_soluble(DiagonalForm(4, (1, -2, 3)))


def test_prime_sets():
    f = DiagonalForm(3, (1, 2, 3, 5, 7, 11, 13))
    assert rigorous_cutoff(3, 7) == math.isqrt(3**12)
    rig = local_prime_set(f, "rigorous")
    assert max(p for p in rig.primes) == max(q for q in rig.primes if q * q <= 3**12)
    heur = local_prime_set(f, "heuristic")
    assert heuristic_cap(3) == 1000 and max(heur.primes) == 997
    with pytest.raises(DomainError):
        local_prime_set(DiagonalForm(3, (1, 2, 3)), "rigorous")
    with pytest.raises(ResourceError):
        local_prime_set(DiagonalForm(5, (1,) * 12), "rigorous")
    # primes dividing coefficients are always included
    assert 1009 in local_prime_set(DiagonalForm(3, (1, 1, 1009)), "heuristic").primes


def test_local_report_obstructions():
    r = local_report(DiagonalForm(4, (1, 2, 3, 4, 5, 6)))
    assert r.overall == "locally_insoluble" and r.obstruction == "real"
    r = local_report(DiagonalForm(3, (1, -2, 7, -14)), mode="heuristic")
    assert r.overall == "locally_insoluble" and r.obstruction == 7
    r = local_report(DiagonalForm(3, (1, 1, -1, -1)), mode="heuristic")
    assert r.overall == "locally_soluble"


def test_adversarial_form_with_many_variables_is_decided():
    f = adversarial_pq(3, 5, 7)
    v = padic_soluble(f, 7)
    assert v.status == "soluble"
    check_witness(f, v)


def test_series_lower_certificate():
    f = DiagonalForm(3, (1, 1, -1, -1, 2, 3))
    pset = local_prime_set(f, "heuristic", cap=5)
    cert = series_lower_certificate(f, pset.profile)
    expected = Fraction(1, 2)
    for p in pset.profile.script_P:
        expected /= p ** (5 * gamma_level(f, p))
    assert cert.value == expected
    bad = series_lower_certificate(DiagonalForm(3, (1, -2, 7, -14, 49, -98)), local_prime_set(
        DiagonalForm(3, (1, -2, 7, -14, 49, -98)), "heuristic", cap=7).profile)
    assert bad.value is None and "p=7" in bad.reason
