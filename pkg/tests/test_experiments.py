import math
from fractions import Fraction

import numpy as np
import pytest

from diagsolve.errors import DomainError, ResourceError
from diagsolve.forms import DiagonalForm, adversarial_pq
from diagsolve.harness.experiments import (
    exponent_fit,
    fraction_entry,
    joint_exponent_fit,
    map_trials,
    norm_bound,
    pairs_shape_experiment,
    range_hypothesis,
    survey_hasse,
    survey_local_density,
    survey_small_solutions,
    variance_experiment,
    wilson_interval,
    xi_exponent_experiment,
    duality_check,
)


def test_wilson_interval_reference():
    lo, hi = wilson_interval(10, 100)
    # reference value for 10/100 at 95%
    assert lo == pytest.approx(0.05523, abs=1e-4) and hi == pytest.approx(0.17437, abs=1e-4)
    assert wilson_interval(0, 0) == (0.0, 1.0)
    assert fraction_entry(0, 0)["fraction"] is None


def test_fits_recover_exact_power_laws():
    fit = exponent_fit([(x, 3 * x**2.5) for x in (2, 3, 5, 8)])
    assert fit.slope == pytest.approx(2.5) and fit.max_abs_residual < 1e-12
    joint = joint_exponent_fit([(a, b, 2 * a**1.5 * b**3) for a in (2, 4, 7) for b in (1, 2, 3)])
    assert joint["alpha"] == pytest.approx(1.5) and joint["beta"] == pytest.approx(3.0)
    with pytest.raises(DomainError):
        exponent_fit([(1, 1), (2, 2)])


def _square(i):
    return {"i": i, "sq": i * i}


def test_map_trials_keeps_order_with_workers():
    assert map_trials(_square, range(20), workers=3) == [_square(i) for i in range(20)]


def test_norm_bound_is_exact():
    # 2 * 8^(1/3) = 4 exactly; floating point would give 3.9999...
    assert norm_bound(2, 8, 3) == 4
    assert norm_bound(0.5, 27, 3) == 1
    assert norm_bound(Fraction(3, 2), 100, 2) == 15
    assert norm_bound(0.1, 1, 3) == 0


def test_local_survey_is_deterministic_across_workers():
    a = survey_local_density(3, 5, 6, 12, seed=9, mode="heuristic")
    b = survey_local_density(3, 5, 6, 12, seed=9, mode="heuristic", workers=2)
    assert a.canonical() == b.canonical()
    assert a.results["caveat"] and a.results["locally_soluble"]["n"] <= 12


def test_small_solutions_survey_censors(tmp_path):
    rec = survey_small_solutions(3, 4, 5, [0.5, 2.0], 6, seed=1, budget=50)
    assert rec.results["censored"]["count"] + rec.results["per_C"][0]["n"] == 6
    fr = [e["fraction"] or 0 for e in rec.results["per_C"]]
    assert fr[0] <= fr[1]


def test_hasse_survey_with_injection():
    rec = survey_hasse(3, 4, 4, 3, 5, seed=2, mode="heuristic",
                       inject=[adversarial_pq(3, 2, 7), DiagonalForm(3, (1, 1, -1, -1))])
    inj = rec.results["injected"]
    assert inj[0]["outcome"] == "excluded" and inj[0]["obstruction"] == 7
    assert inj[1]["outcome"] == "found"


def test_range_hypothesis():
    assert range_hypothesis(3, 12, 100, 2)["holds"]
    assert not range_hypothesis(3, 6, 3, 2)["holds"]


def test_variance_small_case():
    rec = variance_experiment(3, 4, 1, 1, series_Q=20)
    res = rec.results
    assert res["upsilon_check"]["equal"]
    assert res["soundness_violations"] == []
    assert res["vectors"] == 16 and res["classes"] == 1
    with pytest.raises(ResourceError):
        variance_experiment(3, 8, 5, 1, budget=1000)


def test_xi_and_pairs_records():
    rec = xi_exponent_experiment(3, 3, [1, 2, 3], [1, 2])
    # 8 sign vectors times 6 zero-sum vectors in {-1, 0, 1}^3
    assert rec.results["grid"][0] == [1, 1, 48]
    pr = pairs_shape_experiment(3, [4, 8], [7, 9])
    assert pr.results["points"] == 4 and pr.results["max_ratio"] >= pr.results["min_ratio"] > 0


def test_duality_check_small():
    res = duality_check(5, 200, seed=4)
    assert res["duality_ok"] == res["routes_ok"] == 200 and not res["failures"]
