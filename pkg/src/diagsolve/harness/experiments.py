"""Seeded surveys and exact experiments; every function returns an ExperimentRecord.

Trial i of a survey draws from SeededStream(seed, i), so a run with several
worker processes produces the same record as a serial run.  Budget overruns
are kept as censored or undetermined outcomes and never enter a success
fraction.
"""

from __future__ import annotations

import functools
import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from ..archimedean import singular_integral_quadrature, singular_integral_slab_mc
from ..arith import SeededStream, sample_coefficients
from ..counting import (
    CountMode,
    symmetry_key,
    congruent_power_pairs,
    count_solutions,
    minimal_norm,
    upsilon_count,
    xi_count,
)
from ..errors import DomainError, ResourceError
from ..forms import DiagonalForm, hat_s
from ..lattice import (
    LatticeBasis,
    discriminant_squared_minors,
    dual_lattice,
    gram_determinant,
    minor_gcd,
)
from ..local import local_report
from ..singular import series_truncated
from .records import ExperimentRecord

VARIANCE_CAVEAT = (
    "exact left-hand side only: the power saving delta and the implied constant "
    "of the variance bound are not estimated"
)
HEURISTIC_CAVEAT = (
    "heuristic local reports: primes above the cap were not tested, "
    "so 'locally soluble' may include undetected obstructions"
)


# -- statistics -------------------------------------------------------------------


def wilson_interval(successes: int, n: int, z: float = 1.959963984540054) -> tuple[float, float]:
    if n <= 0:
        return (0.0, 1.0)
    p = successes / n
    denom = 1 + z * z / n
    centre = (p + z * z / (2 * n)) / denom
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    return (max(0.0, centre - half), min(1.0, centre + half))


def fraction_entry(successes: int, n: int) -> dict:
    lo, hi = wilson_interval(successes, n)
    return {
        "successes": successes,
        "n": n,
        "fraction": successes / n if n else None,
        "ci95": [lo, hi],
    }


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    residuals: tuple[float, ...]

    @property
    def max_abs_residual(self) -> float:
        return max((abs(r) for r in self.residuals), default=0.0)

    def to_dict(self) -> dict:
        return {
            "slope": self.slope,
            "intercept": self.intercept,
            "residuals": list(self.residuals),
            "max_abs_residual": self.max_abs_residual,
        }


def exponent_fit(points: Sequence[tuple[float, float]]) -> FitResult:
    """Least-squares slope of log(count) against log(scale)."""
    if len(points) < 3:
        raise DomainError("exponent_fit needs at least 3 points")
    if any(c <= 0 or x <= 0 for x, c in points):
        raise DomainError("scales and counts must be positive")
    X = np.log([float(x) for x, _ in points])
    Y = np.log([float(c) for _, c in points])
    M = np.column_stack([X, np.ones_like(X)])
    (slope, icpt), *_ = np.linalg.lstsq(M, Y, rcond=None)
    resid = Y - (slope * X + icpt)
    return FitResult(float(slope), float(icpt), tuple(float(r) for r in resid))


def joint_exponent_fit(rows: Sequence[tuple[float, float, float]]) -> dict:
    """log count = alpha log A + beta log B + c over (A, B, count) rows."""
    if len(rows) < 4:
        raise DomainError("joint fit needs at least 4 rows")
    if any(c <= 0 for *_, c in rows):
        raise DomainError("counts must be positive")
    M = np.array([[math.log(a), math.log(b), 1.0] for a, b, _ in rows])
    Y = np.log([float(c) for *_, c in rows])
    coef, *_ = np.linalg.lstsq(M, Y, rcond=None)
    resid = Y - M @ coef
    return {"alpha": float(coef[0]), "beta": float(coef[1]), "constant": float(coef[2]),
            "max_abs_residual": float(np.max(np.abs(resid)))}


# -- trial plumbing ---------------------------------------------------------------


def map_trials(fn: Callable[[int], dict], indices: Iterable[int], workers: int = 1) -> list[dict]:
    """fn over indices, results in index order whatever the worker count."""
    indices = list(indices)
    if workers <= 1 or len(indices) < 2:
        return [fn(i) for i in indices]
    chunk = max(1, len(indices) // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, indices, chunksize=chunk))


def _sample_form(k: int, s: int, A: int, seed: int, i: int) -> DiagonalForm:
    return DiagonalForm(k, sample_coefficients(s, A, SeededStream(seed, i)))


def _local_trial(i: int, *, k, s, A, seed, mode) -> dict:
    form = _sample_form(k, s, A, seed, i)
    rep = local_report(form, mode=mode)
    return {"a": list(form.coefficients), "overall": rep.overall, "obstruction": rep.obstruction, "mode": rep.mode}


def survey_local_density(k: int, s: int, A: int, n: int, seed: int, mode: str | None = None, workers: int = 1) -> ExperimentRecord:
    """Fraction of sampled coefficient vectors that are locally soluble, with failure attribution."""
    if n < 1:
        raise DomainError("need n >= 1")
    fn = functools.partial(_local_trial, k=k, s=s, A=A, seed=seed, mode=mode)
    trials = map_trials(fn, range(n), workers)
    determined = [t for t in trials if t["overall"] != "undetermined"]
    soluble = sum(t["overall"] == "locally_soluble" for t in determined)
    real_fail = sum(t["obstruction"] == "real" for t in trials)
    prime_fail: dict[str, int] = {}
    for t in trials:
        if isinstance(t["obstruction"], int):
            key = str(t["obstruction"])
            prime_fail[key] = prime_fail.get(key, 0) + 1
    modes = sorted({t["mode"] for t in trials})
    results = {
        "locally_soluble": fraction_entry(soluble, len(determined)),
        "failures": {"real": real_fail, "smallest_failing_prime": dict(sorted(prime_fail.items(), key=lambda kv: int(kv[0])))},
        "undetermined": {"count": n - len(determined), "vectors": [t["a"] for t in trials if t["overall"] == "undetermined"]},
        "modes": modes,
        "caveat": HEURISTIC_CAVEAT if "heuristic" in modes else None,
    }
    params = {"k": k, "s": s, "A": A, "n": n, "mode": mode}
    return ExperimentRecord.create("local_density", params, seed, results, workers=workers)


def norm_bound(C, height: int, e: int) -> int:
    """Largest integer b with b <= C * height^(1/e), decided exactly."""
    C = Fraction(str(C)) if isinstance(C, float) else Fraction(C)
    target = C**e * height
    b = int(float(C) * height ** (1 / e)) + 2
    while b > 0 and Fraction(b) ** e > target:
        b -= 1
    return b


def _small_trial(i: int, *, k, s, A, seed, C_list, budget) -> dict:
    form = _sample_form(k, s, A, seed, i)
    bounds = [norm_bound(C, form.height, s - k) for C in C_list]
    top = max(bounds)
    out = {"a": list(form.coefficients), "bounds": bounds}
    if top < 1:
        out["norm"] = 0
        return out
    try:
        out["norm"] = minimal_norm(form, top, budget)
    except ResourceError:
        out["censored"] = True
    return out


def survey_small_solutions(
    k: int, s: int, A: int, C_list: Sequence[float], n: int, seed: int,
    workers: int = 1, budget: int = 10**7,
) -> ExperimentRecord:
    """Per C, the fraction of sampled a with a nonzero solution of sup-norm <= C |a|^(1/(s-k))."""
    if s <= k:
        raise DomainError("need s > k")
    if n < 1 or not C_list:
        raise DomainError("need n >= 1 and a nonempty C list")
    C_list = sorted(C_list)
    fn = functools.partial(_small_trial, k=k, s=s, A=A, seed=seed, C_list=tuple(C_list), budget=budget)
    trials = map_trials(fn, range(n), workers)
    live = [t for t in trials if not t.get("censored")]
    per_c = []
    for j, C in enumerate(C_list):
        hits = sum(1 for t in live if 0 < t["norm"] <= t["bounds"][j])
        per_c.append({"C": C, **fraction_entry(hits, len(live))})
    results = {
        "exponent": f"1/{s - k}",
        "per_C": per_c,
        "censored": {"count": n - len(live), "vectors": [t["a"] for t in trials if t.get("censored")]},
    }
    params = {"k": k, "s": s, "A": A, "C_list": list(C_list), "n": n, "budget": budget}
    return ExperimentRecord.create("small_solutions", params, seed, results, workers=workers)


def _hasse_one(form: DiagonalForm, B: int, mode, budget: int) -> dict:
    rep = local_report(form, mode=mode)
    out = {"a": list(form.coefficients), "overall": rep.overall, "mode": rep.mode, "obstruction": rep.obstruction}
    if rep.overall == "locally_soluble":
        try:
            out["norm"] = minimal_norm(form, B, budget)
        except ResourceError:
            out["censored"] = True
    return out


def _hasse_sampled(i: int, *, k, s, A, B, seed, mode, budget) -> dict:
    return _hasse_one(_sample_form(k, s, A, seed, i), B, mode, budget)


def survey_hasse(
    k: int, s: int, A: int, B: int, n: int, seed: int, mode: str | None = None,
    inject: Sequence[DiagonalForm] = (), workers: int = 1, budget: int = 10**7,
) -> ExperimentRecord:
    """Among locally soluble samples, the fraction with a nonzero solution of sup-norm <= B.

    ``inject`` appends fixed forms (for example adversarial ones) after the
    sampled trials; they are reported under their own key as well.
    """
    if n < 1 or B < 1:
        raise DomainError("need n >= 1 and B >= 1")
    fn = functools.partial(_hasse_sampled, k=k, s=s, A=A, B=B, seed=seed, mode=mode, budget=budget)
    trials = map_trials(fn, range(n), workers)
    extra = [_hasse_one(f, B, mode, budget) for f in inject]
    everything = trials + extra
    soluble = [t for t in everything if t["overall"] == "locally_soluble"]
    live = [t for t in soluble if not t.get("censored")]
    found = sum(1 for t in live if t["norm"] > 0)
    modes = sorted({t["mode"] for t in everything})
    results = {
        "locally_soluble": len(soluble),
        "locally_insoluble": sum(t["overall"] == "locally_insoluble" for t in everything),
        "undetermined": sum(t["overall"] == "undetermined" for t in everything),
        "found": fraction_entry(found, len(live)),
        "unresolved": [t["a"] for t in live if t["norm"] == 0],
        "censored": [t["a"] for t in soluble if t.get("censored")],
        "injected": [
            {"a": t["a"], "overall": t["overall"], "obstruction": t["obstruction"],
             "outcome": "excluded" if t["overall"] != "locally_soluble"
             else "censored" if t.get("censored") else "found" if t["norm"] else "unresolved"}
            for t in extra
        ],
        "modes": modes,
        "caveat": HEURISTIC_CAVEAT if "heuristic" in modes else None,
    }
    params = {"k": k, "s": s, "A": A, "B": B, "n": n, "mode": mode, "budget": budget,
              "inject": [str(f) for f in inject]}
    return ExperimentRecord.create("hasse", params, seed, results, workers=workers)


# -- exact experiments ------------------------------------------------------------


def range_hypothesis(k: int, s: int, A: int, B: int) -> dict:
    """Whether 1 <= B^(2k) <= A <= B^(hat_s - k) holds."""
    upper = B ** (hat_s(s) - k) if hat_s(s) >= k else Fraction(B) ** (hat_s(s) - k)
    holds = 1 <= B ** (2 * k) <= A <= upper
    return {"condition": "1 <= B^(2k) <= A <= B^(hat_s - k)", "B^(2k)": B ** (2 * k),
            "B^(hat_s - k)": float(upper), "holds": bool(holds)}


def variance_experiment(
    k: int, s: int, A: int, B: int, series_Q: int = 200, integral: str = "quadrature",
    samples: int = 200_000, seed: int = 0, budget: int = 10**6,
) -> ExperimentRecord:
    """Exact sum over all |a| <= A of (rho_a(B) - J_a S_a B^(s-k))^2.

    The summand depends on a only through its symmetry class (permutations,
    a -> -a, and single sign flips when k is odd), so each class is
    evaluated once and weighted by its size.  A locally insoluble class gets
    prediction 0, and its exact count must then be 0 as well; any exception
    is listed under soundness_violations.
    """
    if integral not in ("quadrature", "slab_mc"):
        raise DomainError("integral must be 'quadrature' or 'slab_mc'")
    if s <= k:
        raise DomainError("need s > k")
    total = (2 * A) ** s
    if total > budget:
        raise ResourceError(f"(2A)^s = {total} coefficient vectors exceed the budget {budget}", cap=budget, estimate=total)
    vals = [v for v in range(-A, A + 1) if v]
    classes: dict[tuple[int, ...], int] = {}
    for a in itertools.product(vals, repeat=s):
        key = symmetry_key(k, a)
        classes[key] = classes.get(key, 0) + 1
    terms, rho_sq, insoluble_vectors = [], 0, 0
    violations, modes = [], set()
    for idx, key in enumerate(sorted(classes)):
        mult = classes[key]
        form = DiagonalForm(k, key)
        rho = count_solutions(form, B, CountMode.ALL_COORDS_NONZERO)
        rep = local_report(form)
        modes.add(rep.mode)
        if rep.overall == "locally_insoluble":
            pred = 0.0
            insoluble_vectors += mult
            if rho:
                violations.append({"a": list(key), "rho": rho, "obstruction": rep.obstruction})
        else:
            if integral == "quadrature":
                J = singular_integral_quadrature(form).value
            else:
                J = singular_integral_slab_mc(form, n=samples, stream=SeededStream(seed, idx)).value
            pred = J * series_truncated(form, series_Q).partial_sum * B ** (s - k)
        terms.append(mult * (rho - pred) ** 2)
        rho_sq += mult * rho * rho
    lhs = math.fsum(terms)
    normalizer = A ** (s - 2) * B ** (2 * s - 2 * k)
    check = None
    if s % 2 == 0:
        ups = upsilon_count(k, s // 2, A, B, budget=budget)
        check = {"upsilon_count": ups, "equal": ups == rho_sq}
    results = {
        "lhs": lhs,
        "normalizer": normalizer,
        "ratio": lhs / normalizer,
        "sum_rho_squared": rho_sq,
        "upsilon_check": check,
        "vectors": total,
        "classes": len(classes),
        "locally_insoluble_vectors": insoluble_vectors,
        "soundness_violations": violations,
        "range_hypothesis": range_hypothesis(k, s, A, B),
        "local_modes": sorted(modes),
        "caveat": VARIANCE_CAVEAT,
    }
    params = {"k": k, "s": s, "A": A, "B": B, "series_Q": series_Q, "integral": integral,
              "samples": samples if integral == "slab_mc" else None}
    return ExperimentRecord.create("variance", params, seed, results)


def xi_exponent_experiment(k: int, s: int, A_list: Sequence[int], B_list: Sequence[int]) -> ExperimentRecord:
    """Exact xi counts on a grid, with per-B slopes in A and a joint log-linear fit."""
    grid = [(A, B, xi_count(k, s, A, B)) for B in B_list for A in A_list]
    per_B = {str(B): exponent_fit([(A, c) for A, b, c in grid if b == B]).to_dict() for B in B_list}
    results = {"grid": [list(r) for r in grid], "per_B": per_B, "joint": joint_exponent_fit(grid)}
    params = {"k": k, "s": s, "A_list": list(A_list), "B_list": list(B_list)}
    return ExperimentRecord.create("xi_exponent", params, 0, results)


def pairs_shape_experiment(k: int, B_list: Sequence[int], d_list: Sequence[int], eps: float = 0.1) -> ExperimentRecord:
    """Ratio of the congruent-pair count to B^(1+eps) + B^(2+eps) d^(-2/k) over a grid."""
    worst = None
    ratios = []
    for B in B_list:
        for d in d_list:
            c = congruent_power_pairs(B, d, k)
            r = c / (B ** (1 + eps) + B ** (2 + eps) * d ** (-2 / k))
            ratios.append(r)
            if worst is None or r > worst[0]:
                worst = (r, B, d, c)
    results = {"max_ratio": worst[0], "argmax": {"B": worst[1], "d": worst[2], "count": worst[3]},
               "min_ratio": min(ratios), "points": len(ratios)}
    params = {"k": k, "B_list": list(B_list), "d_list": list(d_list), "eps": eps}
    return ExperimentRecord.create("pairs_shape", params, 0, results)


def random_basis(n: int, rng: np.random.Generator, entry: int = 15) -> LatticeBasis:
    """Random full-rank basis of rank 1..n with entries in [-entry, entry], retried until independent."""
    r = int(rng.integers(1, n + 1))
    while True:
        rows = rng.integers(-entry, entry + 1, size=(r, n)).tolist()
        if gram_determinant(rows) != 0:
            return LatticeBasis(n, tuple(tuple(v) for v in rows))


def duality_check(n_max: int, trials: int, seed: int) -> dict:
    """Checks d(dual)^2 G^2 = d^2 and Gram = sum of squared minors on random bases."""
    rng = SeededStream(seed).generator()
    duality_ok = routes_ok = 0
    failures = []
    for t in range(trials):
        n = int(rng.integers(1, n_max + 1))
        basis = random_basis(n, rng)
        gram = gram_determinant(basis.vectors)
        minors = discriminant_squared_minors(basis)
        routes_ok += gram == minors
        dual = dual_lattice(basis)
        G = minor_gcd(basis)
        d2_dual = gram_determinant(dual.vectors) if dual.rank else 1
        ok = d2_dual * G * G == gram
        duality_ok += ok
        if not ok or gram != minors:
            failures.append({"trial": t, "basis": [list(v) for v in basis.vectors]})
    return {"trials": trials, "duality_ok": duality_ok, "routes_ok": routes_ok, "failures": failures[:10]}
