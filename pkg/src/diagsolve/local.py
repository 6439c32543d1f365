"""Real and p-adic solubility of diagonal forms, local densities and prime profiles.

A form is soluble over Q_p exactly when it has a primitive solution modulo
p^gamma with gamma = l(p) + nu(p) + 2, where l(p) is the largest power of p
dividing a coefficient and p^nu(p) || k.  Two exact deciders are provided:

* a depth-first lift over p-adic digits up to p^gamma (``method="dfs"``);
* valuation classes (``method="classes"``).  Write v_p(a_j) = k q_j + r_j
  and replace a_j by a_j / p^(k q_j).  A primitive solution has a unit
  coordinate in some least class r; substituting x_j = p y_j in the classes
  below r and dividing by p^r gives a form whose class-0 coefficients are
  units, and a solution of that form mod p^(2 nu + 1) with a unit class-0
  coordinate lifts by Hensel's lemma.  So k small congruence problems decide
  solubility.

Insolubility is never claimed from any level below gamma.
"""

from __future__ import annotations

import math
import random
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from fractions import Fraction
from typing import Literal

import numpy as np

from . import _kernels
from .arith import is_prime, p_adic_valuation, prime_divisors, primes_up_to
from .errors import DomainError, ResourceError
from .forms import DiagonalForm

Status = Literal["soluble", "insoluble", "unknown"]
Mode = Literal["rigorous", "heuristic"]

DEFAULT_NODE_BUDGET = 10**6
DEFAULT_MODULUS_BUDGET = 10**6
DEFAULT_CUTOFF_LIMIT = 10**5
SHORTCUT_ATTEMPTS = 64
SHORTCUT_TABLE_LIMIT = 10**5
CHI_MODULUS_LIMIT = 4096


def real_soluble(form: DiagonalForm) -> bool:
    """Odd degree is always soluble over R; even degree needs both signs."""
    if form.k % 2:
        return True
    return min(form.coefficients) < 0 < max(form.coefficients)


def l_of(form: DiagonalForm, p: int) -> int:
    return max(p_adic_valuation(a, p) for a in form.coefficients)


def gamma_level(form: DiagonalForm, p: int) -> int:
    """l(p) + nu(p) + 2, the level at which primitive solvability is decisive."""
    if not is_prime(p):
        raise DomainError(f"{p} is not prime")
    return l_of(form, p) + p_adic_valuation(form.k, p) + 2


# -- exact congruence counting ------------------------------------------------


def _power_hist(k: int, modulus: int, step: int = 1) -> Counter:
    # x^k mod modulus over x in {0, step, 2*step, ...} below modulus
    return Counter(pow(x, k, modulus) for x in range(0, modulus, step))


def _form_hists(form: DiagonalForm, modulus: int, step: int = 1) -> list[list[int]]:
    base = _power_hist(form.k, modulus, step)
    hists = []
    for a in form.coefficients:
        h = [0] * modulus
        for c, m in base.items():
            h[(a * c) % modulus] += m
        hists.append(h)
    return hists


def _check_modulus(p: int, l: int, budget: int) -> int:
    if l < 0:
        raise DomainError("level must be nonnegative")
    if not is_prime(p):
        raise DomainError(f"{p} is not prime")
    modulus = p**l
    if modulus > budget:
        raise ResourceError(f"modulus {p}^{l} exceeds the counting budget {budget}", cap=budget, estimate=modulus)
    return modulus


def count_congruence_solutions(form: DiagonalForm, p: int, l: int, budget: int = DEFAULT_MODULUS_BUDGET) -> int:
    """M_a(p^l): residue tuples mod p^l on which the form vanishes mod p^l."""
    modulus = _check_modulus(p, l, budget)
    if l == 0:
        return 1
    return _kernels.cyclic_convolve(_form_hists(form, modulus), modulus)[0]


def count_primitive_solutions(form: DiagonalForm, p: int, l: int, budget: int = DEFAULT_MODULUS_BUDGET) -> int:
    """Solutions mod p^l having at least one coordinate prime to p."""
    modulus = _check_modulus(p, l, budget)
    if l == 0:
        return 0
    total = _kernels.cyclic_convolve(_form_hists(form, modulus), modulus)[0]
    imprimitive = _kernels.cyclic_convolve(_form_hists(form, modulus, step=p), modulus)[0]
    return total - imprimitive


def chi_p_estimate(form: DiagonalForm, p: int, l: int, budget: int = DEFAULT_MODULUS_BUDGET) -> Fraction:
    """p^(l(1-s)) M_a(p^l) as an exact rational; tends to chi_p as l grows."""
    if l < 1:
        raise DomainError("level must be >= 1")
    m = count_congruence_solutions(form, p, l, budget)
    return Fraction(m, p ** (l * (form.s - 1)))


# -- p-adic decision ------------------------------------------------------------


@dataclass(frozen=True)
class PadicVerdict:
    p: int
    gamma: int
    status: Status
    witness: tuple[int, ...] | None = None
    nodes: int = 0
    chi_estimate: Fraction | None = None

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "gamma": self.gamma,
            "status": self.status,
            "witness": list(self.witness) if self.witness is not None else None,
            "chi_estimate": (
                f"{self.chi_estimate.numerator}/{self.chi_estimate.denominator}"
                if self.chi_estimate is not None
                else None
            ),
        }


def _hensel_lift(form: DiagonalForm, y: list[int], j: int, p: int, target: int) -> list[int] | None:
    """Newton-lift coordinate j until the form vanishes mod p^target.

    Needs p not dividing y_j and f(y) = 0 mod p^(2e+1) with p^e || k a_j.
    """
    k, a = form.k, form.coefficients[j]
    e = p_adic_valuation(k * a, p)
    mod = p ** max(target, 2 * e + 1)
    y = list(y)
    for _ in range(8 * target + 16):
        f = form.evaluate(y)
        if f % p**target == 0:
            return [v % p**target for v in y]
        d = k * a * y[j] ** (k - 1)
        if f % p ** (e + 1):
            return None
        dq = d // p**e
        y[j] = (y[j] - (f // p**e) * pow(dq, -1, mod)) % mod
    return None


def _try_hensel(form: DiagonalForm, y: list[int], level: int, p: int, target: int) -> list[int] | None:
    for j, v in enumerate(y):
        if v % p == 0:
            continue
        e = p_adic_valuation(form.k * form.coefficients[j], p)
        if level >= 2 * e + 1:
            lifted = _hensel_lift(form, y, j, p, target)
            if lifted is not None:
                return lifted
    return None


def _sampling_shortcut(form: DiagonalForm, p: int, target: int) -> list[int] | None:
    """Random search for a solution that Hensel's lemma lifts immediately.

    With nu = v_p(k), sample every coordinate but one unit-coefficient
    coordinate j modulo p^(2nu+1) and solve for a unit y_j from a table of
    k-th powers of units.  Such a solution is a simple enough root in
    coordinate j to lift to any level.
    """
    units = [j for j, a in enumerate(form.coefficients) if a % p]
    if len(units) < 2:
        return None
    level = 2 * p_adic_valuation(form.k, p) + 1
    mod = p**level
    if mod > SHORTCUT_TABLE_LIMIT:
        return None
    roots = unit_root_table(form.k, p, level)
    rng = random.Random(p * 1_000_003 + len(form.coefficients))
    j = units[-1]
    inv = pow(form.coefficients[j], -1, mod)
    k = form.k
    others = [i for i in range(form.s) if i != j]
    for _ in range(SHORTCUT_ATTEMPTS):
        y = [0] * form.s
        for i in others:
            y[i] = rng.randrange(mod)
        r = (-sum(form.coefficients[i] * pow(y[i], k, mod) for i in others) * inv) % mod
        root = roots.get(r)
        if root is None:
            continue
        y[j] = root
        lifted = _hensel_lift(form, y, j, p, target)
        if lifted is not None:
            return lifted
    return None


@lru_cache(maxsize=4096)
def unit_root_table(k: int, p: int, level: int) -> dict[int, int]:
    """k-th powers of units mod p^level, each mapped to its least root."""
    mod = p**level
    table: dict[int, int] = {}
    for y in range(mod - 1, 0, -1):
        if y % p:
            table[pow(y, k, mod)] = y
    return table


def _normalized_level_one(s: int, p: int):
    # residue vectors mod p whose first nonzero coordinate equals 1
    for j0 in range(s):
        head = [0] * j0 + [1]
        for tail in _product(p, s - j0 - 1):
            yield head + tail


def _product(p: int, n: int):
    if n == 0:
        yield []
        return
    idx = [0] * n
    while True:
        yield list(idx)
        i = n - 1
        while i >= 0:
            idx[i] += 1
            if idx[i] < p:
                break
            idx[i] = 0
            i -= 1
        if i < 0:
            return


def padic_soluble(
    form: DiagonalForm,
    p: int,
    budget: int = DEFAULT_NODE_BUDGET,
    level: int | None = None,
    shortcut: bool = True,
    method: Literal["auto", "dfs", "classes"] = "auto",
) -> PadicVerdict:
    """Decide whether the form has a primitive solution mod p^gamma.

    ``auto`` tries the sampling shortcut, then the valuation-class decider,
    and falls back to the digit search only when p^(2 nu + 1) is too large
    for residue tables.  An explicit ``level`` always uses the digit search,
    which then answers whether a primitive solution mod p^level exists.

    Digit search: depth-first over p-adic digits.  States are primitive solutions mod p^i
    scaled by a unit so that their first coordinate prime to p equals 1;
    every primitive solution mod p^(i+1) reduces to exactly one such state,
    so the search is exhaustive without revisiting states.  A state that
    meets Hensel's criterion in some coordinate is lifted straight to the
    target level.  ``level`` overrides gamma (used for stability checks).
    """
    gamma = gamma_level(form, p)
    target = gamma if level is None else level
    if target < 1:
        raise DomainError("level must be >= 1")
    s, k = form.s, form.k

    if shortcut:
        w = _sampling_shortcut(form, p, target)
        if w is not None:
            return PadicVerdict(p, target, "soluble", tuple(w))
    if method == "classes" or (
        method == "auto" and level is None
        and p ** (2 * p_adic_valuation(k, p) + 1) <= DEFAULT_MODULUS_BUDGET
    ):
        return _classes_verdict(form, p, gamma)
    if method not in ("auto", "dfs", "classes"):
        raise DomainError(f"unknown method {method!r}")
    return _dfs_verdict(form, p, target, budget)


def _dfs_verdict(form: DiagonalForm, p: int, target: int, budget: int) -> PadicVerdict:
    s = form.s
    nodes = 0
    stack = [(_normalized_level_one(s, p), 1)]
    while stack:
        it, i = stack[-1]
        mod = p**i
        try:
            x = next(it)
        except StopIteration:
            stack.pop()
            continue
        nodes += 1
        if nodes > budget:
            return PadicVerdict(p, target, "unknown", None, nodes)
        if form.evaluate(x) % mod:
            continue
        if i == target:
            return PadicVerdict(p, target, "soluble", tuple(v % mod for v in x), nodes)
        lifted = _try_hensel(form, x, i, p, target)
        if lifted is not None:
            return PadicVerdict(p, target, "soluble", tuple(lifted), nodes)
        j0 = next(j for j, v in enumerate(x) if v % p)
        stack.append((_children(x, j0, p, i), i + 1))
    return PadicVerdict(p, target, "insoluble", None, nodes)


def _classes_verdict(form: DiagonalForm, p: int, gamma: int) -> PadicVerdict:
    k = form.k
    nu = p_adic_valuation(k, p)
    vals = [p_adic_valuation(a, p) for a in form.coefficients]
    q = [v // k for v in vals]
    r_of = [v % k for v in vals]
    units = [a // p**v for a, v in zip(form.coefficients, vals)]
    checked = 0
    for r in sorted(set(r_of)):
        # rotated form: classes >= r keep p^(r_j - r), classes < r pick up p^(k + r_j - r)
        shift = [rj - r if rj >= r else k + rj - r for rj in r_of]
        rotated = DiagonalForm(k, tuple(u * p**e for u, e in zip(units, shift)))
        lead = [j for j, e in enumerate(shift) if e == 0]
        checked += 1
        w = _lead_unit_solution(rotated, lead, p, 2 * nu + 1)
        if w is None:
            continue
        Q = max(q)
        target = gamma + k * Q + 1
        j_star = next(j for j in lead if w[j] % p)
        w = _hensel_lift(rotated, w, j_star, p, target)
        z = [wj * p if rj < r else wj for wj, rj in zip(w, r_of)]
        witness = _primitive_from_scaled(z, q, p, gamma)
        if form.evaluate(witness) % p**gamma:
            raise AssertionError("class witness failed to map back")  # pragma: no cover
        return PadicVerdict(p, gamma, "soluble", witness, checked)
    return PadicVerdict(p, gamma, "insoluble", None, checked)


def _primitive_from_scaled(z: list[int], q: list[int], p: int, gamma: int) -> tuple[int, ...]:
    """The primitive multiple of (p^-q_j z_j)_j, reduced mod p^gamma."""
    def val(n):
        return p_adic_valuation(n, p) if n else None

    mu = min(val(zj) - qj for zj, qj in zip(z, q) if zj)
    mod = p**gamma
    out = []
    for zj, qj in zip(z, q):
        e = qj + mu  # x_j = z_j / p^e
        out.append((zj // p**e if e >= 0 else zj * p ** (-e)) % mod if zj else 0)
    return tuple(out)


def _lead_unit_solution(form: DiagonalForm, lead: list[int], p: int, level: int) -> list[int] | None:
    """A solution mod p^level whose coordinate j is a unit for some j in ``lead``.

    Reachability sets of partial sums over the remaining coordinates are
    built right to left, then a solution is read off left to right.
    """
    mod = p**level
    k, a, s = form.k, form.coefficients, form.s
    powers = np.array([pow(x, k, mod) for x in range(mod)], dtype=np.int64)
    for j_star in lead:
        options = []
        for j in range(s):
            xs = np.arange(mod)
            if j == j_star:
                xs = xs[xs % p != 0]
            res = (a[j] * powers[xs]) % mod
            uniq, first = np.unique(res, return_index=True)
            options.append((uniq, xs[first]))
        reach = [None] * (s + 1)
        reach[s] = np.zeros(mod, dtype=bool)
        reach[s][0] = True
        for j in range(s - 1, -1, -1):
            acc = np.zeros(mod, dtype=bool)
            nxt = reach[j + 1]
            for t in options[j][0]:
                acc |= np.roll(nxt, int(t))
            reach[j] = acc
        if not reach[0][0]:
            continue
        x, sigma = [], 0
        for j in range(s):
            uniq, reps = options[j]
            for t, rep in zip(uniq, reps):
                if reach[j + 1][(-sigma - int(t)) % mod]:
                    x.append(int(rep))
                    sigma = (sigma + int(t)) % mod
                    break
        return x
    return None


def _children(x: list[int], j0: int, p: int, i: int):
    step = p**i
    free = [j for j in range(len(x)) if j != j0]
    for digits in _product(p, len(free)):
        y = list(x)
        for j, d in zip(free, digits):
            y[j] += d * step
        yield y


# -- prime profile and reports -----------------------------------------------------


@dataclass(frozen=True)
class PrimeProfile:
    """Primes that need explicit treatment: S(a) and every prime up to the cutoff."""

    S_a: tuple[int, ...]
    cutoff: int
    script_P: tuple[int, ...]
    l_map: dict[int, int] = field(hash=False)
    P: int
    P0: int
    P_dagger: int
    H: int


def prime_profile(form: DiagonalForm, cutoff: int) -> PrimeProfile:
    counts = Counter(p for a in form.coefficients for p in prime_divisors(a))
    S_a = tuple(sorted(p for p, c in counts.items() if c >= 2))
    small = primes_up_to(cutoff)
    script_P = tuple(sorted(set(S_a) | set(small)))
    l_map = {p: l_of(form, p) for p in script_P}
    return PrimeProfile(
        S_a=S_a,
        cutoff=cutoff,
        script_P=script_P,
        l_map=l_map,
        P=math.prod(script_P),
        P0=math.prod(p for p in S_a if p > cutoff),
        P_dagger=math.prod(p ** l_map[p] for p in script_P),
        H=math.prod(small),
    )


def rigorous_cutoff(k: int, s: int) -> int:
    """Largest C with C^2 <= k^(s+k+2); primes above it coprime to every a_j cannot obstruct."""
    return math.isqrt(k ** (s + k + 2))


def heuristic_cap(k: int) -> int:
    return max(k**4, 1000)


@dataclass(frozen=True)
class PrimeSet:
    profile: PrimeProfile
    primes: tuple[int, ...]
    mode: Mode


def local_prime_set(
    form: DiagonalForm,
    mode: Mode = "rigorous",
    cap: int | None = None,
    cutoff_limit: int = DEFAULT_CUTOFF_LIMIT,
) -> PrimeSet:
    """Primes at which local solubility must be tested.

    Rigorous: every p with p^2 <= k^(s+k+2) and every p dividing a coefficient.
    Heuristic: the first set is replaced by p <= cap (default max(k^4, 1000)).
    """
    k, s = form.k, form.s
    if mode == "rigorous":
        if s < k + 2:
            raise DomainError(f"rigorous prime set needs s >= k + 2 (got s={s}, k={k}); use heuristic mode")
        cutoff = rigorous_cutoff(k, s)
        if cutoff > cutoff_limit:
            raise ResourceError(
                f"rigorous cutoff {cutoff} exceeds the enumeration limit {cutoff_limit}; use heuristic mode",
                cap=cutoff_limit,
                estimate=cutoff,
            )
    elif mode == "heuristic":
        cutoff = cap if cap is not None else heuristic_cap(k)
    else:
        raise DomainError(f"unknown mode {mode!r}")
    divisors = {p for a in form.coefficients for p in prime_divisors(a)}
    primes = tuple(sorted(set(primes_up_to(cutoff)) | divisors))
    return PrimeSet(prime_profile(form, cutoff), primes, mode)


def default_mode(form: DiagonalForm, cutoff_limit: int = DEFAULT_CUTOFF_LIMIT) -> Mode:
    if form.s >= form.k + 2 and rigorous_cutoff(form.k, form.s) <= cutoff_limit:
        return "rigorous"
    return "heuristic"


@dataclass(frozen=True)
class LocalReport:
    real_soluble: bool
    prime_verdicts: tuple[PadicVerdict, ...]
    mode: Mode
    overall: Literal["locally_soluble", "locally_insoluble", "undetermined"]
    obstruction: int | str | None = None  # smallest failing prime, or "real"

    def to_dict(self) -> dict:
        return {
            "real_soluble": self.real_soluble,
            "mode": self.mode,
            "overall": self.overall,
            "obstruction": self.obstruction,
            "primes_tested": len(self.prime_verdicts),
            "prime_verdicts": [v.to_dict() for v in self.prime_verdicts if v.status != "soluble" or v.p < 100],
        }


def local_report(
    form: DiagonalForm,
    mode: Mode | None = None,
    budget: int = DEFAULT_NODE_BUDGET,
    cap: int | None = None,
    with_chi: bool = False,
) -> LocalReport:
    """Real solubility plus a p-adic verdict at every prime of the test set."""
    mode = mode or default_mode(form)
    pset = local_prime_set(form, mode, cap)
    verdicts = []
    for p in pset.primes:
        v = padic_soluble(form, p, budget)
        if with_chi and p ** v.gamma <= CHI_MODULUS_LIMIT:
            v = PadicVerdict(v.p, v.gamma, v.status, v.witness, v.nodes, chi_p_estimate(form, p, v.gamma))
        verdicts.append(v)
    real = real_soluble(form)
    failing = [v.p for v in verdicts if v.status == "insoluble"]
    if not real:
        overall, obstruction = "locally_insoluble", "real"
    elif failing:
        overall, obstruction = "locally_insoluble", failing[0]
    elif any(v.status == "unknown" for v in verdicts):
        overall, obstruction = "undetermined", None
    else:
        overall, obstruction = "locally_soluble", None
    return LocalReport(real, tuple(verdicts), mode, overall, obstruction)


@dataclass(frozen=True)
class LowerCertificate:
    value: Fraction | None
    reason: str | None = None


def series_lower_certificate(
    form: DiagonalForm, profile: PrimeProfile, budget: int = DEFAULT_NODE_BUDGET
) -> LowerCertificate:
    """(1/2) * prod over the profile's primes of p^((1-s) gamma(p)), once each is shown soluble."""
    value = Fraction(1, 2)
    for p in profile.script_P:
        v = padic_soluble(form, p, budget)
        if v.status != "soluble":
            return LowerCertificate(None, f"local solubility at p={p} is {v.status}")
        value *= Fraction(1, p ** ((form.s - 1) * gamma_level(form, p)))
    return LowerCertificate(value)
