"""Gaussian sums, T_a(q), truncated singular series and its Euler product.

The floating route (Gaussian sums) is checked against exact integer
counting from :mod:`diagsolve.local` through

    sum_{h<=l} T_a(p^h) = p^(l(1-s)) M_a(p^l).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import _kernels
from .arith import factorize, prime_divisors, primes_up_to
from .errors import DomainError, NumericalError
from .forms import DiagonalForm
from .local import DEFAULT_MODULUS_BUDGET, chi_p_estimate

IMAG_TOL = 1e-8
TAIL_SIEVE_LIMIT = 10**6


@lru_cache(maxsize=1024)
def _gauss_table(q: int, k: int) -> np.ndarray:
    t = np.asarray(_kernels.gauss_sum_table(q, k), dtype=complex)
    t.setflags(write=False)
    return t


def gauss_sum(q: int, r: int, k: int) -> complex:
    """S(q, r) = sum_{x=1}^{q} e(r x^k / q)."""
    if q < 1:
        raise DomainError("modulus must be >= 1")
    return complex(_gauss_table(q, k)[r % q])


def kappa(q: int, k: int) -> float:
    """Multiplicative majorant: kappa(p^(uk+v)) = p^(-u-1) for 2 <= v <= k, kappa(p^(uk+1)) = k p^(-u-1/2)."""
    if q < 1:
        raise DomainError("modulus must be >= 1")
    out = 1.0
    for p, l in factorize(q).items() if q > 1 else ():
        u, v = divmod(l - 1, k)
        v += 1
        out *= k * p ** (-u - 0.5) if v == 1 else p ** (-u - 1.0)
    return out


def _coprime_residues(q: int) -> np.ndarray:
    r = np.arange(1, q + 1, dtype=np.int64)
    if q == 1:
        return r
    mask = np.ones(q, dtype=bool)
    for p in prime_divisors(q):
        mask &= r % p != 0
    return r[mask]


def T_a(form: DiagonalForm, q: int) -> float:
    """q^(-s) * sum over r coprime to q of prod_j S(q, a_j r)."""
    if q < 1:
        raise DomainError("modulus must be >= 1")
    table = _gauss_table(q, form.k)
    rs = _coprime_residues(q)
    prod = np.ones(rs.shape[0], dtype=complex)
    for a in form.coefficients:
        prod *= table[(a * rs) % q]
    total = complex(prod.sum()) / float(q) ** form.s
    if abs(total.imag) > IMAG_TOL:
        raise NumericalError(f"T_a({q}) has imaginary part {total.imag:.3e} above {IMAG_TOL}")
    return total.real


@dataclass(frozen=True)
class SeriesEstimate:
    partial_sum: float
    truncation: int
    tail_indicator: float
    convergence_assured: bool
    terms: tuple[float, ...] = field(repr=False, default=())
    per_prime_factors: tuple[tuple[int, Fraction], ...] | None = None

    def to_dict(self) -> dict:
        return {
            "partial_sum": self.partial_sum,
            "truncation": self.truncation,
            "tail_indicator": self.tail_indicator,
            "convergence_assured": self.convergence_assured,
        }


def default_truncation(form: DiagonalForm) -> int:
    return 200


def series_truncated(form: DiagonalForm, Q: int | None = None) -> SeriesEstimate:
    """sum_{q<Q} T_a(q), with the largest |T_a| among the last ceil(Q/4) terms as a tail indicator.

    ``convergence_assured`` is False when s < k + 2, where the series is not
    known to converge.
    """
    Q = default_truncation(form) if Q is None else Q
    if Q < 2:
        raise DomainError("truncation Q must be >= 2")
    terms = [T_a(form, q) for q in range(1, Q)]
    last = terms[-math.ceil(Q / 4):]
    return SeriesEstimate(
        partial_sum=math.fsum(terms),
        truncation=Q,
        tail_indicator=max(abs(t) for t in last),
        convergence_assured=form.s >= form.k + 2,
        terms=tuple(terms),
    )


@dataclass(frozen=True)
class EulerEstimate:
    value: float
    lower: float
    upper: float
    factors: tuple[tuple[int, Fraction], ...]

    @property
    def width_factor(self) -> float:
        return self.upper / self.lower if self.lower > 0 else math.inf


def omitted_prime_interval(k: int, s: int, listed: set[int] | frozenset[int], sieve_limit: int = TAIL_SIEVE_LIMIT) -> tuple[float, float]:
    """Bounds [lo, hi] on the product of chi_p over primes outside ``listed``.

    Uses |chi_p - 1| <= c p^-2 with c = k^(s+k+2) for every omitted prime;
    beyond ``sieve_limit`` the prime sum is majorised by sum_{n > X} n^-2 < 1/X.
    """
    c = float(k ** (s + k + 2))
    ps = np.asarray([p for p in primes_up_to(sieve_limit) if p not in listed], dtype=float)
    y = c / ps**2
    if np.any(y >= 1.0):
        bad = int(ps[np.argmax(y >= 1.0)])
        raise DomainError(
            f"interval vacuous: omitted prime {bad} has c p^-2 >= 1 (c = {k}^{s + k + 2}); list more primes"
        )
    tail = c / sieve_limit
    if tail >= 1.0:
        raise DomainError("interval vacuous beyond the sieve limit; raise sieve_limit")
    log_hi = float(np.sum(np.log1p(y))) + tail
    log_lo = float(np.sum(np.log1p(-y))) - tail / (1.0 - tail)
    return math.exp(log_lo), math.exp(log_hi)


def factor_two_cutoff(k: int, s: int) -> int:
    """Smallest X such that listing every prime up to X keeps the omitted-prime interval within [1/2, 2]."""
    c = k ** (s + k + 2)
    # sum_{p > X} c p^-2 < c / X; need both log bounds within log 2
    x = max(math.isqrt(c) + 1, 2)
    while not (c / x < math.log(2) and (c / x) / (1 - c / x) <= math.log(2)):
        x *= 2
    return x


def euler_product_estimate(
    form: DiagonalForm, primes, l: int, budget: int = DEFAULT_MODULUS_BUDGET
) -> EulerEstimate:
    """Product of finite-level chi_p over ``primes`` with an interval for the rest.

    Each prime is evaluated at the highest level <= l whose modulus fits the
    budget.  The listed primes must include every prime dividing a coefficient,
    and s >= k + 2 so that the bound on omitted primes applies.
    """
    if form.s < form.k + 2:
        raise DomainError("Euler product interval needs s >= k + 2")
    primes = sorted(set(int(p) for p in primes))
    needed = {p for a in form.coefficients for p in prime_divisors(a)}
    missing = needed - set(primes)
    if missing:
        raise DomainError(f"prime list must contain the coefficient primes {sorted(missing)}")
    lo, hi = omitted_prime_interval(form.k, form.s, frozenset(primes))
    factors = []
    value = 1.0
    for p in primes:
        level = max(1, min(l, int(math.log(budget, p))))
        chi = chi_p_estimate(form, p, level, budget)
        factors.append((p, chi))
        value *= float(chi)
    return EulerEstimate(value, value * lo, value * hi, tuple(factors))
