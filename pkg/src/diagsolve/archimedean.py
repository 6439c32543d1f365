"""The real density: v(beta, B), and the singular integral J_a by quadrature and by Monte Carlo.

For theta = 2 pi |omega| large enough, rotating the contour gives the exact split

    int_0^1 e^(i theta u^k) du
        = Gamma(1 + 1/k) e^(i pi / 2k) theta^(-1/k)
          - (i / (k theta)) e^(i theta) int_0^inf (1 + i y / theta)^(1/k - 1) e^(-y) dy,

whose last integral is smooth and is done by Gauss-Laguerre.  The first
term is also the leading asymptotic of v, which the quadrature uses to
integrate the beta-tail in closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .arith import SeededStream
from .errors import DomainError, NumericalError
from .forms import DiagonalForm

# theta below this uses Gauss-Legendre on [0, 1], above it the contour split
_THETA_SWITCH = 4.0
# beyond this the Laguerre integral is summed from its asymptotic series instead
_THETA_SERIES = 40.0
_SERIES_TERMS = 24
_MIN_EPSILON = 1e-3
_MC_BATCH = 50_000


@lru_cache(maxsize=None)
def _legendre(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


@lru_cache(maxsize=None)
def _laguerre(n: int):
    return np.polynomial.laguerre.laggauss(n)


def _half_integral(theta: np.ndarray, k: int, n_leg: int, n_lag: int) -> np.ndarray:
    """int_0^1 exp(i theta u^k) du for theta >= 0 (vectorised)."""
    theta = np.asarray(theta, dtype=float)
    out = np.empty(theta.shape, dtype=complex)
    small = theta < _THETA_SWITCH
    if np.any(small):
        x, w = _legendre(n_leg)
        # two panels on [0, 1/2] and [1/2, 1]
        u = np.concatenate([(x + 1) / 4, (x + 3) / 4])
        ww = np.concatenate([w, w]) / 4
        th = theta[small][:, None]
        out[small] = np.exp(1j * th * u[None, :] ** k) @ ww
    big = ~small
    if np.any(big):
        th = theta[big]
        g = np.empty(th.shape, dtype=complex)
        mid = th < _THETA_SERIES
        if np.any(mid):
            y, w = _laguerre(n_lag)
            g[mid] = ((1 + 1j * y[None, :] / th[mid, None]) ** (1.0 / k - 1)) @ w
        if not np.all(mid):
            g[~mid] = _laguerre_series(th[~mid], k)
        lead = math.gamma(1 + 1 / k) * np.exp(1j * math.pi / (2 * k)) * th ** (-1 / k)
        out[big] = lead - (1j / (k * th)) * np.exp(1j * th) * g
    return out


def _laguerre_series(theta: np.ndarray, k: int) -> np.ndarray:
    """sum_n alpha (alpha-1) ... (alpha-n+1) (i/theta)^n with alpha = 1/k - 1; terms shrink like n!/theta^n."""
    alpha = 1.0 / k - 1
    coef = [1.0]
    for n in range(1, _SERIES_TERMS):
        coef.append(coef[-1] * (alpha - n + 1))
    z = 1j / theta
    acc = np.zeros(theta.shape, dtype=complex)
    for c in reversed(coef):
        acc = acc * z + c
    return acc


def _v_unit(omega, k: int, n_leg: int = 20, n_lag: int = 40) -> np.ndarray:
    """v(omega, 1) = int_{-1}^{1} e(omega xi^k) d xi, vectorised over omega."""
    omega = np.asarray(omega, dtype=float)
    half = _half_integral(2 * math.pi * np.abs(omega), k, n_leg, n_lag)
    half = np.where(omega < 0, np.conj(half), half)
    if k % 2:
        return (2 * half.real).astype(complex)
    return 2 * half


def v_integral(beta: float, B: float, k: int) -> complex:
    """v(beta, B) = int_{-B}^{B} e(beta xi^k) d xi, absolute error <= 1e-8 B.

    Two rule pairs are compared; disagreement beyond the tolerance raises
    NumericalError with both values.
    """
    if not B > 0:
        raise DomainError("scale B must be positive")
    if k < 1:
        raise DomainError("degree must be positive")
    omega = np.array([beta * B**k])
    lo = _v_unit(omega, k, 20, 40)[0]
    hi = _v_unit(omega, k, 30, 60)[0]
    if abs(hi - lo) > 1e-8:
        raise NumericalError(
            f"v({beta}, {B}) refinement did not settle: {lo!r} vs {hi!r}"
        )
    return complex(B * hi)


def _leading_constant(k: int, a: int, B: float) -> complex:
    """L with v(a beta, B) ~ L beta^(-1/k) as beta -> +inf."""
    mag = B * 2 * math.gamma(1 + 1 / k) * (2 * math.pi * abs(a) * B**k) ** (-1 / k)
    if k % 2:
        return complex(mag * math.cos(math.pi / (2 * k)))
    return mag * complex(math.cos(math.pi / (2 * k)), math.copysign(math.sin(math.pi / (2 * k)), a))


def fitted_decay_constant(k: int, grid: int = 2000, beta_max: float = 200.0) -> float:
    """Smallest c with |v(beta, 1)| <= c (1 + |beta|)^(-1/k) over a sample grid."""
    beta = np.concatenate([np.linspace(0, 4, grid), np.geomspace(4, beta_max, grid)])
    vals = np.abs(_v_unit(beta, k)) * (1 + beta) ** (1 / k)
    return float(vals.max())


@dataclass(frozen=True)
class IntegralEstimate:
    value: float
    method: str
    error_indicator: float
    parameters: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "method": self.method,
            "error_indicator": self.error_indicator,
            "parameters": dict(self.parameters),
        }


def _integrand(coeffs, k: int, B: float, beta: np.ndarray, n_leg: int, n_lag: int) -> np.ndarray:
    prod = np.full(beta.shape, B ** len(coeffs), dtype=complex)
    for a in coeffs:
        prod *= _v_unit(a * beta * B**k, k, n_leg, n_lag)
    return prod


def _panel_rules(coeffs, k, B, left: np.ndarray, width: np.ndarray):
    """Integrals over each panel with a 16-point and a 24-point Gauss-Legendre rule."""
    results = []
    for n in (16, 24):
        x, w = _legendre(n)
        nodes = left[:, None] + (x[None, :] + 1) * width[:, None] / 2
        vals = _integrand(coeffs, k, B, nodes.ravel(), 20, 40).reshape(nodes.shape)
        results.append(vals @ w * width / 2)
    return results


def _integrate_range(coeffs, k, B, a, b, tol, max_rounds=12):
    """int_a^b prod v over panels of about one oscillation each, bisecting where the rules disagree."""
    freq = sum(abs(c) for c in coeffs) * B**k
    edges = np.linspace(a, b, max(1, math.ceil((b - a) * freq)) + 1)
    left, width = edges[:-1], np.diff(edges)
    total = 0j
    err = 0.0
    for _ in range(max_rounds):
        lo, hi = _panel_rules(coeffs, k, B, left, width)
        diff = np.abs(hi - lo)
        ok = diff <= tol * width / b
        total += hi[ok].sum()
        err += float(diff[ok].sum())
        if ok.all():
            return total, err
        left = np.concatenate([left[~ok], left[~ok] + width[~ok] / 2])
        width = np.concatenate([width[~ok], width[~ok]]) / 2
    raise NumericalError(f"panel refinement did not converge on [{a}, {b}] ({left.size} panels left)")


def _tail(coeffs, k, B, T):
    """Closed-form leading tail of int_T^inf prod v, and an estimate of the neglected part."""
    s = len(coeffs)
    Ls = [_leading_constant(k, a, B) for a in coeffs]
    lead = math.prod(Ls) * T ** (1 - s / k) / (s / k - 1)
    absL = [abs(L) for L in Ls]
    # |v - leading| <= 2B / (k theta) with theta = 2 pi |a| beta B^k
    r = [2 * B / (k * 2 * math.pi * abs(a) * B**k) for a in coeffs]
    single = 0.0
    for j, a in enumerate(coeffs):
        rest = math.prod(absL[:j] + absL[j + 1:])
        p = (s - 1) / k + 1
        # oscillating at frequency |a| B^k: integration by parts gives 2 T^-p / (2 pi |a| B^k)
        single += rest * r[j] * 2 * T ** (-p) / (2 * math.pi * abs(a) * B**k)
    pair = 0.0
    for i in range(s):
        for j in range(i + 1, s):
            rest = math.prod(absL[m] for m in range(s) if m not in (i, j))
            p = (s - 2) / k + 2
            pair += rest * r[i] * r[j] * T ** (1 - p) / (p - 1)
    return lead, single + pair


def singular_integral_quadrature(
    form: DiagonalForm,
    tail_cut: float | None = None,
    B: float = 1.0,
    rel_target: float = 1e-3,
    abs_target: float = 1e-5,
    tol: float = 1e-9,
) -> IntegralEstimate:
    """J_a(B) = int prod_j v(a_j beta, B) d beta over the real line.

    The integrand at -beta is the conjugate of that at beta, so J = 2 Re int_0^inf.
    [0, tail_cut] is integrated with adaptive Gauss-Legendre panels; the rest
    uses the closed-form leading term of v, and the next-order remainder is
    estimated and folded into ``error_indicator``.  Without an explicit
    tail_cut, the cut doubles until that remainder is below ``rel_target``
    of the running value or below ``abs_target`` (the value can be 0).
    """
    k, coeffs, s = form.k, form.coefficients, form.s
    if s <= k:
        raise DomainError(f"singular integral needs s > k (got s={s}, k={k})")
    if not B > 0:
        raise DomainError("scale B must be positive")
    amin = min(abs(a) for a in coeffs) * B**k
    auto = tail_cut is None
    T = 8.0 / amin if auto else float(tail_cut)
    if not T > 0:
        raise DomainError("tail_cut must be positive")
    body, body_err = _integrate_range(coeffs, k, B, 0.0, T, tol)
    while True:
        lead, rem = _tail(coeffs, k, B, T)
        value = 2 * (body + lead).real
        err = 2 * (body_err + rem)
        if not auto or err <= max(rel_target * abs(value), abs_target) or T * amin > 1024:
            break
        more, more_err = _integrate_range(coeffs, k, B, T, 2 * T, tol)
        body += more
        body_err += more_err
        T *= 2
    return IntegralEstimate(
        value=float(value),
        method="quadrature",
        error_indicator=float(err),
        parameters={"tail_cut": T, "B": B, "tail_leading": float(2 * lead.real)},
    )


def singular_integral_slab_mc(
    form: DiagonalForm,
    epsilon: float = 0.05,
    n: int = 200_000,
    stream: SeededStream | None = None,
    B: float = 1.0,
) -> IntegralEstimate:
    """(2 eps)^-1 vol{x in [-B, B]^s : |F(x)| <= eps} by uniform sampling, with one Richardson step.

    Near t = 0 the density of F picks up a |t|^(s/k - 1) term from the origin,
    so the slab average r(eps) carries a bias of order eps^p with
    p = min(s/k - 1, 2).  The step returns (2^p r(eps/2) - r(eps)) / (2^p - 1),
    which is exact when F is definite (then the slab volume is c eps^(s/k)).
    It is the mean of a per-sample weight, whose sample standard deviation
    gives the reported standard error.  With no hits the
    value is 0 and the error is the binomial standard error at one hit.
    """
    k, coeffs, s = form.k, np.asarray(form.coefficients, dtype=float), form.s
    if s <= k:
        raise DomainError(f"singular integral needs s > k (got s={s}, k={k})")
    if not (_MIN_EPSILON <= epsilon <= 1):
        raise DomainError(f"epsilon must lie in [{_MIN_EPSILON}, 1]")
    if n < 1:
        raise DomainError("need at least one sample")
    stream = SeededStream(0) if stream is None else stream
    vol = (2.0 * B) ** s
    h1 = h2 = 0
    # running sums of the per-sample weight and its square
    wsum = w2sum = 0.0
    p = min(s / k - 1, 2.0)
    g = 2.0**p
    a1 = vol / (2 * epsilon) / (g - 1)  # weight of an eps-slab-only hit: -a1
    a2 = vol * g / epsilon / (g - 1)    # weight of an eps/2-slab hit (also in eps-slab): a2 - a1
    for b, start in enumerate(range(0, n, _MC_BATCH)):
        m = min(_MC_BATCH, n - start)
        rng = stream.child(b).generator()
        x = rng.uniform(-B, B, size=(m, s))
        F = np.abs((x**k) @ coeffs)
        in1 = F <= epsilon
        in2 = F <= epsilon / 2
        c1, c2 = int(in1.sum()), int(in2.sum())
        h1 += c1
        h2 += c2
        only1 = c1 - c2
        wsum += only1 * (-a1) + c2 * (a2 - a1)
        w2sum += only1 * a1**2 + c2 * (a2 - a1) ** 2
    raw1 = vol * h1 / n / (2 * epsilon)
    raw2 = vol * h2 / n / epsilon
    if h1 == 0:
        value = 0.0
        q = 1.0 / n
        se = vol / (2 * epsilon) * math.sqrt(q * (1 - q) / n)
    else:
        value = wsum / n
        var = max(w2sum / n - value**2, 0.0)
        se = math.sqrt(var / max(n - 1, 1))
    return IntegralEstimate(
        value=float(value),
        method="slab_mc",
        error_indicator=float(se),
        parameters={
            "epsilon": epsilon,
            "n": n,
            "seed": stream.seed,
            "stream_index": stream.stream_index,
            "B": B,
            "bias_exponent": p,
            "raw_eps": raw1,
            "raw_half_eps": raw2,
            "hits_eps": h1,
            "hits_half_eps": h2,
        },
    )
