"""Diagonal forms a_1 x_1^k + ... + a_s x_s^k and two families of hard instances."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Sequence

from .arith import is_prime, kth_power_nonresidue
from .errors import DomainError

_FORM_RE = re.compile(r"^\s*k=(\d+)\s+a=([-+]?\d+(?:,[-+]?\d+)*)\s*$")


@dataclass(frozen=True)
class DiagonalForm:
    """Degree k >= 2 with a tuple of nonzero integer coefficients."""

    k: int
    coefficients: tuple[int, ...]

    def __post_init__(self):
        coeffs = tuple(int(a) for a in self.coefficients)
        object.__setattr__(self, "coefficients", coeffs)
        if int(self.k) != self.k or self.k < 2:
            raise DomainError("degree k must be an integer >= 2")
        if not coeffs:
            raise DomainError("a form needs at least one coefficient")
        if any(a == 0 for a in coeffs):
            raise DomainError("coefficients must be nonzero")

    @property
    def s(self) -> int:
        return len(self.coefficients)

    @property
    def height(self) -> int:
        return max(abs(a) for a in self.coefficients)

    def __str__(self) -> str:
        return f"k={self.k} a={','.join(str(a) for a in self.coefficients)}"

    @classmethod
    def parse(cls, text: str) -> "DiagonalForm":
        """Inverse of ``str``: ``k=<int> a=<c1>,<c2>,...``."""
        m = _FORM_RE.match(text)
        if not m:
            raise DomainError(f"cannot parse form {text!r}; expected 'k=<int> a=<c1>,<c2>,...'")
        return cls(int(m.group(1)), tuple(int(c) for c in m.group(2).split(",")))

    def evaluate(self, x: Sequence[int]) -> int:
        return evaluate(self, x)

    def permuted(self, order: Sequence[int]) -> "DiagonalForm":
        return DiagonalForm(self.k, tuple(self.coefficients[i] for i in order))


def evaluate(form: DiagonalForm, x: Sequence[int]) -> int:
    """Exact value of the form at x (Python integers never overflow)."""
    if len(x) != form.s:
        raise DomainError(f"expected {form.s} variables, got {len(x)}")
    k = form.k
    return sum(a * int(v) ** k for a, v in zip(form.coefficients, x))


def hat_s(s: int) -> int:
    """Largest even integer strictly below s."""
    if s < 3:
        raise DomainError("hat_s needs s >= 3")
    return s - 2 if s % 2 == 0 else s - 1


def adversarial_pq(k: int, t: int, p: int) -> DiagonalForm:
    """x1^k - q x2^k + p(x3^k - q x4^k) + ... + p^(t-1)(...), q the least k-th power non-residue mod p.

    No nonzero integer solution has sup-norm below p.
    """
    if t < 1:
        raise DomainError("block count t must be >= 1")
    if not is_prime(p):
        raise DomainError(f"{p} is not prime")
    q = kth_power_nonresidue(k, p)
    if q is None:
        raise DomainError(f"gcd(k, p-1) = gcd({k}, {p - 1}) = 1: every residue mod {p} is a power of exponent {k}")
    coeffs: list[int] = []
    for i in range(t):
        coeffs += [p**i, -(p**i) * q]
    return DiagonalForm(k, tuple(coeffs))


def adversarial_ab(k: int, t: int, a: int, b: int) -> DiagonalForm:
    """a(x_1^k + ... + x_t^k) - b(x_{t+1}^k + ... + x_{2t}^k) for even k, coprime a <= b.

    Every nonzero solution has b | x_1^k + ... + x_t^k and sup-norm >= (b/2t)^(1/k).
    """
    if k % 2:
        raise DomainError("adversarial_ab needs even k")
    if t < 1:
        raise DomainError("block count t must be >= 1")
    if a < 1 or b < 1:
        raise DomainError("a and b must be positive")
    if math.gcd(a, b) != 1:
        raise DomainError(f"gcd({a}, {b}) != 1")
    if a > b:
        raise DomainError("need a <= b")
    return DiagonalForm(k, (a,) * t + (-b,) * t)
