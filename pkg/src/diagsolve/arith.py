"""Exact integer and modular arithmetic, plus the seeded-randomness contract.

Everything here works on Python integers, so results are exact at any
magnitude.  Primality is deterministic for every 64-bit input.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError

_MASK64 = (1 << 64) - 1
_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
# Strong-probable-prime bases that are sufficient for all n < 3.3e24.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        if a % n == 0:
            continue
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _require_prime(p: int) -> None:
    if not is_prime(p):
        raise DomainError(f"{p} is not prime")


@lru_cache(maxsize=64)
def _sieve(limit: int) -> tuple[int, ...]:
    if limit < 2:
        return ()
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return tuple(int(p) for p in np.flatnonzero(flags))


def primes_up_to(limit: int) -> list[int]:
    """All primes p <= limit, increasing."""
    return list(_sieve(int(limit)))


def factorize(n: int) -> dict[int, int]:
    """Prime factorization of |n| as {p: exponent}.

    Trial division followed by Pollard rho; intended for the experiment
    envelope (inputs of at most 64 bits), not for cryptographic sizes.
    """
    n = abs(int(n))
    if n == 0:
        raise DomainError("cannot factor 0")
    out: dict[int, int] = {}
    for p in _SMALL_PRIMES:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime(m):
            out[m] = out.get(m, 0) + 1
            continue
        f = _small_factor(m) or _pollard_rho(m)
        stack.extend((f, m // f))
    return dict(sorted(out.items()))


def _small_factor(m: int) -> int:
    for p in range(41, min(10_000, math.isqrt(m)) + 1, 2):
        if m % p == 0:
            return p
    return 0


def _pollard_rho(n: int) -> int:
    c = 1
    while True:
        x = y = 2
        d = 1
        while d == 1:
            x = (x * x + c) % n
            y = (y * y + c) % n
            y = (y * y + c) % n
            d = math.gcd(abs(x - y), n)
        if d != n:
            return d
        c += 1


def prime_divisors(n: int) -> list[int]:
    return list(factorize(n))


def p_adic_valuation(n: int, p: int) -> int:
    """Largest e with p**e dividing n."""
    if n == 0:
        raise DomainError("valuation of 0 is infinite")
    _require_prime(p)
    n = abs(n)
    e = 0
    while n % p == 0:
        n //= p
        e += 1
    return e


def squarefree_kernel(n: int) -> int:
    """Product of the distinct primes dividing n (1 for n = 1)."""
    if n <= 0:
        raise DomainError("squarefree kernel needs n >= 1")
    return math.prod(factorize(n)) if n > 1 else 1


def is_kth_power_residue(x: int, k: int, p: int) -> bool:
    """Whether x is congruent to some y**k modulo the prime p."""
    x %= p
    if x == 0:
        return True
    g = math.gcd(k, p - 1)
    return pow(x, (p - 1) // g, p) == 1


def kth_power_nonresidue(k: int, p: int) -> int | None:
    """Least q >= 1 that is not a k-th power modulo p, or None if none exists."""
    if k < 2:
        raise DomainError("degree must be at least 2")
    _require_prime(p)
    if math.gcd(k, p - 1) == 1:
        return None
    for q in range(2, p):
        if not is_kth_power_residue(q, k, p):
            return q
    raise AssertionError("unreachable: a non-residue exists when gcd(k, p-1) > 1")


@lru_cache(maxsize=4096)
def kth_root_table(k: int, p: int) -> dict[int, int]:
    """Map each nonzero k-th power residue mod p to its least positive root."""
    table: dict[int, int] = {}
    for y in range(p - 1, 0, -1):
        table[pow(y, k, p)] = y
    return table


# -- seeded streams -----------------------------------------------------------


def splitmix64(x: int) -> int:
    """One round of the SplitMix64 output function on a 64-bit word."""
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def mix_seed(seed: int, stream_index: int) -> int:
    """64-bit sub-stream seed: splitmix64(seed XOR splitmix64(stream_index))."""
    return splitmix64((seed & _MASK64) ^ splitmix64(stream_index & _MASK64))


@dataclass(frozen=True)
class SeededStream:
    """Immutable descriptor of one independent random sub-stream.

    The values drawn from ``generator()`` depend only on (seed, stream_index),
    so trials keyed by index can run in any order or on any worker.
    """

    seed: int
    stream_index: int = 0

    def __post_init__(self):
        for name in ("seed", "stream_index"):
            v = getattr(self, name)
            if not 0 <= v <= _MASK64:
                raise DomainError(f"{name} must be an unsigned 64-bit integer")

    @property
    def derived_seed(self) -> int:
        return mix_seed(self.seed, self.stream_index)

    def generator(self) -> np.random.Generator:
        return np.random.Generator(np.random.PCG64(self.derived_seed))

    def child(self, index: int) -> "SeededStream":
        return SeededStream(self.derived_seed, index)


def sample_coefficients(s: int, A: int, stream: SeededStream | np.random.Generator) -> tuple[int, ...]:
    """Draw s coefficients uniformly from {-A..-1, 1..A}.

    Zeros drawn from the uniform range [-A, A] are rejected and redrawn.
    """
    if s < 1 or A < 1:
        raise DomainError("need s >= 1 and A >= 1")
    rng = stream.generator() if isinstance(stream, SeededStream) else stream
    out: list[int] = []
    while len(out) < s:
        draws = rng.integers(-A, A + 1, size=s - len(out))
        out.extend(int(v) for v in draws if v != 0)
    return tuple(out)
