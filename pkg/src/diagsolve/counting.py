"""Exact solution counts and searches in sup-norm boxes.

Two coordinate conventions are supported (``CountMode``): every coordinate
nonzero, as in rho_a(B), or only the vector nonzero.  Counting and the
smallest-solution search are meet-in-the-middle over the two halves of the
variables, done by the compiled kernel when available.
"""

from __future__ import annotations

import enum
import itertools
import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from . import _kernels
from .errors import DomainError, ResourceError
from .forms import DiagonalForm
from .lattice import coefficient_lattice, enumerate_box

DEFAULT_TABLE_BUDGET = 10**7
DEFAULT_LOOP_BUDGET = 10**7


class CountMode(str, enum.Enum):
    ALL_COORDS_NONZERO = "all_coords_nonzero"
    VECTOR_NONZERO = "vector_nonzero"

    @classmethod
    def parse(cls, text: str) -> "CountMode":
        key = text.strip().lower().replace("-", "_")
        aliases = {"all_nonzero": cls.ALL_COORDS_NONZERO, "vector_nonzero": cls.VECTOR_NONZERO}
        try:
            return aliases.get(key) or cls(key)
        except ValueError:
            raise DomainError(f"unknown count mode {text!r}") from None


def _table_size(s: int, B: int) -> int:
    return (2 * B + 1) ** math.ceil(s / 2)


def _check_table(s: int, B: int, budget: int) -> None:
    size = _table_size(s, B)
    if size > budget:
        raise ResourceError(
            f"half table of about {size} entries exceeds the budget of {budget}",
            cap=budget,
            estimate=size,
        )


def count_solutions(
    form: DiagonalForm, B: int, mode: CountMode | str = CountMode.ALL_COORDS_NONZERO,
    budget: int = DEFAULT_TABLE_BUDGET,
) -> int:
    """Exact number of solutions of F(x) = 0 with |x| <= B under ``mode``."""
    mode = CountMode.parse(mode) if isinstance(mode, str) else mode
    if B < 1:
        raise DomainError("box B must be >= 1")
    _check_table(form.s, B, budget)
    if mode is CountMode.ALL_COORDS_NONZERO:
        values = [v for v in range(-B, B + 1) if v]
        return _kernels.count_zero_sums(form.coefficients, form.k, values)
    values = list(range(-B, B + 1))
    return _kernels.count_zero_sums(form.coefficients, form.k, values) - 1


def minimal_norm(form: DiagonalForm, B: int, budget: int = DEFAULT_TABLE_BUDGET) -> int:
    """Least sup-norm of a nonzero solution with |x| <= B, or 0 if there is none."""
    if B < 1:
        raise DomainError("box B must be >= 1")
    _check_table(form.s, B, budget)
    return _kernels.min_norm(form.coefficients, form.k, B)


@dataclass(frozen=True)
class SearchOutcome:
    witness: tuple[int, ...] | None
    norm: int | None
    exhausted_up_to: int

    @property
    def found(self) -> bool:
        return self.witness is not None

    def to_dict(self) -> dict:
        return {
            "found": None if self.witness is None else {"witness": list(self.witness), "norm": self.norm},
            "exhausted_up_to": self.exhausted_up_to,
        }


def _lex_largest_witness(form: DiagonalForm, m: int) -> tuple[int, ...]:
    """Lexicographically largest nonzero solution in [-m, m]^s.

    Right halves are indexed by value keeping the largest vector; left halves
    are scanned in decreasing lexicographic order, so the first match wins.
    """
    k, a = form.k, form.coefficients
    h = form.s // 2
    desc = range(m, -m - 1, -1)
    right: dict[int, tuple[int, ...]] = {}
    for y in itertools.product(desc, repeat=form.s - h):
        v = sum(c * t**k for c, t in zip(a[h:], y))
        if v not in right or (v == 0 and not any(right[v])):
            right[v] = y
    for x in itertools.product(desc, repeat=h):
        v = sum(c * t**k for c, t in zip(a[:h], x))
        y = right.get(-v)
        if y is not None and (any(x) or any(y)):
            return x + y
    raise AssertionError("no witness although the kernel reported one")


def smallest_solution(
    form: DiagonalForm, B_max: int, budget: int = DEFAULT_TABLE_BUDGET
) -> SearchOutcome:
    """First sup-norm shell m = 1..B_max holding a nonzero solution, with a witness.

    The least norm over the whole box [-B, B]^s equals the first nonempty
    shell, so one kernel call at the largest affordable B replaces the shell
    by shell scan.  Within the shell the witness is the lexicographically
    largest solution.  If B_max itself is over budget, the ResourceError
    reports the last shell that could be completed.
    """
    if B_max < 1:
        raise DomainError("B_max must be >= 1")
    if _table_size(form.s, B_max) > budget:
        done = 0
        while _table_size(form.s, done + 1) <= budget:
            done += 1
        m = _kernels.min_norm(form.coefficients, form.k, done) if done else 0
        if m:
            return SearchOutcome(_lex_largest_witness(form, m), m, m)
        raise ResourceError(
            f"shell {done + 1} needs a table of {_table_size(form.s, done + 1)} entries "
            f"(budget {budget}); last completed shell: {done}",
            cap=budget,
            estimate=_table_size(form.s, done + 1),
        )
    m = _kernels.min_norm(form.coefficients, form.k, B_max)
    if m == 0:
        return SearchOutcome(None, None, B_max)
    return SearchOutcome(_lex_largest_witness(form, m), m, m)


def enumerate_solutions(
    form: DiagonalForm, B: int, budget: int = DEFAULT_TABLE_BUDGET
) -> Iterator[tuple[int, ...]]:
    """All nonzero x with |x| <= B and F(x) = 0, left half in lexicographic order."""
    if B < 1:
        raise DomainError("box B must be >= 1")
    _check_table(form.s, B, budget)
    k, a = form.k, form.coefficients
    h = form.s // 2
    rng = range(-B, B + 1)
    right: dict[int, list[tuple[int, ...]]] = {}
    for y in itertools.product(rng, repeat=form.s - h):
        right.setdefault(sum(c * t**k for c, t in zip(a[h:], y)), []).append(y)
    for x in itertools.product(rng, repeat=h):
        for y in right.get(-sum(c * t**k for c, t in zip(a[:h], x)), ()):
            if any(x) or any(y):
                yield x + y


# -- counts over coefficient boxes -------------------------------------------


def _coefficient_vectors(s: int, A: int, budget: int):
    total = (2 * A) ** s
    if total > budget:
        raise ResourceError(
            f"(2A)^s = {total} coefficient vectors exceed the budget of {budget}",
            cap=budget, estimate=total,
        )
    vals = [v for v in range(-A, A + 1) if v]
    return itertools.product(vals, repeat=s)


def symmetry_key(k: int, a: Sequence[int]) -> tuple[int, ...]:
    # rho and minimal norms are invariant under permuting coefficients and
    # under a -> -a; for odd k also under flipping any single sign (x_j -> -x_j)
    if k % 2:
        return tuple(sorted(abs(c) for c in a))
    return min(tuple(sorted(a)), tuple(sorted(-c for c in a)))


def upsilon_count(k: int, t: int, A: int, B: int, budget: int = DEFAULT_LOOP_BUDGET) -> int:
    """Sum over a in ([-A, A] minus 0)^(2t) of rho_a(B)^2 (all coordinates nonzero)."""
    if t < 1 or A < 1 or B < 1:
        raise DomainError("need t, A, B >= 1")
    cache: dict[tuple[int, ...], int] = {}
    total = 0
    for a in _coefficient_vectors(2 * t, A, budget):
        key = symmetry_key(k, a)
        if key not in cache:
            cache[key] = count_solutions(DiagonalForm(k, key), B, CountMode.ALL_COORDS_NONZERO)
        total += cache[key] ** 2
    return total


def p_count(k: int, s: int, A: int, B: int, budget: int = DEFAULT_LOOP_BUDGET) -> int:
    """Number of a in ([-A, A] minus 0)^s with a nonzero solution of sup-norm <= B."""
    if s < 1 or A < 1 or B < 1:
        raise DomainError("need s, A, B >= 1")
    cache: dict[tuple[int, ...], bool] = {}
    total = 0
    for a in _coefficient_vectors(s, A, budget):
        key = symmetry_key(k, a)
        if key not in cache:
            cache[key] = minimal_norm(DiagonalForm(k, key), B) > 0
        total += cache[key]
    return total


def _coefficient_solutions(powers: Sequence[int], A: int) -> int:
    """#{a in ([-A, A] minus 0)^s : sum a_j c_j = 0} by convolving per-coordinate value polynomials."""
    big = (2 * A) ** len(powers) >= 1 << 62
    poly = np.ones(1, dtype=object if big else np.int64)
    offset = 0
    for c in powers:
        c = abs(c)
        if c == 0:
            poly = poly * (2 * A)
            continue
        term = np.zeros(2 * A * c + 1, dtype=poly.dtype)
        term[np.arange(-A, A + 1) * c + A * c] = 1
        term[A * c] = 0
        poly = np.convolve(poly, term)
        offset += A * c
    return int(poly[offset])


def xi_count(k: int, s: int, A: int, B: int, budget: int = DEFAULT_LOOP_BUDGET) -> int:
    """Pairs (a, x), a in ([-A, A] minus 0)^s, 0 < |x| <= B, with sum a_j x_j^k = 0.

    The number of admissible a for a given x depends only on the multiset
    {|x_j|}, since a_j -> -a_j is a bijection of the coefficient range, so x
    is enumerated up to order and signs and weighted by its orbit size.
    """
    if B < 1:
        raise DomainError("box B must be >= 1 (x = 0 is excluded)")
    if s < 1 or A < 1:
        raise DomainError("need s, A >= 1")
    orbits = math.comb(s + B, s)
    if orbits > budget:
        raise ResourceError(f"{orbits} x-orbits exceed the budget of {budget}", cap=budget, estimate=orbits)
    total = 0
    for absx in itertools.combinations_with_replacement(range(B + 1), s):
        if not any(absx):
            continue
        mult = math.factorial(s)
        for c in Counter(absx).values():
            mult //= math.factorial(c)
        mult *= 2 ** sum(1 for v in absx if v)
        total += mult * _coefficient_solutions([v**k for v in absx], A)
    return total


def xi_count_lattice(k: int, s: int, A: int, B: int, budget: int = DEFAULT_LOOP_BUDGET) -> int:
    """Same count as ``xi_count`` by box enumeration in each coefficient lattice; for small inputs."""
    if B < 1:
        raise DomainError("box B must be >= 1 (x = 0 is excluded)")
    if (2 * B + 1) ** s > budget:
        raise ResourceError("x-box exceeds the budget", cap=budget, estimate=(2 * B + 1) ** s)
    total = 0
    for x in itertools.product(range(-B, B + 1), repeat=s):
        if any(x):
            pts = enumerate_box(coefficient_lattice(x, k), A)
            total += sum(1 for a in pts if all(a))
    return total


def congruent_power_pairs(B: int, d: int, k: int) -> int:
    """#{(u, v) : |u|, |v| <= B, u^k = v^k mod d}, zeros included."""
    if B < 0 or d < 1 or k < 1:
        raise DomainError("need B >= 0, d >= 1, k >= 1")
    buckets = Counter(pow(u, k, d) for u in range(-B, B + 1))
    return sum(c * c for c in buckets.values())
