"""Counting partitions of n into exactly j positive k-th powers.

Three independent routes to p^k(n, j) live here:

* ``count``        memoised max-part recurrence (per query, supports a part bound)
* ``count_row``    dense (n, j) table built by an in-place part loop (batch scans)
* ``series_counts`` explicit expansion of prod_i 1/(1 - x^(i^k) y)

and ``brute_force`` enumerates the representations themselves.  The tests
cross-check all four against each other.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np

from .errors import (
    ArithmeticOverflowError,
    ConfigurationError,
    DomainError,
    ResourceBudgetError,
    StepBudgetError,
)

# Largest value an exact table cell may hold (cells are uint64).
EXACT_LIMIT = 2**64 - 1

DEFAULT_MEMORY_BUDGET = 2 * 1024**3
DEFAULT_STEP_BUDGET = 5_000_000


@dataclass(frozen=True)
class PartitionQuery:
    k: int
    n: int
    j: int
    mu: Optional[int] = None

    def __post_init__(self):
        if self.k < 1 or self.n < 0 or self.j < 0:
            raise DomainError(f"invalid query {self}")
        if self.mu is not None and self.mu < 1:
            raise DomainError(f"part bound must be >= 1, got {self.mu}")


def iroot(n: int, k: int) -> int:
    """Largest integer r with r**k <= n."""
    if n < 0:
        raise DomainError("iroot of a negative number")
    if n < 2 or k == 1:
        return n
    if k == 2:
        return math.isqrt(n)
    r = int(round(n ** (1.0 / k)))
    while r**k > n:
        r -= 1
    while (r + 1) ** k <= n:
        r += 1
    return r


def is_power(n: int, k: int) -> bool:
    return n >= 1 and iroot(n, k) ** k == n


def check_cap(cap: Optional[int], m_max: int) -> None:
    """A saturating cap must sit strictly above every m it is compared to."""
    if cap is not None and cap < m_max + 1:
        raise ConfigurationError(f"saturating cap {cap} must be >= {m_max + 1} to compare against m={m_max}")


# ---------------------------------------------------------------------------
# memoised recurrence
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _p(k: int, n: int, j: int, top: int) -> int:
    # partitions of n into exactly j parts, every part in {1^k, ..., top^k}
    if j == 0:
        return 1 if n == 0 else 0
    if n < j or n > j * top**k:
        return 0
    total = 0
    for i in range(1, top + 1):
        s = i**k
        if s > n:
            break
        total += _p(k, n - s, j - 1, i)
    return total


def count(query: PartitionQuery, cap: Optional[int] = None) -> int:
    """Number of multisets of ``query.j`` positive k-th powers summing to ``query.n``.

    With ``query.mu`` set, every part value must be <= mu.  ``cap=None`` is
    exact mode and raises on values past the 64-bit table limit; otherwise the
    result is clamped to ``cap``.
    """
    k, n, j = query.k, query.n, query.j
    limit = n if query.mu is None else min(query.mu, n)
    top = iroot(limit, k) if limit > 0 else 0
    if j + 50 > sys.getrecursionlimit():
        sys.setrecursionlimit(j + 200)
    value = _p(k, n, j, top)
    if cap is None:
        if value > EXACT_LIMIT:
            raise ArithmeticOverflowError(n, j)
        return value
    return min(value, cap)


# ---------------------------------------------------------------------------
# brute force oracle
# ---------------------------------------------------------------------------

def brute_force(query: PartitionQuery, step_budget: int = DEFAULT_STEP_BUDGET) -> list[tuple[int, ...]]:
    """All representations of n as j k-th powers, as sorted base tuples.

    Depth-first over nondecreasing bases; the last base is solved by an
    integer root rather than a loop.  Output is in lexicographic order.
    """
    k, n, j = query.k, query.n, query.j
    max_base = iroot(query.mu, k) if query.mu is not None else None
    out: list[tuple[int, ...]] = []
    if j == 0:
        return [()] if n == 0 else []
    steps = 0
    prefix: list[int] = []

    def dfs(remaining: int, slots: int, lo: int) -> None:
        nonlocal steps
        steps += 1
        if steps > step_budget:
            raise StepBudgetError(f"brute force over (k={k}, n={n}, j={j}) exceeded {step_budget} steps")
        if slots == 1:
            x = iroot(remaining, k) if remaining > 0 else 0
            if x >= lo and x**k == remaining and (max_base is None or x <= max_base):
                out.append(tuple(prefix) + (x,))
            return
        # remaining must hold `slots` parts each >= lo**k
        x = lo
        while x**k * slots <= remaining:
            if max_base is not None and x > max_base:
                break
            prefix.append(x)
            dfs(remaining - x**k, slots - 1, x)
            prefix.pop()
            x += 1

    dfs(n, j, 1)
    return out


# ---------------------------------------------------------------------------
# dense tables
# ---------------------------------------------------------------------------

def _dtype_for(cap: Optional[int]):
    if cap is None:
        return np.uint64
    if cap < 1:
        raise ConfigurationError("saturating cap must be positive")
    # two capped cells must add without wrapping
    for dt in (np.uint8, np.uint16, np.uint32, np.uint64):
        if 2 * cap <= np.iinfo(dt).max:
            return dt
    raise ConfigurationError(f"cap {cap} too large for a saturating table")


def estimate_table_bytes(j_max: int, n_max: int, cap: Optional[int]) -> int:
    return (j_max + 1) * (n_max + 1) * np.dtype(_dtype_for(cap)).itemsize


@dataclass(frozen=True)
class CountTable:
    """p^k(n, j) for 0 <= n <= n_max, 0 <= j <= j_max (read-only).

    ``cells`` is indexed ``[j, n]`` so each row is a contiguous scan over n.
    """

    k: int
    n_max: int
    j_max: int
    cap: Optional[int]
    cells: np.ndarray = field(repr=False)

    @property
    def mode(self) -> str:
        return "exact" if self.cap is None else "saturating"

    def cell(self, n: int, j: int) -> int:
        return int(self.cells[j, n])

    def row(self, j: int) -> np.ndarray:
        return self.cells[j]

    def __eq__(self, other):
        if not isinstance(other, CountTable):
            return NotImplemented
        return (self.k, self.n_max, self.j_max, self.cap) == (other.k, other.n_max, other.j_max, other.cap) and np.array_equal(
            self.cells, other.cells
        )

    __hash__ = None


def count_row(k: int, j_max: int, n_max: int, cap: Optional[int] = None,
              memory_budget: int = DEFAULT_MEMORY_BUDGET) -> CountTable:
    """Build the (n, j) table of p^k(n, j) by an in-place part loop.

    Parts i^k are added in increasing order.  For a fixed part s the rows are
    updated in ascending j, so ``row[j] += shift(row[j-1], s)`` already sees
    every use of s in row j-1; that gives unbounded reuse of each part while the
    row index tracks the exact part count.
    """
    if k < 1 or j_max < 0 or n_max < 0:
        raise DomainError(f"invalid table request k={k}, j_max={j_max}, n_max={n_max}")
    need = estimate_table_bytes(j_max, n_max, cap)
    if need > memory_budget:
        raise ResourceBudgetError(
            f"table k={k} j_max={j_max} n_max={n_max} needs {need} bytes, budget is {memory_budget}"
        )
    dtype = _dtype_for(cap)
    dp = np.zeros((j_max + 1, n_max + 1), dtype=dtype)
    dp[0, 0] = 1
    scratch = np.empty(n_max + 1, dtype=dtype)
    i = 1
    while j_max >= 1 and i**k <= n_max:
        s = i**k
        for jj in range(1, j_max + 1):
            # row jj-1 is zero below jj-1, so only n >= s + jj - 1 can change
            lo = s + jj - 1
            if lo > n_max:
                break
            width = n_max + 1 - lo
            src = dp[jj - 1, jj - 1:jj - 1 + width]
            dst = dp[jj, lo:]
            tmp = scratch[:width]
            np.add(dst, src, out=tmp)
            if cap is None:
                bad = tmp < dst
                if bad.any():
                    n_bad = lo + int(np.argmax(bad))
                    raise ArithmeticOverflowError(n_bad, jj)
                dst[...] = tmp
            else:
                np.minimum(tmp, cap, out=dst)
        i += 1
    dp.setflags(write=False)
    return CountTable(k=k, n_max=n_max, j_max=j_max, cap=cap, cells=dp)


def series_counts(k: int, n_max: int, j_max: int, mu: Optional[int] = None,
                  memory_budget: int = DEFAULT_MEMORY_BUDGET) -> CountTable:
    """Coefficients of x^n y^j in prod_{i^k <= mu} 1/(1 - x^(i^k) y), truncated.

    Each factor is expanded as the geometric series sum_t x^(t s) y^t and
    multiplied into the running product; coefficients are Python integers.
    """
    if k < 1 or j_max < 0 or n_max < 0:
        raise DomainError(f"invalid series request k={k}, j_max={j_max}, n_max={n_max}")
    need = (j_max + 1) * (n_max + 1) * 8
    if need > memory_budget:
        raise ResourceBudgetError(f"series table needs {need} bytes, budget is {memory_budget}")
    limit = n_max if mu is None else min(mu, n_max)
    coeff = np.zeros((j_max + 1, n_max + 1), dtype=object)
    coeff[0, 0] = 1
    i = 1
    while i**k <= limit:
        s = i**k
        product = np.zeros_like(coeff)
        t = 0
        while t <= j_max and t * s <= n_max:
            # multiply by the single term x^(t s) y^t
            product[t:, t * s:] += coeff[: j_max + 1 - t, : n_max + 1 - t * s]
            t += 1
        coeff = product
        i += 1
    cells = np.array(coeff, dtype=object)
    if any(v > EXACT_LIMIT for v in cells.flat):
        raise ArithmeticOverflowError(n_max, j_max, "series coefficient exceeds the exact limit")
    cells = cells.astype(np.uint64)
    cells.setflags(write=False)
    return CountTable(k=k, n_max=n_max, j_max=j_max, cap=None, cells=cells)
