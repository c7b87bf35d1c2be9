"""Closed-form tests for "n is a sum of exactly j positive squares".

For j >= 5 the non-representable integers are n <= j - 1 together with the
finite exceptional set j + B (B gains 28 when j = 5).  For j = 4 there are
three infinite families 2*4^a, 6*4^a, 14*4^a on top of a finite list.  The
search ceiling (mj + j + 14)^2 and the pigeonhole bound both rest on these.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import CertificationError, DomainError
from .partition_core import PartitionQuery, count

EXCEPTIONAL_B = frozenset({1, 2, 4, 5, 7, 10, 13})

FOUR_SQUARE_FINITE = frozenset({1, 2, 3} | {4 + b for b in EXCEPTIONAL_B | {25, 37}})
FOUR_SQUARE_FAMILIES = (2, 6, 14)

CERTIFIED = "certified"
EXTENDED = "hypothesis-extended"
EMPIRICAL = "empirical"


def in_four_square_family(n: int) -> bool:
    """True for n = 2*4^a, 6*4^a or 14*4^a."""
    while n % 4 == 0 and n > 0:
        n //= 4
    return n in FOUR_SQUARE_FAMILIES


def _has_few_squares(n: int, j: int) -> bool:
    # small j has no closed form here; ask the counter
    return count(PartitionQuery(2, n, j)) > 0


def is_sum_of_j_squares(n: int, j: int) -> bool:
    if n < 1 or j < 1:
        raise DomainError(f"need n >= 1 and j >= 1, got n={n}, j={j}")
    if n < j:
        return False
    if j >= 5:
        excluded = EXCEPTIONAL_B | {28} if j == 5 else EXCEPTIONAL_B
        return (n - j) not in excluded
    if j == 4:
        return n not in FOUR_SQUARE_FINITE and not in_four_square_family(n)
    if j == 1:
        return math.isqrt(n) ** 2 == n
    return _has_few_squares(n, j)


def four_square_exceptions_upto(limit: int) -> list[int]:
    return [n for n in range(1, limit + 1) if not is_sum_of_j_squares(n, 4)]


def bound_provenance(j: int) -> str:
    return CERTIFIED if j > 6 else EXTENDED


def search_bound_squares(m: int, j: int, allow_extended: bool = False) -> int:
    """(mj + j + 14)^2: past it every n has at least m + 1 representations.

    The guarantee is proven for j > 6.  ``allow_extended`` admits j = 5, 6,
    which is how the bound gets applied to the five- and six-square columns.
    """
    lowest = 5 if allow_extended else 7
    if j < lowest or m < 2:
        raise DomainError(f"search bound needs j >= {lowest} and m >= 2, got j={j}, m={m}")
    return (m * j + j + 14) ** 2


def decomposition_count(n: int, j: int) -> int:
    """#{x >= 1 : n - x^2 is a sum of j - 1 positive squares}."""
    if j < 5:
        raise DomainError("decomposition count needs j - 1 >= 4")
    total = 0
    x = 1
    while x * x <= n - (j - 1):
        if is_sum_of_j_squares(n - x * x, j - 1):
            total += 1
        x += 1
    return total


def pigeonhole_lower_bound(n: int, j: int) -> int:
    """Lower bound on p^2(n, j): a representation holds at most j distinct part values."""
    if n < 1:
        raise DomainError("n must be positive")
    d = decomposition_count(n, j)
    return -(-d // j)


@dataclass(frozen=True)
class FiveSquareTail:
    threshold: int
    guaranteed_ways: int
    window: int
    exceptions_bound: int
    checks: tuple[str, ...]


def _gamma_bound(n: int, window: int) -> float:
    return 3 * (math.log(n / 2, 4) - math.log((n - window) / 14, 4))


def five_square_tail_threshold() -> FiveSquareTail:
    """Re-derive: for n > 921681 there are at least 189 five-square representations.

    Every x <= 959 gives n - x^2 >= n - 919681 >= 2000; only members of the
    three four-square families can fail there, and at most 18 of them fit in
    the window, leaving 941 decompositions, each shared by at most 5 parts.
    """
    threshold, window = 921681, 919681
    checks = []

    def need(cond, text):
        if not cond:
            raise CertificationError(f"recheck failed: {text}")
        checks.append(text)

    root = math.isqrt(window)
    need(root * root == window and root == 959, f"isqrt({window}) = {root} = 959 exactly")
    need(threshold - window == 2000, "n - 919681 >= 2000 at the threshold")
    # only the families survive above 41
    need(all((not is_sum_of_j_squares(b, 4)) == in_four_square_family(b) for b in range(42, 2001)),
         "above 41 the four-square failures are exactly the 2/6/14*4^a families")
    gamma = _gamma_bound(threshold, window)
    need(gamma <= 18, f"gamma bound at {threshold} = {gamma:.4f} <= 18")
    # decreasing: derivative sign of log(n) - log(n - window) is negative
    need(_gamma_bound(threshold * 2, window) < gamma and _gamma_bound(10**12, window) < gamma,
         "gamma bound decreases in n")
    # rigorous per-family count: #{a : L < f*4^a <= n} <= floor(log4(n/L)) + 1, n/L maximal at the threshold
    per_family = math.floor(math.log(threshold / (threshold - window), 4)) + 1
    need(3 * per_family <= 18, f"family members in any window: <= 3 * {per_family} = {3 * per_family} <= 18")
    usable = math.floor(root - 18)
    need(usable == 941, f"floor(959 - 18) = {usable}")
    ways = -(-usable // 5)
    need(ways == 189, f"ceil(941 / 5) = {ways}")
    return FiveSquareTail(threshold, ways, window, 18, tuple(checks))


def family_members_in(lo: int, hi: int) -> list[int]:
    """Members of the three four-square families in (lo, hi]."""
    out = []
    for f in FOUR_SQUARE_FAMILIES:
        v = f
        while v <= hi:
            if v > lo:
                out.append(v)
            v *= 4
    return sorted(out)
