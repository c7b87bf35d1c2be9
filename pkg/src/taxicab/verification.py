"""Named checks reproducing the published tables, theorems and OEIS values.

Each check returns a ``CheckResult``; a check that would exceed the memory
budget is reported as skipped rather than failed.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable

from .errors import ResourceBudgetError
from .partition_core import DEFAULT_MEMORY_BUDGET, PartitionQuery, count, count_row, iroot
from .square_representability import five_square_tail_threshold, is_sum_of_j_squares
from .taxicab_solver import (
    PROVED_ABSENT,
    certify_tail_nonexistence,
    decide_squares,
    mi_sequence,
    taxicab,
)

CASE1_TABLE = {2: 50, 3: 27, 4: 31, 5: 20, 6: 21, 7: 22, 8: 23, 9: 24, 10: 25}
CASE2_TABLE = {2: 325, 3: 54, 4: 28, 5: 29, 6: 30, 7: 31, 8: 35, 9: 49}
A025416_PREFIX = (4, 31, 28, 52, 82, 90, 135, 130, 162, 198, 202, 252, 234, 210)
COMPLEMENT_PREFIX = (3, 11, 17, 23, 32, 34, 35, 36, 38, 41, 43, 45, 46, 47, 49)
TA_TOTALS = (2, 1729, 87539319, 6963472309248, 48988659276962496, 24153319581254312065344)
# m < 150 entries of the extended six- and seven-square nonexistence lists
SIX_SQUARE_ABSENT = (70, 82, 99, 116, 124, 126, 139, 140, 147)
SEVEN_SQUARE_ABSENT = (47, 59, 63, 67, 74, 81, 90, 97, 105, 106, 108, 110, 111, 112, 119, 120,
                       122, 125, 126, 131, 132, 140, 142, 143, 148)

PASS = "pass"
FAIL = "fail"
SKIPPED = "skipped(budget)"


@dataclass
class CheckResult:
    name: str
    status: str
    bound: object
    detail: str
    seconds: float = 0.0

    def as_record(self) -> dict:
        return {"check": self.name, "status": self.status, "bound": self.bound,
                "detail": self.detail, "seconds": round(self.seconds, 3)}


def two_cube_representations(n: int) -> int:
    """Number of a <= b with a^3 + b^3 = n (two-pointer walk, exact integers)."""
    a, b = 1, iroot(n, 3)
    found = 0
    while a <= b:
        s = a**3 + b**3
        if s == n:
            found += 1
            a += 1
            b -= 1
        elif s < n:
            a += 1
        else:
            b -= 1
    return found


def check_case_tables(budget):
    got2 = {j: taxicab(2, j, 2, 10**4, memory_budget=budget).n for j in CASE1_TABLE}
    got3 = {j: taxicab(2, j, 3, 10**4, memory_budget=budget).n for j in CASE2_TABLE}
    ok = got2 == CASE1_TABLE and got3 == CASE2_TABLE
    return ok, 10**4, f"m=2: {list(got2.values())}; m=3: {list(got3.values())}"


def check_three_ways(budget):
    outs = [decide_squares(j, 3, budget) for j in (10, 11, 12)]
    cert = certify_tail_nonexistence(3, 10, memory_budget=budget)
    ok = all(o.status == PROVED_ABSENT for o in outs) and [o.bound_used for o in outs] == [2916, 3364, 3844]
    ok = ok and cert is not None and cert.j_cert == 12 and cert.t == 50
    detail = f"bounds {[o.bound_used for o in outs]}; certificate J''={cert and cert.j_cert}, t={cert and cert.t}"
    return ok, 3844, detail


def check_five_square_188(budget):
    out = taxicab(2, 5, 188, 10**6, cap=190, memory_budget=budget)
    tail = five_square_tail_threshold()
    ok = out.n is None and (tail.threshold, tail.guaranteed_ways) == (921681, 189)
    return ok, 10**6, f"scan {out.status}; tail threshold {tail.threshold}, ways {tail.guaranteed_ways}"


def check_five_square_zero(budget):
    largest = max(n for n in range(1, 2001) if not is_sum_of_j_squares(n, 5))
    ok = largest == 33 and count(PartitionQuery(2, 33, 5)) == 0
    return ok, 2000, f"largest non-representable by five squares: {largest}"


def check_decide(j, m):
    def run(budget):
        out = decide_squares(j, m, budget)
        return out.status == PROVED_ABSENT, out.bound_used, f"{out.status} [{out.provenance}]"
    return run


def check_decide_list(j, ms):
    def run(budget):
        outs = [decide_squares(j, m, budget) for m in ms]
        bad = [o.m for o in outs if o.status != PROVED_ABSENT]
        return not bad, max(o.bound_used for o in outs), f"{len(ms)} values, not proved: {bad}"
    return run


def check_a025416(budget):
    table = count_row(2, 4, 1000, cap=15, memory_budget=budget)
    got = tuple(taxicab(2, 4, m, 1000, table=table).n for m in range(1, 15))
    return got == A025416_PREFIX, 1000, f"{got}"


def check_complement(budget):
    seq = mi_sequence(2, 50, 40, memory_budget=budget)
    ok = tuple(seq.complement) == COMPLEMENT_PREFIX and not seq.undetermined
    return ok, "m<=50, j<=40", f"complement {seq.complement}; undetermined {seq.undetermined}"


def check_small_powers(budget):
    got = (taxicab(3, 2, 2, 2000).n, taxicab(3, 2, 3, 10**8).n, taxicab(4, 2, 2, 10**9).n)
    return got == (1729, 87539319, 635318657), 10**9, f"{got}"


def check_ta_totals(upto):
    def run(budget):
        counts = [two_cube_representations(n) for n in TA_TOTALS[:upto]]
        return counts == list(range(1, upto + 1)), TA_TOTALS[upto - 1], f"two-cube counts {counts}"
    return run


def suite(budget_name: str = "desk") -> list[tuple[str, Callable]]:
    checks = [
        ("tables-case1-case2", check_case_tables),
        ("thm-three-ways", check_three_ways),
        ("A080673-zero", check_five_square_zero),
        ("A080673-188", check_five_square_188),
        ("A295702-36", check_decide(6, 36)),
        ("A295795-44", check_decide(7, 44)),
        ("A025416-prefix", check_a025416),
        ("complement-prefix", check_complement),
        ("small-power-taxicabs", check_small_powers),
        ("taxicab-totals", check_ta_totals(5)),
    ]
    if budget_name == "full":
        checks += [
            ("taxicab-totals-6", check_ta_totals(6)),
            ("A295702-list", check_decide_list(6, SIX_SQUARE_ABSENT)),
            ("A295795-list", check_decide_list(7, SEVEN_SQUARE_ABSENT)),
        ]
    return checks


def run_suite(budget_name: str = "desk", memory_budget: int = DEFAULT_MEMORY_BUDGET, only=None):
    for name, fn in suite(budget_name):
        if only and name not in only:
            continue
        t0 = time.perf_counter()
        try:
            ok, bound, detail = fn(memory_budget)
            status = PASS if ok else FAIL
        except ResourceBudgetError as exc:
            status, bound, detail = SKIPPED, None, str(exc)
        yield CheckResult(name, status, bound, detail, time.perf_counter() - t0)
