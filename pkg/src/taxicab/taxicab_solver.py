"""Searching for Taxicab(k, j, m) and certifying how each column ends.

Taxicab(k, j, m) is the least n with p^k(n, j) = m.  For a fixed m the column
either locks into n -> n + 1 as j grows (an increment tail) or stops having
solutions (an absence tail).  Both tails come with machine-checkable
certificates; only squares have a proven search ceiling.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import CertificationError, DomainError
from .partition_core import (
    DEFAULT_MEMORY_BUDGET,
    CountTable,
    PartitionQuery,
    check_cap,
    count,
    count_row,
    iroot,
)
from .square_representability import (
    CERTIFIED,
    EMPIRICAL,
    EXTENDED,
    bound_provenance,
    search_bound_squares,
)

log = logging.getLogger(__name__)

FOUND = "found"
PROVED_ABSENT = "proved-absent"
ABSENT_UP_TO = "absent-up-to"

# Smallest part count whose search ceiling is proven; absence floors for
# larger j are chained down to this row.
BASE_ROW = 7
DEFAULT_DESK_LIMIT = 2_000_000


@dataclass(frozen=True)
class BoundPolicy:
    """Per-(j, m) search ceilings.

    ``certified``: (mj + j + 14)^2, squares only.
    ``conjectural``: (mj + j + constant)^k, never a proof.
    ``fixed``: the same user bound everywhere.
    """

    kind: str = "certified"
    constant: int = 150
    fixed: Optional[int] = None

    def __post_init__(self):
        if self.kind not in ("certified", "conjectural", "fixed"):
            raise DomainError(f"unknown bound policy {self.kind!r}")
        if self.kind == "fixed" and (self.fixed is None or self.fixed < 1):
            raise DomainError("fixed policy needs a positive bound")

    @classmethod
    def auto(cls, k: int, constant: int = 150) -> "BoundPolicy":
        return cls("certified") if k == 2 else cls("conjectural", constant)

    def bound(self, k: int, j: int, m: int) -> int:
        if self.kind == "fixed":
            return self.fixed
        if self.kind == "certified":
            if k != 2:
                raise DomainError("the certified bound exists only for squares")
            return search_bound_squares(max(m, 2), max(j, 5), allow_extended=True)
        return (m * j + j + self.constant) ** k


@dataclass(frozen=True)
class TaxicabOutcome:
    k: int
    j: int
    m: int
    status: str
    n: Optional[int]
    bound_used: int
    provenance: str

    @property
    def found(self) -> bool:
        return self.status == FOUND

    def as_record(self) -> dict:
        return {
            "k": self.k, "j": self.j, "m": self.m, "status": self.status,
            "n": self.n, "bound_used": self.bound_used, "provenance": self.provenance,
        }


def _absence_outcome(k, j, m, bound) -> TaxicabOutcome:
    if k == 2 and m >= 2 and j >= 5 and bound >= search_bound_squares(m, j, allow_extended=True):
        return TaxicabOutcome(k, j, m, PROVED_ABSENT, None, bound, bound_provenance(j))
    return TaxicabOutcome(k, j, m, ABSENT_UP_TO, None, bound, EMPIRICAL)


def pair_counts(k: int, bound: int) -> tuple[np.ndarray, np.ndarray]:
    """Sorted sums a^k + b^k <= bound (1 <= a <= b) with their multiplicities."""
    chunks = []
    a = 1
    while 2 * a**k <= bound:
        b_hi = iroot(bound - a**k, k)
        b = np.arange(a, b_hi + 1, dtype=object if bound > 2**62 else np.int64)
        chunks.append(b**k + a**k)
        a += 1
    if not chunks:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    sums = np.concatenate(chunks)
    return np.unique(sums, return_counts=True)


def _first_hit(row: np.ndarray, m: int, at_least: bool, hi: int) -> Optional[int]:
    view = row[: hi + 1]
    hits = np.flatnonzero(view >= m) if at_least else np.flatnonzero(view == m)
    return int(hits[0]) if hits.size else None


def taxicab(k: int, j: int, m: int, bound: int, *, at_least: bool = False,
            cap: Optional[int] = None, memory_budget: int = DEFAULT_MEMORY_BUDGET,
            table: Optional[CountTable] = None) -> TaxicabOutcome:
    """Least n in [j, bound] with p^k(n, j) == m (>= m with ``at_least``).

    An empty scan is upgraded to a proof when k = 2 and the bound reaches
    (mj + j + 14)^2.
    """
    if k < 1 or j < 1 or m < 1 or bound < j:
        raise DomainError(f"invalid taxicab query k={k}, j={j}, m={m}, bound={bound}")
    cap = m + 1 if cap is None else cap
    check_cap(cap, m)
    if j == 1 and m >= 2:
        return TaxicabOutcome(k, j, m, ABSENT_UP_TO, None, bound, EMPIRICAL)
    if table is not None and table.k == k and table.j_max >= j and table.n_max >= bound:
        if table.cap is not None:
            check_cap(table.cap, m)
        n = _first_hit(table.row(j), m, at_least, bound)
    elif j == 2:
        sums, counts = pair_counts(k, bound)
        mask = counts >= m if at_least else counts == m
        n = int(sums[mask][0]) if mask.any() else None
    else:
        table = count_row(k, j, bound, cap, memory_budget)
        n = _first_hit(table.row(j), m, at_least, bound)
    if n is not None:
        return TaxicabOutcome(k, j, m, FOUND, n, bound, CERTIFIED)
    if at_least:
        return TaxicabOutcome(k, j, m, ABSENT_UP_TO, None, bound, EMPIRICAL)
    return _absence_outcome(k, j, m, bound)


def taxicab_at_least(k: int, j: int, m: int, bound: int, **kw) -> TaxicabOutcome:
    return taxicab(k, j, m, bound, at_least=True, **kw)


def decide_squares(j: int, m: int, memory_budget: int = DEFAULT_MEMORY_BUDGET) -> TaxicabOutcome:
    """Settle Taxicab(2, j, m) by searching to (mj + j + 14)^2."""
    bound = search_bound_squares(m, j, allow_extended=True)
    return taxicab(2, j, m, bound, memory_budget=memory_budget)


# ---------------------------------------------------------------------------
# certificates
# ---------------------------------------------------------------------------

INCREMENT = "increment"
NONEXISTENCE = "nonexistence"


@dataclass
class TailCertificate:
    kind: str
    k: int
    m: int
    j_start: int
    # increment: the hit n0 at j_start; nonexistence: the row J'' and floor t
    n0: Optional[int] = None
    j_cert: Optional[int] = None
    t: Optional[int] = None
    provenance: str = CERTIFIED
    bounds: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)

    def predict(self, j: int) -> Optional[int]:
        """Taxicab(k, j, m) implied for j >= j_start (None means no solution)."""
        if j < self.j_start:
            raise DomainError(f"certificate covers j >= {self.j_start}")
        return None if self.kind == NONEXISTENCE else self.n0 + (j - self.j_start)

    def to_record(self) -> str:
        lines = [f"certificate {self.kind}"]
        for key in ("k", "m", "j_start", "n0", "j_cert", "t", "provenance"):
            value = getattr(self, key)
            if value is not None:
                lines.append(f"{key}={value}")
        for key in sorted(self.bounds):
            lines.append(f"bound {key}={self.bounds[key]}")
        lines.extend(f"check {c}" for c in self.checks)
        lines.append("end")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_record(cls, text: str) -> "TailCertificate":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines or not lines[0].startswith("certificate ") or lines[-1] != "end":
            raise CertificationError("malformed certificate record")
        fields = {"kind": lines[0].split(" ", 1)[1], "bounds": {}, "checks": []}
        for ln in lines[1:-1]:
            if ln.startswith("bound "):
                key, value = ln[6:].split("=", 1)
                fields["bounds"][key] = int(value)
            elif ln.startswith("check "):
                fields["checks"].append(ln[6:])
            else:
                key, value = ln.split("=", 1)
                fields[key] = value if key == "provenance" else int(value)
        return cls(**fields)


def certify_tail_increment(k: int, j0: int, m: int, n0: Optional[int] = None,
                           memory_budget: int = DEFAULT_MEMORY_BUDGET) -> Optional[TailCertificate]:
    """Certificate that Taxicab(k, j, m) = n0 + (j - j0) for every j >= j0, or None.

    Needs n0 + 1 < 2^k (j0 + 1).  Then for every later j all n up to the
    predicted value sit below 2^k j, where each representation carries a 1 and
    p^k(n, j) = p^k(n - 1, j - 1); hit and minimality both transfer.
    """
    ceiling = 2**k * (j0 + 1) - 2
    if n0 is None:
        if ceiling < j0:
            return None
        found = taxicab(k, j0, m, ceiling, memory_budget=memory_budget)
        if not found.found:
            return None
        n0 = found.n
    if n0 + 1 >= 2**k * (j0 + 1):
        return None
    # re-verify the hit and its minimality directly
    table = count_row(k, j0, n0, cap=m + 1, memory_budget=memory_budget)
    row = table.row(j0)
    if int(row[n0]) != m:
        raise CertificationError(f"p^{k}({n0}, {j0}) != {m}")
    earlier = np.flatnonzero(row[:n0] == m)
    if earlier.size:
        raise CertificationError(f"n0={n0} is not minimal: {int(earlier[0])} also has {m} representations")
    return TailCertificate(
        INCREMENT, k, m, j0, n0=n0,
        provenance=CERTIFIED if k == 2 else EMPIRICAL,
        bounds={"scanned_to": n0},
        checks=[
            f"p^{k}({n0},{j0}) = {m}",
            f"no n < {n0} has p^{k}(n,{j0}) = {m}",
            f"{n0} + 1 < 2^{k}*({j0}+1) = {2**k * (j0 + 1)}",
        ],
    )


@dataclass(frozen=True)
class RowStatus:
    j: int
    m: int
    found: Optional[int]
    # certified / hypothesis-extended when absence (and the floor) is proven
    proof: Optional[str]
    # every n >= floor has >= m + 1 representations (observed only, if proof is None)
    floor: Optional[int]
    searched_to: int


class ColumnScanner:
    """Shared count tables for scanning many (j, m) cells at once.

    For squares under the certified policy two saturating tables are built:
    rows 0..7 up to (7 m_max + 21)^2, where row 7 is checked exhaustively up
    to its proven ceiling, and rows 0..j_limit up to just past the largest
    floor.  A row j >= 7 inherits the floor of row 7 shifted by j - 7, since
    p^2(n, j) >= p^2(n - 1, j - 1).  Tables are read-only once built.
    """

    def __init__(self, k: int, m_max: int, j_limit: int, policy: Optional[BoundPolicy] = None,
                 memory_budget: int = DEFAULT_MEMORY_BUDGET, n_limit: int = DEFAULT_DESK_LIMIT):
        if m_max < 1 or j_limit < 1:
            raise DomainError("need m_max >= 1 and j_limit >= 1")
        self.k = k
        self.m_max = m_max
        self.j_limit = j_limit
        self.policy = policy or BoundPolicy.auto(k)
        self.cap = m_max + 1
        self.certified = k == 2 and self.policy.kind == "certified"
        if self.certified:
            self.base_n = search_bound_squares(max(m_max, 2), BASE_ROW)
            self.base = count_row(2, BASE_ROW, self.base_n, self.cap, memory_budget)
            row = self.base.row(BASE_ROW)
            # 1 + last n with at most m representations, for each m
            self.base_floor = {}
            for m in range(1, m_max + 1):
                low = np.flatnonzero(row <= m)
                self.base_floor[m] = int(low[-1]) + 1
            self.wide_n = max(self.base_floor.values()) + max(j_limit - BASE_ROW, 0) + 1
            self.wide = count_row(2, max(j_limit, BASE_ROW), self.wide_n, self.cap, memory_budget)
        else:
            top = max(self.policy.bound(k, j, m) for j in (1, j_limit) for m in (1, m_max))
            self.n_max = min(top, n_limit)
            self.table = count_row(k, j_limit, self.n_max, self.cap, memory_budget)

    def row_status(self, j: int, m: int) -> RowStatus:
        if not 1 <= j <= self.j_limit or not 1 <= m <= self.m_max:
            raise DomainError(f"(j={j}, m={m}) outside scanner range")
        if self.certified:
            if j >= BASE_ROW:
                top = self.base_floor[m] + (j - BASE_ROW) - 1
                row = self.wide.row(j)
                proof = CERTIFIED
            elif j >= 5 and m >= 2:
                top = search_bound_squares(m, j, allow_extended=True)
                row = self.base.row(j)
                proof = EXTENDED
            else:
                row = self.base.row(j)
                found = _first_hit(row, m, False, self.base_n)
                return RowStatus(j, m, found, None, None, self.base_n)
            found = _first_hit(row, m, False, top)
            low = np.flatnonzero(row[: top + 1] <= m)
            floor = int(low[-1]) + 1 if low.size else 0
            return RowStatus(j, m, found, proof if found is None else None, floor, top)
        row = self.table.row(j)
        found = _first_hit(row, m, False, self.n_max)
        low = np.flatnonzero(row <= m)
        floor = int(low[-1]) + 1 if low.size else 0
        proof = None
        if found is None and self.k == 2 and j >= 5 and m >= 2 and \
                self.n_max >= search_bound_squares(m, j, allow_extended=True):
            proof = bound_provenance(j)
        return RowStatus(j, m, found, proof, floor if floor <= self.n_max else None, self.n_max)

    def covers_policy(self, j: int, m: int) -> bool:
        if self.certified:
            return True
        return self.n_max >= self.policy.bound(self.k, j, m)


def _nonexistence_certificate(scanner: ColumnScanner, m: int, j_start: int, j_cert: int,
                              statuses: dict) -> TailCertificate:
    cert_row = statuses[j_cert]
    provenance = CERTIFIED if all(statuses[j].proof == CERTIFIED for j in range(j_start, j_cert + 1)) else EXTENDED
    checks = []
    bounds = {
        "base_row": BASE_ROW,
        "base_searched_to": scanner.base_n,
        "base_ceiling": search_bound_squares(max(m, 2), BASE_ROW),
        "base_floor": scanner.base_floor[m],
    }
    checks.append(
        f"p^2(n,{BASE_ROW}) >= {m + 1} for {scanner.base_floor[m]} <= n <= {scanner.base_n} (table) "
        f"and beyond {bounds['base_ceiling']} (search ceiling)"
    )
    for j in range(j_start, j_cert + 1):
        st = statuses[j]
        checks.append(f"row {j}: no n <= {st.searched_to} has p^2(n,{j}) = {m}; "
                      f"p^2(n,{j}) >= {m + 1} for n >= {st.floor} [{st.proof}]")
    t = cert_row.floor
    checks.append(f"t = {t} <= 4*{j_cert}+3 = {4 * j_cert + 3}")
    return TailCertificate(NONEXISTENCE, 2, m, j_start, j_cert=j_cert, t=t,
                           provenance=provenance, bounds=bounds, checks=checks)


def certify_tail_nonexistence(m: int, j_start: int, j_search: int = 64, scanner: Optional[ColumnScanner] = None,
                              memory_budget: int = DEFAULT_MEMORY_BUDGET) -> Optional[TailCertificate]:
    """Certificate that Taxicab(2, j, m) has no solution for any j >= j_start, or None.

    Looks for a row J'' >= j_start with no hit whose floor t (every n >= t has
    at least m + 1 representations) satisfies t <= 4 J'' + 3.  Beyond J'' an n
    either chains down, one 1^2 at a time, to some n' < t in row J'' (all steps
    stay below 4j), or to n' >= t where the count only grew.  Rows between
    j_start and J'' are proven empty individually.
    """
    if m < 2:
        raise DomainError("nonexistence tails need m >= 2")
    if j_start < 5:
        return None
    j_limit = j_start + j_search
    if scanner is None or scanner.j_limit < j_limit or scanner.m_max < m or not scanner.certified:
        scanner = ColumnScanner(2, m, j_limit, BoundPolicy("certified"), memory_budget)
    statuses = {}
    for j in range(j_start, j_limit + 1):
        st = scanner.row_status(j, m)
        statuses[j] = st
        if st.found is not None or st.proof is None:
            return None
        if st.floor <= 4 * j + 3:
            return _nonexistence_certificate(scanner, m, j_start, j, statuses)
    return None


# ---------------------------------------------------------------------------
# column classification
# ---------------------------------------------------------------------------

EVENTUAL_INCREMENT = "eventual-increment"
EVENTUAL_ABSENCE = "eventual-absence"
UNDETERMINED = "undetermined"


@dataclass
class ColumnClassification:
    k: int
    m: int
    verdict: str
    # onset J of the tail, or the last j scanned when undetermined
    J: int
    provenance: str
    certificate: Optional[TailCertificate] = None
    onset_exact: bool = True
    values: dict = field(default_factory=dict)


def classify_column(k: int, m: int, j_limit: int, policy: Optional[BoundPolicy] = None,
                    scanner: Optional[ColumnScanner] = None) -> ColumnClassification:
    """Scan j = 1..j_limit and return the first tail that can be certified."""
    if j_limit < 2:
        raise DomainError("j_limit must be >= 2")
    if scanner is None:
        scanner = ColumnScanner(k, m, j_limit, policy)
    statuses = {}
    values = {}
    for j in range(1, j_limit + 1):
        st = scanner.row_status(j, m)
        statuses[j] = st
        values[j] = st.found
        if st.found is not None:
            if st.found + 1 < 2**k * (j + 1):
                onset = j
                while onset > 1 and values.get(onset - 1) is not None and values[onset - 1] + 1 == values[onset]:
                    onset -= 1
                cert = TailCertificate(
                    INCREMENT, k, m, j, n0=st.found,
                    provenance=CERTIFIED if scanner.certified else EMPIRICAL,
                    bounds={"scanned_to": st.found},
                    checks=[f"p^{k}({st.found},{j}) = {m} first hit",
                            f"{st.found} + 1 < 2^{k}*({j}+1) = {2**k * (j + 1)}"],
                )
                prov = CERTIFIED if scanner.certified else EMPIRICAL
                return ColumnClassification(k, m, EVENTUAL_INCREMENT, onset, prov, cert, True, values)
            continue
        floor_ok = st.floor is not None and st.floor <= 2**k * (j + 1) - 1
        if scanner.certified:
            if st.proof is not None and floor_ok and m >= 2:
                onset = j
                while onset > 1 and statuses[onset - 1].proof is not None:
                    onset -= 1
                exact = onset == 1 or statuses[onset - 1].found is not None
                cert = _nonexistence_certificate(scanner, m, onset, j, statuses)
                return ColumnClassification(k, m, EVENTUAL_ABSENCE, onset, cert.provenance, cert, exact, values)
        elif floor_ok and st.floor * 2 <= scanner.n_max:
            onset = j
            while onset > 1 and statuses[onset - 1].found is None:
                onset -= 1
            return ColumnClassification(k, m, EVENTUAL_ABSENCE, onset, EMPIRICAL, None, False, values)
    return ColumnClassification(k, m, UNDETERMINED, j_limit, EMPIRICAL, None, False, values)


@dataclass
class MiSequence:
    k: int
    members: list
    complement: list
    undetermined: list
    columns: list


def mi_sequence(k: int, m_limit: int, j_limit: int, policy: Optional[BoundPolicy] = None,
                workers: int = 1, memory_budget: int = DEFAULT_MEMORY_BUDGET,
                scanner: Optional[ColumnScanner] = None) -> MiSequence:
    """Split m = 1..m_limit by how their columns end."""
    if scanner is None:
        scanner = ColumnScanner(k, m_limit, j_limit, policy, memory_budget)
    ms = range(1, m_limit + 1)
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            columns = list(pool.map(lambda m: classify_column(k, m, j_limit, scanner=scanner), ms))
    else:
        columns = [classify_column(k, m, j_limit, scanner=scanner) for m in ms]
    members = [c.m for c in columns if c.verdict == EVENTUAL_INCREMENT]
    complement = [c.m for c in columns if c.verdict == EVENTUAL_ABSENCE]
    undetermined = [c.m for c in columns if c.verdict == UNDETERMINED]
    return MiSequence(k, members, complement, undetermined, columns)


def recount(k: int, n: int, j: int) -> int:
    """Exact p^k(n, j) by the recurrence, for spot checks of scan results."""
    return count(PartitionQuery(k, n, j))
