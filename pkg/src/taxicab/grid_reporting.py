"""Existence grids over (j, m), their PBM/CSV artifacts, boundaries and curve fits."""

from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import ConfigurationError, DomainError, FitError
from .partition_core import DEFAULT_MEMORY_BUDGET
from .square_representability import CERTIFIED, EMPIRICAL
from .taxicab_solver import (
    EVENTUAL_ABSENCE,
    EVENTUAL_INCREMENT,
    BoundPolicy,
    ColumnClassification,
    ColumnScanner,
    MiSequence,
)

EXISTS = "exists"
ABSENT = "absent"
UNDETERMINED = "undetermined"


@dataclass(frozen=True)
class Cell:
    status: str
    n: Optional[int]
    provenance: str


@dataclass
class ExistenceGrid:
    k: int
    j_range: tuple[int, int]
    m_range: tuple[int, int]
    cells: dict = field(default_factory=dict)

    @property
    def js(self) -> range:
        return range(self.j_range[0], self.j_range[1] + 1)

    @property
    def ms(self) -> range:
        return range(self.m_range[0], self.m_range[1] + 1)

    def __getitem__(self, jm: tuple[int, int]) -> Cell:
        return self.cells[jm]

    def has_undetermined(self) -> bool:
        return any(c.status == UNDETERMINED for c in self.cells.values())


def parse_range(text: str) -> tuple[int, int]:
    """'7..30' -> (7, 30); a bare integer is a one-element range."""
    lo, sep, hi = text.partition("..")
    try:
        r = (int(lo), int(hi)) if sep else (int(lo), int(lo))
    except ValueError:
        raise ConfigurationError(f"bad range {text!r}") from None
    if r[0] > r[1]:
        raise ConfigurationError(f"empty range {text!r}")
    return r


def _column(scanner: ColumnScanner, j: int, ms: Iterable[int]) -> list[tuple[tuple[int, int], Cell]]:
    out = []
    for m in ms:
        st = scanner.row_status(j, m)
        if st.found is not None:
            cell = Cell(EXISTS, st.found, CERTIFIED)
        elif st.proof is not None:
            cell = Cell(ABSENT, None, st.proof)
        elif scanner.k != 2 and scanner.covers_policy(j, m):
            cell = Cell(ABSENT, None, EMPIRICAL)
        else:
            cell = Cell(UNDETERMINED, None, EMPIRICAL)
        out.append(((j, m), cell))
    return out


def build_grid(k: int, j_range: tuple[int, int], m_range: tuple[int, int],
               policy: Optional[BoundPolicy] = None, workers: int = 1,
               memory_budget: int = DEFAULT_MEMORY_BUDGET, scanner: Optional[ColumnScanner] = None) -> ExistenceGrid:
    """Fill every (j, m) cell from one set of shared tables, one task per column."""
    if j_range[0] < 1 or m_range[0] < 1 or j_range[0] > j_range[1] or m_range[0] > m_range[1]:
        raise DomainError(f"bad ranges j={j_range} m={m_range}")
    if scanner is None:
        scanner = ColumnScanner(k, m_range[1], j_range[1], policy, memory_budget)
    grid = ExistenceGrid(k, j_range, m_range)
    ms = list(grid.ms)
    js = list(grid.js)
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            columns = list(pool.map(lambda j: _column(scanner, j, ms), js))
    else:
        columns = [_column(scanner, j, ms) for j in js]
    for col in columns:
        grid.cells.update(col)
    return grid


def complement_from_grid(grid: ExistenceGrid) -> list[int]:
    """m whose cell in the last column is absent."""
    j = grid.j_range[1]
    return [m for m in grid.ms if grid[j, m].status == ABSENT]


# ---------------------------------------------------------------------------
# PBM
# ---------------------------------------------------------------------------

def pbm_text(grid: ExistenceGrid, undetermined: Optional[str] = None) -> str:
    """Plain PBM: j left to right, m top to bottom, black = absent."""
    if undetermined not in (None, "white", "black"):
        raise ConfigurationError("undetermined must be 'white' or 'black'")
    if grid.has_undetermined() and undetermined is None:
        raise ConfigurationError("grid has undetermined cells; choose how to render them")
    pixel = {EXISTS: "0", ABSENT: "1", UNDETERMINED: "1" if undetermined == "black" else "0"}
    lines = ["P1"]
    if undetermined is not None:
        lines.append(f"# undetermined={undetermined}")
    lines.append(f"{len(grid.js)} {len(grid.ms)}")
    for m in grid.ms:
        lines.append(" ".join(pixel[grid[j, m].status] for j in grid.js))
    return "\n".join(lines) + "\n"


def emit_pbm(grid: ExistenceGrid, destination, undetermined: Optional[str] = None) -> None:
    text = pbm_text(grid, undetermined)
    with open(destination, "w", newline="\n") as fh:
        fh.write(text)


def read_pbm(path) -> np.ndarray:
    return parse_pbm(Path(path).read_text())


def parse_pbm(text: str) -> np.ndarray:
    """Parse plain P1 text into a (height, width) array of 0/1."""
    tokens = []
    for line in text.splitlines():
        line = line.split("#", 1)[0]
        tokens.extend(line.split())
    if not tokens or tokens[0] != "P1":
        raise ValueError("not a plain PBM file")
    width, height = int(tokens[1]), int(tokens[2])
    bits = [int(t) for t in tokens[3:]]
    if len(bits) != width * height:
        raise ValueError(f"expected {width * height} pixels, found {len(bits)}")
    return np.array(bits, dtype=np.uint8).reshape(height, width)


# ---------------------------------------------------------------------------
# CSV
# ---------------------------------------------------------------------------

GRID_HEADER = ["k", "j", "m", "status", "n", "provenance"]
BOUNDARY_HEADER = ["m", "J", "provenance"]
SEQUENCE_HEADER = ["m", "classification", "J"]


def _write_rows(destination, header, rows) -> None:
    with open(destination, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def grid_rows(grid: ExistenceGrid):
    for j in grid.js:
        for m in grid.ms:
            c = grid[j, m]
            yield [grid.k, j, m, c.status, "" if c.n is None else c.n, c.provenance]


def emit_csv(obj, destination) -> None:
    """Write a grid, boundary or m_i sequence as CSV (j-major for grids, ascending m otherwise)."""
    if isinstance(obj, ExistenceGrid):
        _write_rows(destination, GRID_HEADER, grid_rows(obj))
    elif isinstance(obj, BoundaryFunction):
        _write_rows(destination, BOUNDARY_HEADER, ([m, J, p] for m, J, p in obj.points))
    elif isinstance(obj, MiSequence):
        rows = ([c.m, c.verdict, c.J] for c in sorted(obj.columns, key=lambda c: c.m))
        _write_rows(destination, SEQUENCE_HEADER, rows)
    else:
        raise TypeError(f"cannot write {type(obj).__name__} as CSV")


# ---------------------------------------------------------------------------
# boundary
# ---------------------------------------------------------------------------

@dataclass
class BoundaryFunction:
    k: int
    points: list  # (m, J, provenance), ascending m

    def xy(self) -> tuple[np.ndarray, np.ndarray]:
        return (np.array([p[0] for p in self.points], dtype=float),
                np.array([p[1] for p in self.points], dtype=float))


def extract_boundary(grid: ExistenceGrid, classifications: Sequence[ColumnClassification]) -> BoundaryFunction:
    """J(m) per column: the certified onset where there is one, else the observed onset (flagged)."""
    by_m = {c.m: c for c in classifications}
    missing = [m for m in grid.ms if m not in by_m]
    if missing:
        raise DomainError(f"no classification for m={missing[:5]}")
    points = []
    for m in grid.ms:
        c = by_m[m]
        if c.verdict in (EVENTUAL_INCREMENT, EVENTUAL_ABSENCE) and c.certificate is not None and c.onset_exact:
            points.append((m, c.J, c.provenance))
        else:
            points.append((m, _observed_onset(grid, m), EMPIRICAL + "-observed"))
    return BoundaryFunction(grid.k, points)


def _observed_onset(grid: ExistenceGrid, m: int) -> int:
    # smallest J from which the row's pattern (all absent, or n rising by one) persists to the grid edge
    js = list(grid.js)
    J = js[-1]
    last = grid[J, m]
    for j in reversed(js[:-1]):
        c = grid[j, m]
        if last.status == ABSENT and c.status == ABSENT:
            J = j
        elif last.status == EXISTS and c.status == EXISTS and grid[J, m].n - c.n == J - j:
            J = j
        else:
            break
    return J


# ---------------------------------------------------------------------------
# fitting
# ---------------------------------------------------------------------------

EXPONENTIAL = "exponential"
ROOT_AFFINE = "root-affine"


@dataclass(frozen=True)
class FitResult:
    family: str
    a: float
    b: float
    residual: float
    r: Optional[float] = None

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.family == EXPONENTIAL:
            return self.a * np.exp(self.b * x)
        return self.a * x ** (1.0 / self.r) + self.b


def _lstsq(design: np.ndarray, y: np.ndarray) -> np.ndarray:
    if np.ptp(design[:, 0]) == 0:
        raise FitError("degenerate design: all abscissae map to the same value")
    coef, _, rank, _ = np.linalg.lstsq(design, y, rcond=None)
    if rank < design.shape[1]:
        raise FitError("degenerate design matrix")
    return coef


def fit(xs, ys, family: str, r: Optional[float] = None) -> FitResult:
    """Ordinary least squares for a*exp(b x) (in log space) or a*x^(1/r) + b.

    The residual is always the sum of squared errors in the original scale.
    """
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise FitError("x and y must be equal-length 1-d sequences")
    if x.size < 2:
        raise FitError("need at least two points")
    if family == EXPONENTIAL:
        if np.any(y <= 0):
            raise DomainError("exponential fit needs positive ordinates")
        slope, intercept = _lstsq(np.column_stack([x, np.ones_like(x)]), np.log(y))
        result = FitResult(EXPONENTIAL, math.exp(intercept), float(slope), 0.0)
    elif family == ROOT_AFFINE:
        if r is None or r < 1:
            raise DomainError("root-affine fit needs r >= 1")
        if np.any(x <= 0):
            raise DomainError("root-affine fit needs positive abscissae")
        a, b = _lstsq(np.column_stack([x ** (1.0 / r), np.ones_like(x)]), y)
        result = FitResult(ROOT_AFFINE, float(a), float(b), 0.0, float(r))
    else:
        raise DomainError(f"unknown family {family!r}")
    residual = float(np.sum((result(x) - y) ** 2))
    return FitResult(result.family, result.a, result.b, residual, result.r)


def residual_of(family: str, a: float, b: float, xs, ys, r: Optional[float] = None) -> float:
    """Sum of squared errors of fixed parameters, e.g. published constants."""
    model = FitResult(family, a, b, 0.0, r)
    x = np.asarray(xs, dtype=float)
    return float(np.sum((model(x) - np.asarray(ys, dtype=float)) ** 2))


# constants quoted for the boundary curves and the m_i growth
PUBLISHED_CURVES = {
    "c": (EXPONENTIAL, 17.5603, -0.0327825, None),
    "g2": (ROOT_AFFINE, 45.06, -44.7873, 8),
    "g3": (ROOT_AFFINE, 15.8278, 12.0661, 3),
    "g4": (ROOT_AFFINE, 43.106, -28.3045, 4),
}
