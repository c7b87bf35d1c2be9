import csv

import numpy as np
import pytest
from hypothesis import given, strategies as st

from taxicab.errors import ConfigurationError, DomainError, FitError
from taxicab.grid_reporting import (
    ABSENT,
    EXISTS,
    EXPONENTIAL,
    GRID_HEADER,
    PUBLISHED_CURVES,
    ROOT_AFFINE,
    UNDETERMINED,
    build_grid,
    complement_from_grid,
    emit_csv,
    emit_pbm,
    extract_boundary,
    fit,
    parse_pbm,
    parse_range,
    pbm_text,
    read_pbm,
    residual_of,
)
from taxicab.taxicab_solver import ColumnScanner, classify_column, mi_sequence

ONSETS = [1, 5, 10, 8, 10, 11, 13, 15, 15, 16, 16, 16, 17, 18, 18, 18, 19, 19, 20, 21, 21, 22, 23, 23, 22,
          23, 23, 24, 24, 24, 25, 25, 25, 20, 21, 25, 25, 26, 26, 27, 28, 26, 27, 27, 22, 23, 27, 27, 29, 29]


@pytest.fixture(scope="module")
def scanner():
    return ColumnScanner(2, 50, 40)


@pytest.fixture(scope="module")
def grid(scanner):
    return build_grid(2, (7, 30), (1, 50), scanner=scanner)


def test_parse_range():
    assert parse_range("7..30") == (7, 30)
    assert parse_range("5") == (5, 5)
    for bad in ("x..3", "9..2", ""):
        with pytest.raises(ConfigurationError):
            parse_range(bad)


def test_grid_cells_and_complement(grid):
    assert grid[10, 2].status == EXISTS and grid[10, 2].n == 25
    assert grid[10, 3].status == ABSENT
    assert not grid.has_undetermined()
    assert complement_from_grid(grid) == [3, 11, 17, 23, 32, 34, 35, 36, 38, 41, 43, 45, 46, 47, 49]


def test_pbm_layout(grid, tmp_path):
    text = pbm_text(grid)
    lines = text.splitlines()
    assert lines[0] == "P1" and lines[1] == "24 50"
    assert all(set(ln.split()) <= {"0", "1"} for ln in lines[2:])
    bits = parse_pbm(text)
    assert bits.shape == (50, 24)
    for (j, m), cell in grid.cells.items():
        assert bits[m - 1, j - 7] == (cell.status == ABSENT)
    emit_pbm(grid, tmp_path / "g.pbm")
    assert np.array_equal(read_pbm(tmp_path / "g.pbm"), bits)
    assert (tmp_path / "g.pbm").read_text() == text


def test_pbm_refuses_undetermined(scanner):
    small = build_grid(2, (1, 3), (1, 3), scanner=scanner)
    assert small.has_undetermined()
    with pytest.raises(ConfigurationError):
        pbm_text(small)
    black = parse_pbm(pbm_text(small, "black"))
    white = parse_pbm(pbm_text(small, "white"))
    for (j, m), cell in small.cells.items():
        if cell.status == UNDETERMINED:
            assert black[m - 1, j - 1] == 1 and white[m - 1, j - 1] == 0
    assert "# undetermined=black" in pbm_text(small, "black")


def test_grid_csv(grid, tmp_path):
    emit_csv(grid, tmp_path / "g.csv")
    with open(tmp_path / "g.csv", newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == GRID_HEADER
    assert len(rows) == 1 + 24 * 50
    assert rows[1][:4] == ["2", "7", "1", EXISTS]
    with pytest.raises(TypeError):
        emit_csv(object(), tmp_path / "x.csv")


def test_workers_give_identical_artifacts(scanner, tmp_path):
    a = build_grid(2, (7, 30), (1, 50), workers=1, scanner=scanner)
    b = build_grid(2, (7, 30), (1, 50), workers=6, scanner=scanner)
    emit_csv(a, tmp_path / "a.csv")
    emit_csv(b, tmp_path / "b.csv")
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    assert pbm_text(a) == pbm_text(b)


def test_bad_grid_ranges():
    with pytest.raises(DomainError):
        build_grid(2, (0, 3), (1, 3))


def test_boundary_matches_onsets(scanner):
    full = build_grid(2, (1, 40), (1, 50), scanner=scanner)
    cols = [classify_column(2, m, 40, scanner=scanner) for m in range(1, 51)]
    boundary = extract_boundary(full, cols)
    assert [p[1] for p in boundary.points] == ONSETS
    assert all(p[2] != "empirical-observed" for p in boundary.points)


def test_sequence_csv(tmp_path):
    seq = mi_sequence(2, 12, 30)
    emit_csv(seq, tmp_path / "s.csv")
    rows = (tmp_path / "s.csv").read_text().splitlines()
    assert rows[0] == "m,classification,J"
    assert rows[3] == "3,eventual-absence,10"


@given(st.floats(0.1, 50), st.floats(-0.2, 0.2), st.integers(5, 40))
def test_exponential_recovers_parameters(a, b, npts):
    x = np.linspace(1, 60, npts)
    res = fit(x, a * np.exp(b * x), EXPONENTIAL)
    assert res.a == pytest.approx(a, rel=1e-9, abs=1e-9)
    assert res.b == pytest.approx(b, rel=1e-9, abs=1e-9)


@given(st.floats(-50, 50), st.floats(-50, 50), st.sampled_from([2, 3, 4, 8]), st.integers(5, 40))
def test_root_affine_recovers_parameters(a, b, r, npts):
    x = np.linspace(1, 500, npts)
    res = fit(x, a * x ** (1 / r) + b, ROOT_AFFINE, r)
    assert res.a == pytest.approx(a, rel=1e-9, abs=1e-9)
    assert res.b == pytest.approx(b, rel=1e-9, abs=1e-9)
    assert res.residual < 1e-12 * max(1.0, a * a + b * b) * npts


@given(st.floats(-1, 1), st.floats(-1, 1))
def test_root_affine_is_optimal(da, db):
    x = np.arange(1, 51, dtype=float)
    y = np.array(ONSETS, dtype=float)
    res = fit(x, y, ROOT_AFFINE, 8)
    assert res.residual <= residual_of(ROOT_AFFINE, res.a + da, res.b + db, x, y, 8) + 1e-9


def test_fit_beats_published_constants():
    x = np.arange(1, 51, dtype=float)
    fam, a, b, r = PUBLISHED_CURVES["g2"]
    res = fit(x, ONSETS, fam, r)
    assert res.residual <= residual_of(fam, a, b, x, ONSETS, r)


def test_fit_errors():
    with pytest.raises(FitError):
        fit([1, 1, 1], [2, 3, 4], ROOT_AFFINE, 2)
    with pytest.raises(FitError):
        fit([1], [2], EXPONENTIAL)
    with pytest.raises(DomainError):
        fit([1, 2], [0, 1], EXPONENTIAL)
    with pytest.raises(DomainError):
        fit([1, 2], [1, 2], ROOT_AFFINE)
    with pytest.raises(DomainError):
        fit([1, 2], [1, 2], "cubic")
