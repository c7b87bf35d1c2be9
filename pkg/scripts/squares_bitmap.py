"""Existence bitmap of Taxicab(2, j, m), its boundary J(m) and the root-affine fit."""

import argparse
from pathlib import Path

import numpy as np

from taxicab.grid_reporting import (
    PUBLISHED_CURVES,
    build_grid,
    complement_from_grid,
    emit_csv,
    emit_pbm,
    extract_boundary,
    fit,
    residual_of,
)
from taxicab.taxicab_solver import ColumnScanner, classify_column


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--m-max", type=int, default=100)
    ap.add_argument("--j-max", type=int, default=60)
    ap.add_argument("--workers", type=int, default=4)
    ap.add_argument("--out", default="out")
    args = ap.parse_args()

    out = Path(args.out)
    out.mkdir(exist_ok=True)
    scanner = ColumnScanner(2, args.m_max, args.j_max)
    grid = build_grid(2, (1, args.j_max), (1, args.m_max), workers=args.workers, scanner=scanner)
    emit_pbm(grid, out / "squares.pbm", undetermined="black")
    emit_csv(grid, out / "squares.csv")
    cols = [classify_column(2, m, args.j_max, scanner=scanner) for m in grid.ms]
    boundary = extract_boundary(grid, cols)
    emit_csv(boundary, out / "boundary.csv")

    undetermined = [c.m for c in cols if c.verdict == "undetermined"]
    print("complement:", complement_from_grid(grid))
    print("undetermined columns:", undetermined)

    x, y = boundary.xy()
    fam, a, b, r = PUBLISHED_CURVES["g2"]
    ours = fit(x, y, fam, r)
    print(f"fit  J(m) ~ {ours.a:.4f} m^(1/{r}) + {ours.b:.4f}   SSE {ours.residual:.2f}")
    print(f"printed constants ({a}, {b})   SSE {residual_of(fam, a, b, x, y, r):.2f}")

    members = np.array([c.m for c in cols if c.verdict == "eventual-increment"], dtype=float)
    if members.size > 2:
        growth = fit(np.arange(1, members.size + 1), members, "exponential")
        print(f"members ~ {growth.a:.4f} exp({growth.b:.5f} i)")


if __name__ == "__main__":
    main()
