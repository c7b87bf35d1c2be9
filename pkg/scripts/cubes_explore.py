"""Empirical scan of Taxicab(3, j, m) under the conjectural ceiling (mj + j + C)^3.

Nothing here is a proof: absences are only up to the tabulated limit.
"""

import argparse

from taxicab.taxicab_solver import BoundPolicy, ColumnScanner, classify_column, taxicab


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--m-max", type=int, default=12)
    ap.add_argument("--j-max", type=int, default=40)
    ap.add_argument("--constant", type=int, default=150)
    ap.add_argument("--n-limit", type=int, default=2_000_000)
    args = ap.parse_args()

    print("Taxicab(3, 2, m):", [taxicab(3, 2, m, 10**9).n for m in (1, 2, 3)])
    scanner = ColumnScanner(3, args.m_max, args.j_max, BoundPolicy("conjectural", args.constant),
                            n_limit=args.n_limit)
    print(f"table to n={scanner.n_max}")
    for m in range(1, args.m_max + 1):
        c = classify_column(3, m, args.j_max, scanner=scanner)
        print(f"m={m:3d} {c.verdict:20s} J={c.J:3d} [{c.provenance}]")


if __name__ == "__main__":
    main()
