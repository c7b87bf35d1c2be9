"""Print the small Taxicab(2, j, m) tables and the four-square sequence, with the bound searched."""

import argparse

from taxicab.partition_core import count_row
from taxicab.taxicab_solver import certify_tail_increment, certify_tail_nonexistence, taxicab


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--bound", type=int, default=10_000)
    ap.add_argument("--m-max", type=int, default=3)
    ap.add_argument("--j-max", type=int, default=12)
    args = ap.parse_args()

    for m in range(1, args.m_max + 1):
        row = []
        for j in range(2, args.j_max + 1):
            out = taxicab(2, j, m, args.bound)
            row.append(str(out.n) if out.found else "-")
        print(f"m={m:2d}  j=2..{args.j_max}: " + " ".join(row))
        inc = next((c for j in range(2, args.j_max + 1) if (c := certify_tail_increment(2, j, m))), None)
        if inc:
            print(f"      increments from j={inc.j_start} (n={inc.n0})")
        elif m >= 2:
            cert = next((c for j in range(5, args.j_max + 1) if (c := certify_tail_nonexistence(m, j))), None)
            if cert:
                print(f"      no solutions from j={cert.j_start} (J''={cert.j_cert}, t={cert.t})")

    table = count_row(2, 4, 1000, cap=15)
    seq = [taxicab(2, 4, m, 1000, table=table).n for m in range(1, 15)]
    print("four squares, m=1..14:", ", ".join(map(str, seq)))


if __name__ == "__main__":
    main()
