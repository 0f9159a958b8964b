"""Exhaustive point census of V(P_t) by rank, written as CSV.

    python3 scripts/census.py --out census.csv
"""
import argparse

from pmx.strata import exhaustive_count

TABLE = [(2, 2, 1), (2, 2, 2), (2, 3, 1), (2, 3, 2), (2, 5, 2), (3, 2, 2), (3, 3, 2),
         (4, 2, 3), (4, 2, 2)]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out")
    a = ap.parse_args()
    lines = ["n,q,t,rank,count"]
    for n, q, t in TABLE:
        c = exhaustive_count(n, q, t)
        lines += c.to_csv().splitlines()[1:]
        print(f"n={n} q={q} t={t}: {c.total} points, by rank {c.by_rank}")
    if a.out:
        with open(a.out, "w") as fh:
            fh.write("\n".join(lines) + "\n")


if __name__ == "__main__":
    main()
