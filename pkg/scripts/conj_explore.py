"""Exploratory run: is P_{n-1} equal to its saturation by det for n = 5?

Report only; the outcome is never a pass or a fail.

    python3 scripts/conj_explore.py --n 5 --seconds 3600 --field Fp:32003
"""
import argparse
import json

from pmx.verify import CheckSpec, run_check


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=5)
    ap.add_argument("--seconds", type=float, default=600)
    ap.add_argument("--field", default="Fp:32003")
    ap.add_argument("--budget-pairs", type=int)
    a = ap.parse_args()
    r = run_check(CheckSpec.make("conj-explore", n=a.n, field=a.field,
                                 budget_seconds=a.seconds, budget_pairs=a.budget_pairs),
                  timing=True)
    print(json.dumps(r.to_dict(), indent=2, sort_keys=True))


if __name__ == "__main__":
    main()
