"""Run the symbolic checks over several characteristics and tabulate verdicts.

    python3 scripts/char_sweep.py --fields Fp:2 Fp:3 Fp:5 Fp:32003 Q --out sweep.json
"""
import argparse
import json
from dataclasses import asdict, dataclass, field

from pmx.verify import CheckSpec, run_check

SYMBOLIC = ["p2-ci", "p2-prime", "q-codim", "min-primes", "qminors", "n4-reduced",
            "n4-linked", "n4-fgen", "n4-colon", "multigrade"]


@dataclass
class SweepConfig:
    fields: list = field(default_factory=lambda: ["Fp:2", "Fp:3", "Fp:5", "Fp:32003", "Q"])
    checks: list = field(default_factory=lambda: list(SYMBOLIC))
    budget_seconds: float = 600.0
    timing: bool = True


def sweep(cfg: SweepConfig):
    table = {}
    for name in cfg.checks:
        row = {}
        for F in cfg.fields:
            r = run_check(CheckSpec.make(name, field=F, budget_seconds=cfg.budget_seconds),
                          timing=cfg.timing)
            row[F] = {"status": r.status, "elapsed_ms": r.elapsed_ms}
        table[name] = row
    return table


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--fields", nargs="+")
    ap.add_argument("--checks", nargs="+")
    ap.add_argument("--budget-seconds", type=float, default=600.0)
    ap.add_argument("--out")
    a = ap.parse_args()
    cfg = SweepConfig(budget_seconds=a.budget_seconds)
    if a.fields:
        cfg.fields = a.fields
    if a.checks:
        cfg.checks = a.checks
    table = sweep(cfg)
    width = max(map(len, cfg.checks))
    print(" " * width + "  " + "  ".join(f"{F:>14}" for F in cfg.fields))
    for name, row in table.items():
        cells = [f"{row[F]['status']:>6} {row[F]['elapsed_ms'] or 0:>6}ms" for F in cfg.fields]
        print(f"{name:<{width}}  " + "  ".join(cells))
    uniform = all(len({c['status'] for c in row.values()}) == 1 for row in table.values())
    print("verdicts identical across characteristics:", uniform)
    if a.out:
        with open(a.out, "w") as fh:
            json.dump({"config": asdict(cfg), "table": table, "uniform": uniform}, fh,
                      indent=2, sort_keys=True)


if __name__ == "__main__":
    main()
