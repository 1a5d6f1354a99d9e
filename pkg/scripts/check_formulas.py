#!/usr/bin/env python3
"""Print observed vs predicted cleanup-cycle schedules for the riffle-copy
acceptor, then run the formulas and pi verify suites.

Usage: python scripts/check_formulas.py [k_max]
"""

import sys

from qmlab.analysis import lprime_timing
from qmlab.cli import main
from qmlab.oracles import gen_lprime


def table(k_max: int) -> None:
    print(f"{'k':>3} {'prefix':>7} {'tail':>7} {'predicted':>9}  cycle lengths")
    for k in range(k_max + 1):
        t = lprime_timing(gen_lprime(k, 2000 + k))
        mark = "" if t.ok else "  <-- MISMATCH"
        print(f"{k:>3} {t.prefix_length:>7} {t.tail_steps:>7} "
              f"{t.predicted_tail:>9}  {list(t.cycle_lengths)}{mark}")


if __name__ == "__main__":
    k_max = int(sys.argv[1]) if len(sys.argv) > 1 else 10
    table(k_max)
    code = main(["verify", "--suite", "formulas", "--k-max", str(k_max)])
    code = max(code, main(["verify", "--suite", "pi"]))
    sys.exit(code)
