#!/usr/bin/env python3
"""Benchmark step growth of every builtin machine and write one CSV each.

Usage: python scripts/run_benchmarks.py [outdir]
"""

import pathlib
import sys

from qmlab.cli import main

MACHINES = ["lprime", "mk:1", "mk:2", "mk:3", "tk:1", "tk:2", "tk:3",
            "anbn:linear", "anbn:quadratic"]


def bench_all(outdir: str) -> int:
    out = pathlib.Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    worst = 0
    for name in MACHINES:
        path = out / (name.replace(":", "_") + ".csv")
        worst = max(worst, main(["bench", "--machine", name, "--out", str(path)]))
    return worst


if __name__ == "__main__":
    sys.exit(bench_all(sys.argv[1] if len(sys.argv) > 1 else "bench_out"))
