#!/usr/bin/env python3
"""Run every verification target at a moderate desk scale.

Usage: python scripts/verify_all.py
Exit code 0 iff every target passes.
"""

import sys

from dimsurgery.cli import main as cli_main

TARGETS = [
    ["verify", "harper", "--n", "8", "--trials", "2000"],
    ["verify", "corollary", "--n", "14", "--trials", "10"],
    ["verify", "cover", "--n", "14"],
    ["verify", "convexity"],
    ["verify", "concavity", "--grid", "0.002"],
    ["verify", "buffer", "--horizon", "10000", "--c", "10"],
    ["verify", "duplication", "--n", "10000", "--trials", "100"],
]

if __name__ == "__main__":
    worst = 0
    for argv in TARGETS:
        print(f"== dimsurgery {' '.join(argv)}")
        worst = max(worst, cli_main(list(argv)))
    sys.exit(worst)
