#!/usr/bin/env python3
"""Emit the three bound curves over a grid and print the headline anchors.

Usage: python scripts/bound_curves.py [out.csv]
"""

import sys

from dimsurgery.cli import main as cli_main
from dimsurgery.entropy import bound_curves, entropy_inv

if __name__ == "__main__":
    out = sys.argv[1] if len(sys.argv) > 1 else "curves.csv"
    print(f"H^-1(1/2)        = {float(entropy_inv(0.5)):.6f}  (~.1)")
    print(f"1/2 - H^-1(1/2)  = {0.5 - float(entropy_inv(0.5)):.6f}  (~.4)")
    bc = bound_curves(0.25, 0.75)
    print(f"(s,t)=(0.25,0.75): naive={bc.naive:.4f} raise={bc.raise_:.4f} "
          f"lower={bc.lower:.4f}")
    sys.exit(cli_main(["curves", "--grid", "0.01", "--out", out]))
