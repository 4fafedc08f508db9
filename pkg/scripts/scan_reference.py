"""Sphere scan of the reference array and its maximum-directivity direction.

    python3 scripts/scan_reference.py [--u U] [--v V] [--theta-steps 721] [--phi-steps 1441] [--csv PATH]
"""

import argparse
from pathlib import Path
import time

import numpy as np

from arraydir import ElementPattern, read_array, scan

DEFAULT_ARRAY = Path(__file__).resolve().parents[1] / "data" / "reference_array.json"


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--array", default=DEFAULT_ARRAY)
    parser.add_argument("--u", type=int, default=0)
    parser.add_argument("--v", type=int, default=0)
    parser.add_argument("--theta-steps", type=int, default=721)
    parser.add_argument("--phi-steps", type=int, default=1441)
    parser.add_argument("--csv", help="optional path for the dBi grid (theta rows, phi columns)")
    args = parser.parse_args()

    array = read_array(args.array)
    start = time.perf_counter()
    result = scan(array, ElementPattern(args.u, args.v), args.theta_steps, args.phi_steps)
    elapsed = time.perf_counter() - start
    best = result.best
    theta, phi = best.direction.degrees
    print(f"{args.theta_steps}x{args.phi_steps} grid in {elapsed:.2f} s")
    print(f"max {best.linear:.6f} ({best.dBi:.4f} dBi) at theta={theta:.3f} deg, phi={phi:.3f} deg")
    print(f"cell size {180 / (args.theta_steps - 1):.4f} x {360 / args.phi_steps:.4f} deg")
    if args.csv:
        np.savetxt(args.csv, result.dbi, delimiter=",", fmt="%.6f")
        print(f"wrote {args.csv}")


if __name__ == "__main__":
    main()
