"""Directivity of the reference array for the four low-order patterns.

Prints closed-form and quadrature normalizations side by side.

    python3 scripts/reference_directivity.py [--array PATH] [--theta DEG] [--phi DEG]
"""

import argparse
from pathlib import Path
import time

from arraydir import Direction, ElementPattern, directivity, read_array
from arraydir.directivity import to_dbi
from arraydir.quadrature import normalization_numeric_many

DEFAULT_ARRAY = Path(__file__).resolve().parents[1] / "data" / "reference_array.json"
REFERENCE_DBI = {(0, 0): 7.75, (0, 1): 5.68, (1, 0): 9.18, (1, 1): 2.38}


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--array", default=DEFAULT_ARRAY)
    parser.add_argument("--theta", type=float, default=101.44)
    parser.add_argument("--phi", type=float, default=267.75)
    args = parser.parse_args()

    array = read_array(args.array)
    direction = Direction.from_degrees(args.theta, args.phi)
    patterns = [ElementPattern(u, v) for u, v in REFERENCE_DBI]
    start = time.perf_counter()
    closed = [directivity(array, p, direction) for p in patterns]
    t_closed = time.perf_counter() - start
    start = time.perf_counter()
    numeric = normalization_numeric_many(array, patterns)
    t_numeric = time.perf_counter() - start

    print(f"{'u':>2} {'v':>2} {'closed dBi':>11} {'oracle dBi':>11} {'reference':>10} {'T rel.err':>10}")
    for p, c, n in zip(patterns, closed, numeric):
        intensity = c.linear * c.breakdown.total
        rel = abs(c.breakdown.total - n.value) / n.value
        print(f"{p.u:>2} {p.v:>2} {c.dBi:11.4f} {to_dbi(intensity / n.value):11.4f} "
              f"{REFERENCE_DBI[(p.u, p.v)]:10.2f} {rel:10.2e}")
    print(f"closed form {t_closed * 1e3:.1f} ms, quadrature {t_numeric:.2f} s")


if __name__ == "__main__":
    main()
