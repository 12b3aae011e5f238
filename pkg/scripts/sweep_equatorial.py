#!/usr/bin/env python3
"""Write the equatorial visibility-threshold sweep to CSV.

Usage: python scripts/sweep_equatorial.py [OUT.csv] [N_MAX]
"""

import sys

from workbound.alignment import equatorial_threshold


def main():
    out = sys.argv[1] if len(sys.argv) > 1 else "equatorial_thresholds.csv"
    n_max = int(sys.argv[2]) if len(sys.argv) > 2 else 64
    lines = ["n,r,v_c,classical,quantum_at_1"]
    for n in range(2, n_max + 1):
        r = equatorial_threshold(n)
        lines.append(f"{n},{r:.17g},{r:.17g},{0.5 * (1 + r):.17g},1")
    with open(out, "w", newline="") as handle:
        handle.write("\n".join(lines) + "\n")
    print(f"wrote {n_max - 1} rows to {out}")


if __name__ == "__main__":
    main()
