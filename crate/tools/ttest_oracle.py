#!/usr/bin/env python3
"""Reference oracle for two-sided Student-t p-values.

Emits a frozen grid of (t, df, p) rows computed with scipy, used as golden
data for the continued-fraction implementation. Also prints the worked
paired-t example so its expected numbers can be spot-checked.
"""
import numpy as np
from scipy import stats

OUT = "crates/core/tests/data/ttest_grid.tsv"


def main() -> None:
    rows = []
    for df in (4, 10, 49):
        for i in range(1, 51):  # t = 0.1 .. 5.0 step 0.1, exact decimals
            t = i / 10.0
            p = 2.0 * stats.t.sf(t, df)
            rows.append((t, df, p))
    with open(OUT, "w") as fh:
        for t, df, p in rows:
            fh.write(f"{t:.1f}\t{df}\t{p:.15e}\n")

    a = np.array([1, 2, 3, 4, 5], dtype=float)
    b = np.array([2, 2, 4, 4, 6], dtype=float)
    res = stats.ttest_rel(a, b)
    print(f"wrote {len(rows)} rows to {OUT}")
    print(f"worked example: t={res.statistic:.6f} p={res.pvalue:.6f}")
    # Sanity anchors for the marker thresholds.
    for p in (0.0005, 0.009, 0.05, 0.2):
        print(f"p={p}")


if __name__ == "__main__":
    main()
