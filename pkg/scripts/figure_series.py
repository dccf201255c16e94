"""Write the decay curves behind the figures as CSV.

    python scripts/figure_series.py [--out results/figures] [1 2 3 4 5 6]

Each file holds t, the functional, its three exponential envelopes and
the interior-only functional; any plotting tool can read them.
"""
import argparse
from pathlib import Path

import numpy as np

from hypstab import harness


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("figures", nargs="*", type=int, default=sorted(harness.FIGURES))
    p.add_argument("--out", type=Path, default=Path("results/figures"))
    args = p.parse_args()
    for fid in args.figures:
        for (label, mu), res in sorted(harness.figure_data(fid).items()):
            name = f"fig{fid}_{label}_mu{mu:g}.csv"
            harness.write_series_csv(res, args.out / name)
            v = res.series.values
            over = np.max(v / res.bounds["alpha_mu"]) if v[0] > 0 else float("nan")
            print(f"{name}: {len(v)} levels, final L = {v[-1]:.3e}, "
                  f"max L / L_up(alpha mu) = {over:.4f}")


if __name__ == "__main__":
    main()
