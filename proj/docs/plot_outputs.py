#!/usr/bin/env python3
"""Plot whichever qrefl CSV outputs exist in a run directory.

usage: plot_outputs.py OUTPUT_DIR [--save]
"""

import argparse
from pathlib import Path

import matplotlib.pyplot as plt
import pandas as pd

PLOTS = {
    "static_scan.csv": ("x0_m", None, "connection point x0 [m]", "R", False),
    "driven_scan.csv": ("x0_m", None, "connection point x0 [m]", "R_n", False),
    "velocity_sweep.csv": ("v_mps", None, "v [m/s]", "R", True),
    "z_density.csv": ("z", "rho", "z", "rho(z)", False),
    "momentum_density.csv": ("k_per_m", "density_m", "k [1/m]", "density [m]", False),
    "coordinate_density.csv": ("x_m", "density_per_m", "x [m]", "|psi|^2 [1/m]", False),
}


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("directory", type=Path)
    ap.add_argument("--save", action="store_true", help="write PNGs next to the CSVs instead of showing")
    args = ap.parse_args()

    found = False
    for name, (x, y, xlabel, ylabel, logx) in PLOTS.items():
        path = args.directory / name
        if not path.exists():
            continue
        found = True
        df = pd.read_csv(path, comment="#")
        columns = [y] if y else [c for c in df.columns if c != x and pd.api.types.is_numeric_dtype(df[c])]
        fig, ax = plt.subplots()
        for col in columns:
            ax.plot(df[x], df[col], marker="." if len(df) < 200 else None, label=col)
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        if logx:
            ax.set_xscale("log")
        if len(columns) > 1:
            ax.legend()
        ax.set_title(name)
        if args.save:
            fig.savefig(path.with_suffix(".png"), dpi=120)
            plt.close(fig)
    if not found:
        raise SystemExit(f"no qrefl CSV outputs in {args.directory}")
    if not args.save:
        plt.show()


if __name__ == "__main__":
    main()
