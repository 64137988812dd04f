#!/usr/bin/env python3
"""Plot kinetic energy against time for every member of an energy CSV
written by `ensflow run` or `ensflow study`.

    plot_energy.py out/offset_case2/energy.csv [-o energy.png] [--log]

Members whose deviation condition fails at some step are labelled as such.
"""

import argparse

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd


def main():
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("csv")
    parser.add_argument("-o", "--output", default="energy.png")
    parser.add_argument("--log", action="store_true", help="logarithmic energy axis")
    args = parser.parse_args()

    data = pd.read_csv(args.csv, keep_default_na=False)
    fig, ax = plt.subplots(figsize=(7, 4))
    for member, rows in data.groupby("member"):
        label = f"member {member}"
        if rows["flags"].str.contains("deviation").any():
            label += " (deviation flagged)"
        ax.plot(rows["t"], rows["energy"], label=label)
    ax.set_xlabel("t")
    ax.set_ylabel("kinetic energy")
    if args.log:
        ax.set_yscale("log")
    ax.legend()
    fig.tight_layout()
    fig.savefig(args.output, dpi=150)


if __name__ == "__main__":
    main()
