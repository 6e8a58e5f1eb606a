#!/usr/bin/env python3
"""Plot bidir-relay CSV output.

    plot_figs.py dmt dmt.csv -o dmt.png
    plot_figs.py sweep sweep.csv [more.csv ...] -o outage.png
    plot_figs.py lemma lemma1.csv -o lemma1.png
"""

import argparse
import io

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd

SCHEMA_VERSION = "1"


def read(path):
    with open(path) as f:
        first = f.readline().strip()
        if first != f"schema_version,{SCHEMA_VERSION}":
            raise SystemExit(f"{path}: expected schema_version,{SCHEMA_VERSION}, got {first!r}")
        return pd.read_csv(io.StringIO(f.read()))


def plot_dmt(frames, ax):
    for df in frames:
        for name, g in df.groupby("scenario", sort=False):
            ax.plot(g["m"], g["d"], label=f"{name} (tau_f={g['tau_f'].iloc[0]:g})")
    ax.set_xlabel("multiplexing gain m")
    ax.set_ylabel("diversity d(m)")
    ax.set_xlim(left=0)
    ax.set_ylim(bottom=0)


def plot_sweep(frames, ax):
    for df in frames:
        for name, g in df.groupby("scenario", sort=False):
            g = g[g["eps_hat"] > 0]
            err = [g["eps_hat"] - g["ci_low"], g["ci_high"] - g["eps_hat"]]
            ax.errorbar(g["gamma_bar_db"], g["eps_hat"], yerr=err, marker="o", capsize=2, label=name)
    ax.set_yscale("log")
    ax.set_xlabel("mean SNR (dB)")
    ax.set_ylabel("outage probability")


def plot_lemma(frames, ax):
    for df in frames:
        ax.semilogx(df["omega"], df["exponent_hat"], "o-", label="measured exponent")
        ax.semilogx(df["omega"], df["bound"], "k--", label="bound")
    ax.set_xlabel("omega")
    ax.set_ylabel("log P / log omega")


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("kind", choices=["dmt", "sweep", "lemma"])
    ap.add_argument("csv", nargs="+")
    ap.add_argument("-o", "--out", required=True)
    args = ap.parse_args()

    frames = [read(p) for p in args.csv]
    fig, ax = plt.subplots(figsize=(6.4, 4.4))
    {"dmt": plot_dmt, "sweep": plot_sweep, "lemma": plot_lemma}[args.kind](frames, ax)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize="small")
    fig.tight_layout()
    fig.savefig(args.out, dpi=150)


if __name__ == "__main__":
    main()
