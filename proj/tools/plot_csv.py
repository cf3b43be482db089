#!/usr/bin/env python3
"""Render PNG plots from the CSV artifacts a run directory contains.

Usage:
    tools/plot_csv.py out/simulate/20260814T120000Z
    tools/plot_csv.py out/eigen/latest --output /tmp/figs
    tools/plot_csv.py out/accelerate/g --loglog

The script inspects which CSV files are present (series.csv, final_state.csv,
eigen.csv, profile*.csv, bracket.csv) and renders one figure per file next to
the data (or under --output).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import pandas as pd  # noqa: E402


def save(fig, out_dir: Path, name: str) -> None:
    out = out_dir / name
    fig.tight_layout()
    fig.savefig(out, dpi=140)
    plt.close(fig)
    print(f"wrote {out}")


def plot_series(path: Path, out_dir: Path, loglog: bool) -> None:
    df = pd.read_csv(path)
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(8, 7), sharex=True)
    ax1.plot(df["t"], df["h"], label="h(t)")
    ax1.plot(df["t"], df["g"], label="g(t)")
    ax1.set_ylabel("front position")
    ax1.legend()
    ax2.plot(df["t"], df["sup_u"], label="sup u")
    ax2.plot(df["t"], df["mass"], label="mass")
    ax2.set_xlabel("t")
    ax2.legend()
    save(fig, out_dir, "series.png")

    if loglog:
        fig, ax = plt.subplots(figsize=(7, 5))
        tail = df[df["t"] > 0]
        ax.loglog(tail["t"], tail["h"], label="h(t)")
        ax.set_xlabel("t")
        ax.set_ylabel("h")
        ax.legend()
        save(fig, out_dir, "growth.png")


def plot_final_state(path: Path, out_dir: Path) -> None:
    df = pd.read_csv(path)
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.plot(df["x"], df["u"])
    ax.set_xlabel("x")
    ax.set_ylabel("u")
    save(fig, out_dir, "final_state.png")


def plot_eigen(path: Path, out_dir: Path) -> None:
    df = pd.read_csv(path)
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.semilogx(df["l"], df["lambda_p"], marker="o")
    ax.axhline(0.0, color="gray", lw=0.8)
    ax.set_xlabel("half-length l")
    ax.set_ylabel("lambda_p")
    save(fig, out_dir, "eigen.png")


def plot_profiles(paths: list[Path], out_dir: Path) -> None:
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for p in paths:
        df = pd.read_csv(p)
        ax.plot(df["x"], df["phi"], label=p.stem)
    ax.set_xlabel("x")
    ax.set_ylabel("phi")
    ax.legend()
    save(fig, out_dir, "profiles.png")


def plot_bracket(path: Path, out_dir: Path) -> None:
    df = pd.read_csv(path)
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.plot(df["c"], df["p"], marker="o", ls="none")
    ax.axhline(0.0, color="gray", lw=0.8)
    ax.set_xlabel("c")
    ax.set_ylabel("c - M(c)")
    save(fig, out_dir, "bracket.png")


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("run_dir", type=Path, help="run directory containing CSV artifacts")
    ap.add_argument("--output", type=Path, default=None,
                    help="directory for the PNGs (default: the run directory)")
    ap.add_argument("--loglog", action="store_true",
                    help="also render h(t) on log-log axes (acceleration runs)")
    args = ap.parse_args()

    run_dir: Path = args.run_dir
    if not run_dir.is_dir():
        print(f"error: {run_dir} is not a directory", file=sys.stderr)
        return 2
    out_dir = args.output or run_dir
    out_dir.mkdir(parents=True, exist_ok=True)

    rendered = 0
    if (run_dir / "series.csv").exists():
        plot_series(run_dir / "series.csv", out_dir, args.loglog)
        rendered += 1
    if (run_dir / "final_state.csv").exists():
        plot_final_state(run_dir / "final_state.csv", out_dir)
        rendered += 1
    if (run_dir / "eigen.csv").exists():
        plot_eigen(run_dir / "eigen.csv", out_dir)
        rendered += 1
    profiles = sorted(run_dir.glob("profile*.csv"))
    if profiles:
        plot_profiles(profiles, out_dir)
        rendered += 1
    if (run_dir / "bracket.csv").exists():
        plot_bracket(run_dir / "bracket.csv", out_dir)
        rendered += 1

    if rendered == 0:
        print(f"error: no known CSV artifacts under {run_dir}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
