"""Plot the figure datasets written by `sfqm-tunnel --figure`."""

import csv
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

ROOT = Path(__file__).resolve().parent.parent
GOLDEN = ROOT / "crates" / "cli" / "tests" / "golden"


def load(path):
    with open(path) as f:
        rows = list(csv.DictReader(line for line in f if not line.startswith("#")))
    return {k: np.array([float(r[k]) for r in rows]) for k in ("b", "N", "gamma")}


def plot(name, title, out_dir):
    d = load(GOLDEN / f"{name}.csv")
    fig, ax = plt.subplots(figsize=(6, 4))
    for n in (1, 2, 3, 4):
        sel = d["N"] == n
        ax.plot(d["b"][sel], d["gamma"][sel], label=f"N = {n}")
    ax.set_xlabel("barrier width b")
    ax.set_ylabel("tunneling time")
    ax.set_title(title)
    ax.set_xlim(0, 20)
    ax.legend()
    fig.tight_layout()
    fig.savefig(out_dir / f"{name}.png", dpi=120)


if __name__ == "__main__":
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parent
    plot("fig1a", "alpha = 2, V = 5, E = 3, L = 0.2", out)
    plot("fig1b", "alpha = 1.995, V = 5, E = 3, L = 0.2", out)
