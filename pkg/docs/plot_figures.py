"""Plot the datasets written by ``fracspline figures``.

Usage::

    fracspline figures --out figures
    python docs/plot_figures.py figures

Needs matplotlib, which fracspline itself does not depend on.
"""

from __future__ import annotations

import sys
from pathlib import Path

import matplotlib.pyplot as plt
import numpy as np

from fracspline.formatter import parse_csv


def _load(path: Path) -> tuple[list[str], np.ndarray]:
    table = parse_csv(path.read_text(encoding="utf-8"))
    return table.header, np.asarray(table.rows, dtype=float)


def plot_curves(directory: Path, prefix: str, ax) -> None:
    for path in sorted(directory.glob(f"{prefix}_*.csv")):
        header, data = _load(path)
        x = data[:, header.index("x")]
        ax.plot(x, data[:, header.index("reconstruction")], label=path.stem.split("_")[-1])
        ax.plot(x, data[:, header.index("target")], "k:", linewidth=0.8)
    ax.set_title(prefix)
    ax.legend(title="alpha")


def plot_surface(path: Path, fig, position: int) -> None:
    header, data = _load(path)
    xs = np.unique(data[:, header.index("x")])
    ys = np.unique(data[:, header.index("y")])
    z = data[:, header.index("reconstruction")].reshape(len(ys), len(xs))
    ax = fig.add_subplot(2, 2, position, projection="3d")
    gx, gy = np.meshgrid(xs, ys)
    ax.plot_surface(gx, gy, z, cmap="viridis")
    ax.set_title(path.stem)


def main(directory: Path) -> None:
    fig = plt.figure(figsize=(11, 9))
    plot_curves(directory, "fig1_causal", fig.add_subplot(2, 2, 1))
    plot_curves(directory, "fig2_symmetric", fig.add_subplot(2, 2, 2))
    for position, path in enumerate(sorted(directory.glob("fig3_*.csv")), start=3):
        plot_surface(path, fig, position)
    fig.tight_layout()
    out = directory / "figures.png"
    fig.savefig(out, dpi=150)
    print(f"wrote {out}")


if __name__ == "__main__":
    main(Path(sys.argv[1] if len(sys.argv) > 1 else "figures"))
