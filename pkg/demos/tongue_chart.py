"""Stability chart of the damped Mathieu oscillator.

Sweeps (delta, epsilon) with and without damping, prints how much of the
plane is unstable and where the first two tongues meet the delta axis, and
saves a side-by-side figure when matplotlib is available.

    python demos/tongue_chart.py [out_dir]
"""

import sys
from pathlib import Path

import numpy as np

from cqed_tongues.mathieu import UNSTABLE
from cqed_tongues.stability import SweepSpec, sweep, tongue_boundary, write_grid_pgm


def tip(points, centre, width=0.02):
    near = [e for d, e in points if abs(d - centre) <= width]
    return min(near) if near else float("nan")


def main(out_dir="."):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    grids = {}
    for gamma in (0.0, 0.1):
        grid = sweep(SweepSpec(gamma=gamma))
        points = tongue_boundary(grid)
        grids[gamma] = (grid, points)
        share = grid.count(UNSTABLE) / grid.labels.size
        print(f"gamma={gamma:<4} unstable share {share:.3f}  "
              f"lowest boundary near delta=1: {tip(points, 1.0):.4f}, near delta=4: {tip(points, 4.0):.4f}")
        write_grid_pgm(grid, out / f"tongue_gamma{gamma}.pgm")

    try:
        import matplotlib.pyplot as plt
    except ImportError:
        print("matplotlib not installed; wrote PGM images only")
        return
    fig, axes = plt.subplots(1, 2, figsize=(10, 4), sharey=True)
    for ax, (gamma, (grid, points)) in zip(axes, grids.items()):
        s = grid.spec
        ax.imshow(grid.labels == UNSTABLE, origin="lower", aspect="auto", cmap="Greys",
                  extent=(s.deltas[0], s.deltas[-1], s.epsilons[0], s.epsilons[-1]))
        if points:
            d, e = np.array(points).T
            ax.plot(d, e, ".", ms=1, color="tab:red")
        ax.set_title(f"gamma = {gamma}")
        ax.set_xlabel("delta")
    axes[0].set_ylabel("epsilon")
    fig.tight_layout()
    fig.savefig(out / "tongues.png", dpi=120)
    print(f"figure written to {out / 'tongues.png'}")


if __name__ == "__main__":
    main(*sys.argv[1:])
