"""Example plot of trajectory CSVs written by ``safegame trajectory``.

    safegame trajectory --config configs/type_a_trajectory.ini
    python docs/plot_trajectories.py results/type_a_trajectory
"""

import sys
from pathlib import Path

import matplotlib.pyplot as plt
import numpy as np


def main(folder):
    folder = Path(folder)
    fig, axes = plt.subplots(1, 3, figsize=(13, 3.5))
    for path in sorted(folder.glob("traj_*.csv")):
        data = np.genfromtxt(path, delimiter=",", names=True)
        label = path.stem.removeprefix("traj_")
        axes[0].plot(data["t"], data["pi_h"], label=label)
        axes[1].plot(data["t"], data["exp_reward"], label=label)
        axes[2].plot(data["t"], data["exp_risk"], label=label)
    for ax, title in zip(axes, ("human strategy", "expected reward", "expected risk")):
        ax.set_title(title)
        ax.set_xlabel("strategy time")
    axes[0].legend(fontsize=6)
    fig.tight_layout()
    fig.savefig(folder / "trajectories.png", dpi=150)


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "results/type_a_trajectory")
