from pathlib import Path

import matplotlib.pyplot as plt
import numpy as np
import pandas as pd
from matplotlib.colors import ListedColormap

from icnet.data.synthetic import xor_dataset
from icnet.training.data_models import MetricsRecord

VARIANT_COLOUR = {
    "baseline": "#0077B6",
    "layer": "#F97F77",
    "block": "#4c956c",
}

REGION_COLOUR = ["#D6CCC2", "#90E0EF", "#FE6D73"]


def read_metrics(runs: dict[str, str | Path]) -> pd.DataFrame:
    """
    Stack the ``metrics.csv`` files of several runs into one frame.

    :param runs: Mapping of run label to metrics CSV path
    :type runs: dict[str, str | Path]
    :return: Metrics rows with an added ``run`` column and train/eval error columns
    :rtype: DataFrame
    """
    frames = []
    for label, path in runs.items():
        df = pd.read_csv(path)
        missing = set(MetricsRecord.model_fields) - set(df.columns)
        if missing:
            raise ValueError(f"{path} is not a metrics file, missing columns {sorted(missing)}")
        df["run"] = label
        frames.append(df)
    metrics = pd.concat(frames, ignore_index=True)
    metrics["train_error"] = 1.0 - metrics["train_acc"]
    metrics["eval_error"] = 1.0 - metrics["eval_acc"]
    return metrics


def plot_training_curves(
    runs: dict[str, str | Path],
    title: str | None = None,
    save_path: str | Path | None = None,
    show: bool = False,
) -> pd.DataFrame:
    """
    Plot error against epoch for paired runs: training error dashed, eval error solid.

    :param runs: Mapping of run label to metrics CSV path
    :type runs: dict[str, str | Path]
    :param title: Title of chart
    :type title: str | None
    :param save_path: Path to save chart to
    :type save_path: str | Path | None
    :return: The stacked metrics that were plotted
    :rtype: DataFrame
    """
    metrics = read_metrics(runs)
    fig, ax = plt.subplots(figsize=(8, 5))
    for i, (label, df) in enumerate(metrics.groupby("run", sort=False)):
        colour = VARIANT_COLOUR.get(label, f"C{i}")
        epochs = df["epoch"] + 1
        ax.plot(
            epochs, df["train_error"] * 100, linestyle="--", color=colour, label=f"{label} train"
        )
        ax.plot(epochs, df["eval_error"] * 100, linestyle="-", color=colour, label=f"{label} eval")

    ax.set_xlabel("Epoch")
    ax.set_ylabel("Error (%)")
    if title:
        ax.set_title(title)
    ax.grid(linestyle="--", alpha=0.6)
    ax.legend(frameon=False, ncol=2)
    fig.tight_layout()

    if save_path:
        Path(save_path).parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(save_path, dpi=200)
    if show:
        plt.show()
    plt.close(fig)
    return metrics


def plot_region_map(
    labels: np.ndarray | str | Path,
    bounds: tuple[float, float, float, float] = (-1.5, 1.5, -1.5, 1.5),
    title: str | None = None,
    save_path: str | Path | None = None,
    show: bool = False,
) -> None:
    """
    Draw an activation-pattern label grid with the four XOR points on top.

    :param labels: Label grid (rows = x2) or the path of a region CSV
    :param bounds: (x1_min, x1_max, x2_min, x2_max) the grid spans
    :param save_path: Path to save chart to
    """
    if not isinstance(labels, np.ndarray):
        labels = pd.read_csv(labels, header=None).to_numpy()

    fig, ax = plt.subplots(figsize=(5, 5))
    ax.imshow(
        labels,
        origin="lower",
        extent=bounds,
        cmap=ListedColormap(REGION_COLOUR),
        vmin=0,
        vmax=len(REGION_COLOUR) - 1,
        interpolation="nearest",
    )
    xor = xor_dataset()
    for point, label in zip(xor.images, xor.labels, strict=True):
        ax.scatter(*point, marker="o" if label == 0 else "x", color="black", s=60)

    ax.set_xlabel("$x_1$")
    ax.set_ylabel("$x_2$")
    if title:
        ax.set_title(title)
    fig.tight_layout()

    if save_path:
        Path(save_path).parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(save_path, dpi=200)
    if show:
        plt.show()
    plt.close(fig)


def plot_cos_theta(sweep_path: str | Path, save_path: str | Path | None = None) -> None:
    """Plot a ``w_prime,cos_theta`` sweep CSV on a symmetric-log axis."""
    sweep = pd.read_csv(sweep_path)
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(sweep["w_prime"], sweep["cos_theta"], color=VARIANT_COLOUR["baseline"])
    ax.axhline(0.0, color="gray", linestyle="--", linewidth=1)
    ax.set_xscale("symlog")
    ax.set_xlabel("w'")
    ax.set_ylabel("cos θ")
    ax.set_ylim(-1.05, 1.05)
    ax.grid(linestyle="--", alpha=0.6)
    fig.tight_layout()
    if save_path:
        Path(save_path).parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(save_path, dpi=200)
    plt.close(fig)
