import numpy as np

from icnet.data.data_models import LabeledDataset


def xor_dataset() -> LabeledDataset:
    """(0,0), (0,1), (1,0), (1,1) labelled 0, 1, 1, 0."""
    features = np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]])
    return LabeledDataset(
        images=features, labels=np.array([0, 1, 1, 0]), num_classes=2, split="train", name="xor"
    )


def linearly_separable_on_grid(
    features: np.ndarray, labels: np.ndarray, grid: np.ndarray | None = None
) -> bool:
    """Whether some (w1, w2, b) with every entry on ``grid`` gets sign(w.x + b) right.

    Label 1 must land strictly on the positive side and label 0 on the other. Only
    2-input problems are supported.
    """
    grid = np.linspace(-2.0, 2.0, 41) if grid is None else np.asarray(grid, dtype=np.float64)
    w1, w2, b = (a.reshape(-1, 1) for a in np.meshgrid(grid, grid, grid, indexing="ij"))
    scores = w1 * features[None, :, 0] + w2 * features[None, :, 1] + b
    positive = np.asarray(labels).reshape(1, -1) == 1
    return bool(np.any(np.all((scores > 0) == positive, axis=1)))
