from icnet.data.data_models import LabeledDataset
from icnet.data.loaders import (
    DATASET_LOADERS,
    load_cifar10,
    load_cifar10_bin,
    load_idx,
    load_mnist,
    write_cifar10_bin,
    write_idx,
)
from icnet.data.synthetic import linearly_separable_on_grid, xor_dataset
from icnet.data.transforms import Augmenter, channel_stats, denormalize, normalize

__all__ = [
    "DATASET_LOADERS",
    "Augmenter",
    "LabeledDataset",
    "channel_stats",
    "denormalize",
    "linearly_separable_on_grid",
    "load_cifar10",
    "load_cifar10_bin",
    "load_idx",
    "load_mnist",
    "normalize",
    "write_cifar10_bin",
    "write_idx",
    "xor_dataset",
]
