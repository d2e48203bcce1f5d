"""Paired convergence runs: baseline, B version and IC-block version on the same data."""

import pandas as pd
from loguru import logger

from icnet.data.data_models import LabeledDataset
from icnet.data.transforms import Augmenter
from icnet.models.data_models import ModelSpec
from icnet.models.network import build_model
from icnet.models.variants import paired_variants
from icnet.training.data_models import TrainConfig
from icnet.training.loop import train_epochs

VARIANT_LABELS = ("baseline", "layer", "block")


def run_paired_convergence(
    spec: ModelSpec,
    train_ds: LabeledDataset,
    eval_ds: LabeledDataset,
    cfg: TrainConfig,
    seeds: list[int],
    augment: Augmenter | None = None,
) -> pd.DataFrame:
    """Train the three variants for every seed; one row per (seed, variant, epoch).

    The variants of one seed share initial weights wherever layer shapes coincide.
    """
    rows = []
    for seed in seeds:
        run_cfg = cfg.model_copy(update={"seed": seed})
        for label, variant in zip(VARIANT_LABELS, paired_variants(spec), strict=True):
            logger.info(f"Seed {seed}: training {variant.name}")
            network = build_model(variant, seed)
            metrics = train_epochs(network, train_ds, eval_ds, run_cfg, augment=augment)
            rows.extend(
                {"seed": seed, "variant": label, "model": variant.name, **m.model_dump()}
                for m in metrics
            )
    return pd.DataFrame(rows)


def summarize_convergence(curves: pd.DataFrame) -> pd.DataFrame:
    """Per IC variant: seeds where its first-epoch training loss beats the baseline, and
    the mean and worst final eval-accuracy difference to the baseline."""
    first = curves[curves["epoch"] == curves["epoch"].min()].pivot(
        index="seed", columns="variant", values="train_loss"
    )
    last = curves[curves["epoch"] == curves["epoch"].max()].pivot(
        index="seed", columns="variant", values="eval_acc"
    )
    rows = []
    for label in VARIANT_LABELS[1:]:
        delta = last[label] - last["baseline"]
        rows.append(
            {
                "variant": label,
                "seeds": len(first),
                "epoch1_loss_wins": int((first[label] < first["baseline"]).sum()),
                "mean_final_acc_delta": float(delta.mean()),
                "min_final_acc_delta": float(delta.min()),
            }
        )
    return pd.DataFrame(rows)
